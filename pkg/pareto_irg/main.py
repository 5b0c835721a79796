#!/usr/bin/env python3
import argparse
import logging
import os
import sys

from dotenv import load_dotenv

# Add the project root to Python path to enable absolute imports
project_root = os.path.dirname(os.path.abspath(__file__))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

try:
    # Try relative imports first (when run as module)
    from .errors import IrgError, VerificationFailure
    from .core.ensemble import EnsembleSpec, run_ensemble
    from .core.experiments import experiment_coarse_grain, experiment_dust_scan, experiment_joint
    from .core.verify import EXIT_FAILED, EXIT_OK, experiment_verify
    from .sampling.graphgen import ModelParams, get_sampler
    from .sampling.heavytail import sample_weights
    from .theory import oracles
    from .utils.limits import SimulationLimits
    from .utils.results_utils import write_edge_list, write_weights
    from .utils.seeding import Purpose, derive_substream
    from .validation.config import load_config
except ImportError:
    # Fall back to absolute imports (when run directly)
    from errors import IrgError, VerificationFailure
    from core.ensemble import EnsembleSpec, run_ensemble
    from core.experiments import experiment_coarse_grain, experiment_dust_scan, experiment_joint
    from core.verify import EXIT_FAILED, EXIT_OK, experiment_verify
    from sampling.graphgen import ModelParams, get_sampler
    from sampling.heavytail import sample_weights
    from theory import oracles
    from utils.limits import SimulationLimits
    from utils.results_utils import write_edge_list, write_weights
    from utils.seeding import Purpose, derive_substream
    from validation.config import load_config

EXIT_INVALID = 1


def _shared_options() -> argparse.ArgumentParser:
    """Flags every subcommand accepts; None means 'not given on the command line'"""
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--n', type=int, help='Number of nodes')
    shared.add_argument('--alpha', type=float, help='Pareto tail index in (0, 1)')
    scale = shared.add_mutually_exclusive_group()
    scale.add_argument('--eps', type=float, help='Edge scale eps')
    scale.add_argument('--k-critical', type=float, help='Critical scale: eps = k * n^(-1/alpha)')
    shared.add_argument('--replicas', type=int, help='Number of independent replicas')
    shared.add_argument('--seed', type=int, help='Master seed (64-bit)')
    shared.add_argument('--out', type=str, help='Output file (CSV, or JSON for verify)')
    shared.add_argument('--config', type=str, help='key=value config file')
    shared.add_argument('--threads', type=int,
                        help=f'Worker processes (max: {SimulationLimits.MAX_THREADS})')
    shared.add_argument('--sampler', type=str, choices=['fast', 'naive'], help='Graph sampler')
    shared.add_argument('--weight-policy', type=str, choices=['fresh', 'pinned'],
                        help='Fresh weights per replica, or one pinned weight vector')
    shared.add_argument('--debug', action='store_true', default=None, help='Enable debug logging')
    return shared


def setup_argument_parser():
    """Set up and return the argument parser for CLI arguments"""
    parser = argparse.ArgumentParser(
        description='Simulate and verify inhomogeneous random graphs with Pareto fitness')
    sub = parser.add_subparsers(dest='command', required=True)
    shared = _shared_options()

    gen = sub.add_parser('generate', parents=[shared], help='Write one graph as an edge list')
    gen.add_argument('--weights-out', type=str, help='Also write the weight vector as CSV')

    sub.add_parser('degree', parents=[shared], help='Mean degree and isolated nodes per replica')
    sub.add_parser('motifs', parents=[shared], help='Wedges and triangles per replica')

    dust = sub.add_parser('dust-scan', parents=[shared], help='Isolated nodes along a (k, n) grid')
    dust.add_argument('--k-grid', type=str, help='Comma separated k values')
    dust.add_argument('--n-grid', type=str, help='Comma separated, increasing n values')

    joint = sub.add_parser('joint', parents=[shared], help='Joint degrees of two labelled nodes')
    joint.add_argument('--joint-nodes', type=str, help='Two 0-based node ids, e.g. 0,1')
    joint.add_argument('--pgf-grid', type=str, help='PGF points as t:s,t:s')

    coarse = sub.add_parser('coarse-grain', parents=[shared], help='Block-merged graph statistics')
    coarse.add_argument('--block-size', type=str, help='Comma separated block sizes dividing n')

    verify = sub.add_parser('verify', parents=[shared], help='Run the acceptance suite')
    verify.add_argument('--level', type=str, choices=['fast', 'full'], help='Suite size')
    verify.add_argument('--criteria', type=str, help='Comma separated criterion ids (default: all)')
    return parser


def _print_parameters(config, command: str):
    scale = config.resolved_scale()
    print(f"🔒 Validated parameters ({command}):")
    print(f"   Nodes: {config.n}")
    print(f"   Alpha: {config.alpha}")
    if scale['eps'] is not None:
        print(f"   Eps: {scale['eps']}")
    else:
        print(f"   Critical scale k: {scale['k_critical']}")
    print(f"   Replicas: {config.replicas}")
    print(f"   Seed: {config.seed}")
    print(f"   Sampler: {config.sampler} ({config.weight_policy} weights)")
    print(f"   Threads: {config.threads}")
    print(f"   Output: {config.out or '(none)'}")
    print(f"   Debug mode: {'✅' if config.debug else '❌'}")


def _summarize(table, column: str, label: str):
    values = table.column(column)
    if values.size:
        print(f"   {label}: mean {values.mean():.6g}, min {values.min():.6g}, max {values.max():.6g}")


def run_generate(config, args) -> int:
    params = ModelParams(n=config.n, alpha=config.alpha, **config.resolved_scale())
    weights = sample_weights(params.n, params.alpha, derive_substream(config.seed, 0, Purpose.WEIGHTS))
    graph = get_sampler(config.sampler)(params, weights, derive_substream(config.seed, 0, Purpose.GRAPH))
    out = config.out or 'graph.edges'
    write_edge_list(graph, out)
    print(f"✅ Wrote {graph.n_edges} edges on {graph.n} nodes to {out}")
    if args.weights_out:
        write_weights(weights, args.weights_out)
        print(f"✅ Wrote weights to {args.weights_out}")
    return EXIT_OK


def run_statistics(config, statistics) -> int:
    spec = EnsembleSpec.from_config(config, statistics=statistics)
    print(f"📋 Running {spec.replicas} replicas: {', '.join(spec.statistics)}")
    table = run_ensemble(spec, threads=config.threads, progress=True)
    print(f"✅ Finished in {table.metadata['wall_clock_seconds']:.2f}s")
    if 'mean_degree' in table.columns:
        _summarize(table, 'mean_degree', 'Mean degree')
        exact = oracles.expected_degree_exact(spec.params.n, spec.params.epsilon, spec.params.alpha.alpha)
        print(f"   Expected mean degree: {exact:.6g}")
    if 'n_isolated' in table.columns:
        _summarize(table, 'n_isolated', 'Isolated nodes')
    if 'wedges_total' in table.columns:
        _summarize(table, 'wedges_total', 'Wedges')
    if 'triangles_total' in table.columns:
        _summarize(table, 'triangles_total', 'Triangles')
        _summarize(table, 'triangle_scaled', '12 triangles / (alpha^3 n^1.5)')
    if spec.output_path:
        print(f"🔒 Table saved to {spec.output_path}")
    return EXIT_OK


def run_dust_scan(config) -> int:
    print(f"📋 Dust scan: k in {list(config.k_grid)}, n in {list(config.n_grid)}")
    table = experiment_dust_scan(config.alpha, config.k_grid, config.n_grid, config.replicas,
                                 master_seed=config.seed, sampler=config.sampler,
                                 threads=config.threads, progress=True, output_path=config.out)
    print(f"   k1* = {table.metadata['k1_star']:.6g}, k2* = {table.metadata['k2_star']:.6g}")
    for row in table.rows:
        print(f"   k={row['k']:<8g} n={row['n']:<8d} P(dust)={row['fraction_dust']:.3f} "
              f"N0={row['mean_isolated']:.3f}±{row['se_isolated']:.3f} oracle={row['oracle_exact']:.3f}")
    for k, info in table.metadata['directions'].items():
        if info['stated_direction_observed'] is False:
            print(f"⚠️ k={k}: dust fraction is {info['fraction_trend']} in n ({info['regime']})")
    print("✅ Dust scan complete")
    return EXIT_OK


def run_joint(config) -> int:
    spec = EnsembleSpec.from_config(config, statistics=('joint-degree',))
    _, pgf, tails = experiment_joint(spec, threads=config.threads, progress=True)
    for row in pgf.rows:
        print(f"   (t, s)=({row['t']}, {row['s']}): joint={row['empirical_joint']:.5f} "
              f"gap={row['gap']:.5f}±{row['gap_se']:.5f} limit gap={row['limit_gap']:.5f}")
    print(f"✅ Joint-degree experiment complete ({len(tails.rows)} tail thresholds)")
    return EXIT_OK


def run_coarse_grain(config) -> int:
    spec = EnsembleSpec.from_config(config, statistics=('degree', 'coarse-grain'))
    table = experiment_coarse_grain(spec, threads=config.threads, progress=True)
    for b in spec.block_sizes:
        _summarize(table, f'cg{b}_mean_degree', f'Block size {b} mean degree')
    print("✅ Coarse-graining complete")
    return EXIT_OK


def run_verify(config, args) -> int:
    criteria = [int(c) for c in args.criteria.split(',')] if args.criteria else None
    print(f"📋 Verify suite ({config.level} level)")
    status, report = experiment_verify(config.level, master_seed=config.seed, criteria=criteria,
                                       threads=config.threads, progress=True, report_path=config.out)
    failed = [c['id'] for c in report['criteria'] if not c['passed']]
    if failed:
        print(f"❌ Failed criteria: {failed}")
    else:
        print(f"✅ All {len(report['criteria'])} criteria passed")
    if config.out:
        print(f"🔒 Report saved to {config.out}")
    return status


def main(argv=None):
    """Main entry point for the application"""
    load_dotenv()

    parser = setup_argument_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.debug else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    debug = bool(args.debug)

    try:
        overrides = {k: v for k, v in vars(args).items() if k not in ('command', 'config', 'criteria', 'weights_out')}
        config = load_config(args.config, overrides=overrides)
        # debug may also come from the config file or the environment
        debug = config.debug
        if debug:
            logging.getLogger().setLevel(logging.DEBUG)
        _print_parameters(config, args.command)

        if args.command == 'generate':
            status = run_generate(config, args)
        elif args.command == 'degree':
            status = run_statistics(config, ('degree',))
        elif args.command == 'motifs':
            status = run_statistics(config, ('degree', 'wedges', 'triangles'))
        elif args.command == 'dust-scan':
            status = run_dust_scan(config)
        elif args.command == 'joint':
            status = run_joint(config)
        elif args.command == 'coarse-grain':
            status = run_coarse_grain(config)
        else:
            status = run_verify(config, args)
    except KeyboardInterrupt:
        print("\nInterrupted. Exiting.")
        sys.exit(EXIT_INVALID)
    except VerificationFailure as e:
        print(f"❌ Verification failed: {e}")
        sys.exit(EXIT_FAILED)
    except (IrgError, OSError, ValueError) as e:
        print(f"❌ {e}")
        if debug:
            import traceback
            traceback.print_exc()
        sys.exit(EXIT_INVALID)
    sys.exit(status)


if __name__ == "__main__":
    main()
