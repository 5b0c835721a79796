import logging
import os
import sys
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Dict, List, Optional, Tuple

from tqdm import tqdm

try:
    # Try relative imports first (when run as module)
    from ..errors import ParameterError
    from ..analysis.motifs import triangles_containing, wedge_counts
    from ..sampling.graphgen import ModelParams, coarse_grain, get_sampler, validate_graph
    from ..sampling.heavytail import sample_weights
    from ..utils.limits import RunMonitor, SimulationLimits
    from ..utils.results_utils import StatTable
    from ..utils.seeding import Purpose, derive_substream
    from ..validation.config import STATISTICS, WEIGHT_POLICIES, RunConfig, parse_statistics
except ImportError:
    # Fall back to absolute imports (when run directly)
    sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

    from errors import ParameterError
    from analysis.motifs import triangles_containing, wedge_counts
    from sampling.graphgen import ModelParams, coarse_grain, get_sampler, validate_graph
    from sampling.heavytail import sample_weights
    from utils.limits import RunMonitor, SimulationLimits
    from utils.results_utils import StatTable
    from utils.seeding import Purpose, derive_substream
    from validation.config import STATISTICS, WEIGHT_POLICIES, RunConfig, parse_statistics

logger = logging.getLogger(__name__)

ARTIFACT_VERSION = "0.1.0"

COLUMN_UNITS = {
    "replica": "id",
    "weight_seed": "hex seed",
    "graph_seed": "hex seed",
    "n_edges": "edges",
    "mean_degree": "edges per node",
    "max_degree": "edges",
    "n_isolated": "nodes",
    "has_dust": "bool",
    "wedges_total": "wedges (C(D,2) convention)",
    "triangles_total": "triangles",
    "triangle_scaled": "12 triangles / (alpha^3 n^1.5)",
    "d1": "edges",
    "d2": "edges",
}


@dataclass(frozen=True)
class EnsembleSpec:
    """Everything needed to regenerate an ensemble bit for bit.

    ``joint_nodes`` are 0-based; the default (0, 1) is the labelled pair
    "nodes 1 and 2". Labels are exchangeable, so fixed labels are as good
    as randomly chosen ones.
    """
    params: ModelParams
    replicas: int = 1
    master_seed: int = 0
    statistics: Tuple[str, ...] = ("degree",)
    joint_nodes: Tuple[int, int] = (0, 1)
    pgf_grid: Tuple[Tuple[float, float], ...] = ((0.5, 0.5),)
    output_path: Optional[str] = None
    sampler: str = "fast"
    weight_policy: str = "fresh"
    block_sizes: Tuple[int, ...] = (2,)
    check_graphs: bool = False

    def __post_init__(self):
        object.__setattr__(self, "replicas", SimulationLimits.validate_replicas(self.replicas))
        object.__setattr__(self, "master_seed", SimulationLimits.validate_seed(self.master_seed))
        object.__setattr__(self, "statistics", parse_statistics(self.statistics))
        get_sampler(self.sampler)
        if self.weight_policy not in WEIGHT_POLICIES:
            raise ParameterError(f"weight_policy must be one of {WEIGHT_POLICIES}")

        nodes = tuple(int(i) for i in self.joint_nodes)
        if len(nodes) != 2 or nodes[0] == nodes[1] or not all(0 <= i < self.params.n for i in nodes):
            raise ParameterError(f"joint_nodes must be two distinct nodes below n={self.params.n}")
        object.__setattr__(self, "joint_nodes", nodes)

        grid = tuple((float(t), float(s)) for t, s in self.pgf_grid)
        if any(not (0.0 < v <= 1.0) for pair in grid for v in pair):
            raise ParameterError("pgf_grid values must lie in (0, 1]")
        object.__setattr__(self, "pgf_grid", grid)

        blocks = tuple(int(b) for b in self.block_sizes)
        if "coarse-grain" in self.statistics:
            bad = [b for b in blocks if b < 1 or self.params.n % b]
            if not blocks or bad:
                raise ParameterError(f"block sizes {bad or blocks} must divide n={self.params.n}")
        object.__setattr__(self, "block_sizes", blocks)

        if self.output_path is not None:
            object.__setattr__(self, "output_path", SimulationLimits.validate_output_path(self.output_path))

    @classmethod
    def from_config(cls, config: RunConfig, **changes) -> "EnsembleSpec":
        scale = config.resolved_scale()
        params = ModelParams(n=config.n, alpha=config.alpha, **scale)
        fields = dict(
            params=params,
            replicas=config.replicas,
            master_seed=config.seed,
            statistics=config.statistics,
            joint_nodes=config.joint_nodes,
            pgf_grid=config.pgf_grid,
            output_path=config.out,
            sampler=config.sampler,
            weight_policy=config.weight_policy,
            block_sizes=config.block_size,
            check_graphs=config.debug,
        )
        fields.update(changes)
        return cls(**fields)

    def describe(self) -> dict:
        return {
            **self.params.describe(),
            "replicas": self.replicas,
            "master_seed": self.master_seed,
            "statistics": list(self.statistics),
            "joint_nodes": list(self.joint_nodes),
            "pgf_grid": [list(p) for p in self.pgf_grid],
            "sampler": self.sampler,
            "weight_policy": self.weight_policy,
            "block_sizes": list(self.block_sizes),
            "artifact_version": ARTIFACT_VERSION,
        }


def ensemble_columns(spec: EnsembleSpec) -> List[str]:
    columns = ["replica", "weight_seed", "graph_seed", "n_edges"]
    stats = spec.statistics
    if "degree" in stats:
        columns += ["mean_degree", "max_degree"]
    if "degree" in stats or "dust" in stats:
        columns.append("n_isolated")
    if "dust" in stats:
        columns.append("has_dust")
    if "wedges" in stats:
        columns.append("wedges_total")
    if "triangles" in stats:
        columns += ["triangles_total", "triangle_scaled"]
    if "joint-degree" in stats:
        columns += ["d1", "d2"]
    if "coarse-grain" in stats:
        for b in spec.block_sizes:
            columns += [f"cg{b}_n", f"cg{b}_edges", f"cg{b}_mean_degree", f"cg{b}_isolated"]
    return columns


def replica_seeds(spec: EnsembleSpec, replica_id: int) -> Tuple[int, int]:
    """(weight seed, graph seed); pinned weights reuse replica 0's weight stream"""
    weight_replica = 0 if spec.weight_policy == "pinned" else replica_id
    return (derive_substream(spec.master_seed, weight_replica, Purpose.WEIGHTS),
            derive_substream(spec.master_seed, replica_id, Purpose.GRAPH))


def _run_replica(task) -> Dict[str, object]:
    """Worker: sample one graph and compute the requested statistics"""
    spec, replica_id = task
    params = spec.params
    weight_seed, graph_seed = replica_seeds(spec, replica_id)
    weights = sample_weights(params.n, params.alpha, weight_seed)
    graph = get_sampler(spec.sampler)(params, weights, graph_seed, replica_id)
    if spec.check_graphs:
        validate_graph(graph)

    stats = spec.statistics
    degrees = graph.degrees()
    row: Dict[str, object] = {
        "replica": int(replica_id),
        "weight_seed": f"{weight_seed:#018x}",
        "graph_seed": f"{graph_seed:#018x}",
        "n_edges": int(graph.n_edges),
    }
    if "degree" in stats:
        row["mean_degree"] = float(degrees.mean())
        row["max_degree"] = int(degrees.max())
    if "degree" in stats or "dust" in stats:
        row["n_isolated"] = int((degrees == 0).sum())
    if "dust" in stats:
        row["has_dust"] = bool(row["n_isolated"] > 0)
    if "wedges" in stats:
        row["wedges_total"] = int(wedge_counts(graph, "definition").sum())
    if "triangles" in stats:
        total = int(triangles_containing(graph).sum()) // 3
        a = params.alpha.alpha
        row["triangles_total"] = total
        row["triangle_scaled"] = 12.0 * total / (a ** 3 * params.n ** 1.5)
    if "joint-degree" in stats:
        i, j = spec.joint_nodes
        row["d1"] = int(degrees[i])
        row["d2"] = int(degrees[j])
    if "coarse-grain" in stats:
        for b in spec.block_sizes:
            coarse, _ = coarse_grain(graph, weights, b)
            cd = coarse.degrees()
            row[f"cg{b}_n"] = int(coarse.n)
            row[f"cg{b}_edges"] = int(coarse.n_edges)
            row[f"cg{b}_mean_degree"] = float(cd.mean())
            row[f"cg{b}_isolated"] = int((cd == 0).sum())
    return row


def run_ensemble(spec: EnsembleSpec, threads: int = 1, progress: bool = False) -> StatTable:
    """Run every replica and collect one row each, ordered by replica id.

    Rows are identical whether replicas run serially or on a worker pool.
    Any replica failure aborts the run; when ``spec.output_path`` is set the
    table is written atomically, so no partial file survives a failure.
    """
    threads = SimulationLimits.validate_threads(threads)
    monitor = RunMonitor()
    monitor.start_timing("ensemble")
    tasks = [(spec, r) for r in range(spec.replicas)]
    rows = []

    with tqdm(total=spec.replicas, desc="Replicas", unit="replica", disable=not progress) as pbar:
        if threads > 1 and spec.replicas > 1:
            chunksize = max(1, spec.replicas // (threads * 8))
            with Pool(processes=threads) as pool:
                for row in pool.imap(_run_replica, tasks, chunksize=chunksize):
                    rows.append(row)
                    monitor.record_replica()
                    pbar.update(1)
                    monitor.check_runtime_limit()
        else:
            for task in tasks:
                rows.append(_run_replica(task))
                monitor.record_replica()
                pbar.update(1)
                monitor.check_runtime_limit()

    rows.sort(key=lambda r: r["replica"])
    elapsed = monitor.end_timing("ensemble")
    columns = ensemble_columns(spec)
    table = StatTable(
        columns=columns,
        rows=rows,
        metadata={**spec.describe(), "wall_clock_seconds": elapsed,
                  "created_at": time.strftime("%Y-%m-%dT%H:%M:%S")},
        units={c: COLUMN_UNITS.get(c, _coarse_unit(c)) for c in columns},
    )
    logger.info("ensemble of %d replicas finished in %.2fs", spec.replicas, elapsed)
    if spec.output_path:
        table.to_csv(spec.output_path)
    return table


def _coarse_unit(column: str) -> str:
    if column.endswith("_mean_degree"):
        return "edges per block"
    if column.endswith("_n") or column.endswith("_isolated"):
        return "blocks"
    return "edges"


__all__ = ["EnsembleSpec", "run_ensemble", "ensemble_columns", "replica_seeds", "STATISTICS"]
