"""
Acceptance suite.

Each criterion is a function returning a result dict with ``passed``,
the asserted ``metrics`` and ``reported`` diagnostics that are recorded
but not asserted. VERIFY_PLANS holds the sizes per level:

    full  the acceptance sizes
    fast  fewer nodes (replica counts mostly kept, since they set the
          statistical power), aiming for a few minutes on a laptop

Exit status of experiment_verify is 0 when every criterion passes and 2
otherwise.
"""

import json
import logging
import math
import os
import tempfile
import time
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats
from tqdm import tqdm

from ..errors import IrgError, ParameterError, VerificationFailure
from ..sampling.graphgen import ModelParams
from ..sampling.heavytail import product_ccdf, sample_weights
from ..theory import oracles
from ..utils.results_utils import save_report
from ..utils.seeding import Purpose, derive_substream
from ..validation.config import VERIFY_LEVELS
from .ensemble import ARTIFACT_VERSION, EnsembleSpec, run_ensemble
from .experiments import experiment_degree_law, experiment_dust_scan, experiment_joint

logger = logging.getLogger(__name__)

VERIFY_SEED = 20240601
EXIT_OK = 0
EXIT_FAILED = 2

VERIFY_PLANS: Dict[int, Dict[str, dict]] = {
    1: {"full": {"n": 2000, "replicas": 200}, "fast": {"n": 1000, "replicas": 200}},
    2: {"full": {"n_grid": (1000, 10_000, 100_000)}, "fast": {"n_grid": (1000, 10_000, 100_000)}},
    3: {"full": {"n": 10_000, "replicas": 5000}, "fast": {"n": 2000, "replicas": 3000}},
    4: {"full": {"k": 10_000}, "fast": {"k": 10_000}},
    5: {"full": {"n": 2000, "replicas": 2000}, "fast": {"n": 1000, "replicas": 2000}},
    6: {"full": {"grid": (0.2, 0.1, 0.05)}, "fast": {"grid": (0.2, 0.1, 0.05)}},
    7: {"full": {"n_grid": (1000, 4000), "replicas": 100}, "fast": {"n_grid": (1000, 2000), "replicas": 60}},
    8: {"full": {"eps_grid": (1e-3, 1e-5, 1e-7)}, "fast": {"eps_grid": (1e-3, 1e-5, 1e-7)}},
    9: {"full": {"n_grid": (500, 2000, 8000), "replicas": 300},
        "fast": {"n_grid": (250, 1000, 4000), "replicas": 300}},
    10: {"full": {"pairs": 10_000_000}, "fast": {"pairs": 1_000_000}},
    11: {"full": {"n": 500, "replicas": 500}, "fast": {"n": 300, "replicas": 300}},
    12: {"full": {"n": 400, "replicas": 20}, "fast": {"n": 200, "replicas": 10}},
}

ALPHAS = (0.3, 0.5, 0.7)

# quadrature error allowance on top of the eps^{1-alpha} remainder
SECOND_ORDER_FLOOR = 1e-7

DUST_KS = (0.05, 3.0)
DUST_LIMIT_TOLERANCE = 0.05


def _result(passed: bool, metrics: dict, reported: Optional[dict] = None) -> dict:
    return {"passed": bool(passed), "metrics": metrics, "reported": reported or {}}


def _mean_se(values):
    x = np.asarray(values, dtype=np.float64)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _decreasing(values: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def check_mean_degree_exact(plan: dict, seed: int, threads: int) -> dict:
    n = plan["n"]
    spec = EnsembleSpec(params=ModelParams.critical(n, 0.5), replicas=plan["replicas"],
                        master_seed=seed, statistics=("degree",))
    table = run_ensemble(spec, threads=threads)
    mean, se = _mean_se(table.column("mean_degree"))
    exact = oracles.expected_degree_exact(n, spec.params.epsilon, 0.5)
    z = (mean - exact) / se
    return _result(abs(z) <= 3.0, {"mc_mean": mean, "se": se, "oracle": exact, "z": z})


def check_mean_degree_asymptotic(plan: dict, seed: int, threads: int) -> dict:
    """First-order band for alpha 0.3 and 0.5, monotone approach for all alpha.

    The second-order error at each n must stay within twice the eps^{1-alpha}
    remainder (order 3 minus order 2) plus the quadrature floor.
    """
    rows, passed = [], True
    for a in ALPHAS:
        first, second, remainder = [], [], []
        for n in plan["n_grid"]:
            eps = float(n) ** (-1.0 / a)
            exact = oracles.expected_degree_exact(n, eps, a)
            order2 = oracles.expected_degree_asymptotic(n, eps, a, order=2)
            first.append(exact / oracles.expected_degree_asymptotic(n, eps, a, order=1))
            second.append(exact / order2)
            remainder.append(oracles.expected_degree_asymptotic(n, eps, a, order=3) / order2 - 1.0)
        monotone = _decreasing([abs(r - 1.0) for r in first])
        in_band = 0.9 <= first[-1] <= 1.1
        second_ok = all(abs(s - 1.0) <= 2.0 * r + SECOND_ORDER_FLOOR
                        for s, r in zip(second, remainder))
        passed &= monotone and second_ok and (in_band or a == 0.7)
        rows.append({"alpha": a, "first_order_ratios": first, "second_order_ratios": second,
                     "remainder_estimates": remainder, "monotone": monotone, "in_band": in_band,
                     "second_order_ok": second_ok})
    return _result(passed, {"rows": rows},
                   {"first_order_band_all_alpha": all(r["in_band"] for r in rows)})


def check_degree_law(plan: dict, seed: int, threads: int) -> dict:
    spec = EnsembleSpec(params=ModelParams.critical(plan["n"], 0.5), replicas=plan["replicas"],
                        master_seed=seed, statistics=("joint-degree",))
    table = experiment_degree_law(spec, threads=threads)
    tv = table.metadata["total_variation"]
    return _result(tv <= 0.05, {"total_variation": tv, "bins": table.metadata["max_degree"]})


def check_degree_tail(plan: dict, seed: int, threads: int) -> dict:
    rows, passed = [], True
    ks = [10, 100, 1000, plan["k"]]
    for a in ALPHAS:
        c = oracles.mixing_constant(a)
        scaled = [k * oracles.mixed_poisson_ccdf(k, a) for k in ks]
        rel = abs(scaled[-1] / c - 1.0)
        monotone = _decreasing(scaled)
        passed &= rel <= 0.01 and monotone
        rows.append({"alpha": a, "k": ks, "k_ccdf": scaled, "c": c, "relative_error": rel,
                     "monotone_from_above": monotone})
    return _result(passed, {"rows": rows})


def check_joint_dependence(plan: dict, seed: int, threads: int) -> dict:
    spec = EnsembleSpec(params=ModelParams.critical(plan["n"], 0.5), replicas=plan["replicas"],
                        master_seed=seed, statistics=("joint-degree",), pgf_grid=((0.5, 0.5),))
    _, pgf, _ = experiment_joint(spec, threads=threads)
    row = pgf.rows[0]
    limit_z = (row["empirical_joint"] - row["limit_joint"]) / row["joint_se"]
    passed = abs(row["gap_z"]) > 3.0 and abs(limit_z) <= 3.0
    return _result(passed, {"gap": row["gap"], "gap_se": row["gap_se"], "gap_z": row["gap_z"],
                            "empirical_joint": row["empirical_joint"],
                            "limit_joint": row["limit_joint"], "limit_z": limit_z},
                   {"limit_gap": row["limit_gap"]})


def check_vanishing_gap(plan: dict, seed: int, threads: int) -> dict:
    grid = list(plan["grid"])
    gaps = {}
    for eta in grid:
        for gam in grid:
            gap = abs(oracles.joint_pgf_gap(1.0 - eta, 1.0 - gam, 0.5))
            bound = oracles.joint_pgf_gap_bound(eta, gam, 0.5)
            gaps[(eta, gam)] = (gap, bound)
    below = all(g <= b for g, b in gaps.values())
    rows_ok = all(_decreasing([gaps[(e, g)][0] for e in grid]) for g in grid)
    cols_ok = all(_decreasing([gaps[(e, g)][0] for g in grid]) for e in grid)
    table = [{"eta": e, "gamma": g, "gap": v[0], "bound": v[1]} for (e, g), v in gaps.items()]
    return _result(below and rows_ok and cols_ok,
                   {"below_bound": below, "monotone": rows_ok and cols_ok, "grid": table})


def check_triangles(plan: dict, seed: int, threads: int) -> dict:
    a = 0.5
    limit = oracles.triangle_limit_constant(a)
    rows = []
    for index, n in enumerate(plan["n_grid"]):
        spec = EnsembleSpec(params=ModelParams.critical(n, a), replicas=plan["replicas"],
                            master_seed=derive_substream(seed, index, Purpose.SCAN),
                            statistics=("triangles",))
        scaled = run_ensemble(spec, threads=threads).column("triangle_scaled")
        mean, se = _mean_se(scaled)
        per_node = oracles.expected_triangles(n, spec.params.epsilon, a, "true-domain")
        oracle = 12.0 * n * per_node / (a ** 3 * n ** 1.5)
        rows.append({"n": n, "mean": mean, "se": se, "relative_sd": float(np.std(scaled, ddof=1) / mean),
                     "oracle_true_domain": oracle, "z": (mean - oracle) / se,
                     "relative_to_limit": abs(mean / limit - 1.0)})
    first_ok = rows[0]["relative_to_limit"] <= 0.25
    oracle_ok = all(abs(r["z"]) <= 3.0 for r in rows)
    reported = {
        "limit": limit,
        "closer_at_larger_n": rows[-1]["relative_to_limit"] < rows[0]["relative_to_limit"],
        "relative_sd_decreasing": rows[-1]["relative_sd"] < rows[0]["relative_sd"],
    }
    return _result(first_ok and oracle_ok, {"rows": rows, "within_25pct": first_ok}, reported)


def check_wedge_triangle_triangulation(plan: dict, seed: int, threads: int) -> dict:
    a = 0.5
    wedge_true_const = oracles.wedge_limit_constant(a, "true")
    wedge_fact_const = oracles.wedge_limit_constant(a, "factorized")
    tri_const = a ** 3 / 2.0 * oracles.triangle_limit_constant(a)
    rows = []
    for eps in plan["eps_grid"]:
        wedge = oracles.wedge_pair_probability(eps, a)
        tri = oracles.triangle_probability(eps, a)
        fact_wedge = oracles.expected_wedges(3, eps, a, "exact-factorized")
        fact_tri = oracles.expected_triangles(3, eps, a, "exact-factorized") * 3.0
        rows.append({
            "eps": eps,
            "wedge_scaling": wedge / (wedge_true_const * eps ** a),
            "triangle_asymptotic_ratio": tri / (tri_const * eps ** (1.5 * a)),
            "wedge_factorized_vs_true": fact_wedge / wedge - 1.0,
            "triangle_factorized_vs_true": fact_tri / tri - 1.0,
        })
    tri_err = [abs(r["triangle_asymptotic_ratio"] - 1.0) for r in rows]
    wedge_err = [abs(r["wedge_scaling"] - 1.0) for r in rows]
    passed = (_decreasing(tri_err) and tri_err[-1] <= 0.1
              and _decreasing(wedge_err) and wedge_err[-1] <= 0.1)
    return _result(passed, {"triangle_error": tri_err, "wedge_scaling_error": wedge_err},
                   {"rows": rows, "wedge_constant_true": wedge_true_const,
                    "wedge_constant_factorized": wedge_fact_const})


def check_dust(plan: dict, seed: int, threads: int) -> dict:
    """Mean N0 against the exact oracle at every grid point, and the exact
    oracle against the critical-scale isolated fraction at the largest n.

    The share of replicas with dust is reported, not asserted. A vertex of
    weight ~n^{1/alpha} turns up with probability bounded away from 0 and
    reaches almost every other vertex, so P(N0 = 0) decays only like
    (k / log n)^{1/2} and the share does not trend at these sizes.
    """
    table = experiment_dust_scan(0.5, DUST_KS, plan["n_grid"], plan["replicas"],
                                 master_seed=seed, threads=threads)
    z = [r["z_exact"] for r in table.rows]
    oracle_ok = all(math.isfinite(v) and abs(v) <= 3.0 for v in z)

    n_max = max(plan["n_grid"])
    limits = []
    for r in table.rows:
        if r["n"] == n_max:
            fraction = r["oracle_exact"] / n_max
            limits.append({"k": r["k"], "n": n_max, "exact_fraction": fraction,
                           "limit_fraction": r["limit_isolated_fraction"],
                           "relative_error": abs(fraction / r["limit_isolated_fraction"] - 1.0)})
    limit_ok = all(row["relative_error"] <= DUST_LIMIT_TOLERANCE for row in limits)

    shares = {repr(k): [r["fraction_dust"] for r in table.rows if r["k"] == k] for k in DUST_KS}
    return _result(oracle_ok and limit_ok, {"z_exact": z, "limit_agreement": limits},
                   {"fraction_with_dust": shares,
                    "directions": table.metadata["directions"],
                    "k1_star": table.metadata["k1_star"], "k2_star": table.metadata["k2_star"],
                    "rows": table.rows})


def check_product_tail(plan: dict, seed: int, threads: int) -> dict:
    pairs = plan["pairs"]
    w = sample_weights(2 * pairs, 0.5, derive_substream(seed, 0, Purpose.WEIGHTS)).values
    prod = w[:pairs] * w[pairs:]
    rows, passed = [], True
    for x in (10.0, 100.0, 1e4):
        p = product_ccdf(x, 0.5)
        est = float(np.mean(prod > x))
        se = math.sqrt(p * (1.0 - p) / pairs)
        z = (est - p) / se
        passed &= abs(z) <= 3.0
        rows.append({"x": x, "estimate": est, "exact": p, "z": z})
    return _result(passed, {"rows": rows})


def check_sampler_equivalence(plan: dict, seed: int, threads: int) -> dict:
    params = ModelParams.critical(plan["n"], 0.5)
    tables = {}
    for index, sampler in enumerate(("fast", "naive")):
        spec = EnsembleSpec(params=params, replicas=plan["replicas"],
                            master_seed=derive_substream(seed, index, Purpose.SCAN),
                            statistics=("joint-degree",), sampler=sampler)
        tables[sampler] = run_ensemble(spec, threads=threads)
    ks = stats.ks_2samp(tables["fast"].column("d1"), tables["naive"].column("d1"))
    m1, s1 = _mean_se(tables["fast"].column("n_edges"))
    m2, s2 = _mean_se(tables["naive"].column("n_edges"))
    edge_z = (m1 - m2) / math.hypot(s1, s2)
    passed = ks.pvalue >= 0.01 and abs(edge_z) <= 3.0
    return _result(passed, {"ks_statistic": float(ks.statistic), "ks_pvalue": float(ks.pvalue),
                            "edge_mean_z": edge_z})


def check_determinism(plan: dict, seed: int, threads: int) -> dict:
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for run, workers in enumerate((1, max(2, threads), 1)):
            path = os.path.join(tmp, f"run{run}.csv")
            spec = EnsembleSpec(params=ModelParams.critical(plan["n"], 0.5), replicas=plan["replicas"],
                                master_seed=seed, output_path=path,
                                statistics=("degree", "triangles", "dust", "joint-degree"))
            run_ensemble(spec, threads=workers)
            paths.append(path)
        for path in paths:
            with open(path, "rb") as f:
                digests.append(f.read())
    identical = all(d == digests[0] for d in digests)
    return _result(identical, {"runs": len(digests), "identical": identical,
                               "bytes": len(digests[0])})


CRITERIA: Dict[int, tuple] = {
    1: ("mean degree matches the exact oracle", check_mean_degree_exact),
    2: ("mean degree approaches c alpha eps^alpha log(1/eps)", check_mean_degree_asymptotic),
    3: ("single-node degree law is mixed Poisson", check_degree_law),
    4: ("mixed Poisson tail k P(D >= k) -> c", check_degree_tail),
    5: ("degrees of a fixed pair are dependent", check_joint_dependence),
    6: ("joint PGF gap vanishes below its bound", check_vanishing_gap),
    7: ("triangle count scaling", check_triangles),
    8: ("wedge and triangle oracles triangulated", check_wedge_triangle_triangulation),
    9: ("dust scan", check_dust),
    10: ("product tail closed form", check_product_tail),
    11: ("fast and naive samplers agree", check_sampler_equivalence),
    12: ("reruns are byte identical", check_determinism),
}


def experiment_verify(level: str = "fast", master_seed: int = VERIFY_SEED,
                      criteria: Optional[Sequence[int]] = None, threads: int = 1,
                      progress: bool = False, report_path: Optional[str] = None,
                      strict: bool = False):
    """Run the acceptance criteria; return (exit status, report dict).

    With ``strict`` a failing suite raises VerificationFailure after the
    report has been written.
    """
    if level not in VERIFY_LEVELS:
        raise ParameterError(f"level must be one of {VERIFY_LEVELS}")
    selected = sorted(CRITERIA) if criteria is None else sorted(set(int(c) for c in criteria))
    unknown = [c for c in selected if c not in CRITERIA]
    if unknown:
        raise ParameterError(f"unknown criteria {unknown}")

    started = time.time()
    results: List[dict] = []
    with tqdm(selected, desc="Verify", unit="criterion", disable=not progress) as pbar:
        for cid in pbar:
            name, check = CRITERIA[cid]
            plan = VERIFY_PLANS[cid][level]
            seed = derive_substream(master_seed, cid, Purpose.SCAN)
            t0 = time.time()
            try:
                result = check(plan, seed, threads)
                error = None
            except IrgError as e:
                logger.warning("criterion %d raised %s", cid, e)
                result, error = _result(False, {}), f"{type(e).__name__}: {e}"
            entry = {"id": cid, "name": name, "plan": plan, "seconds": time.time() - t0, **result}
            if error:
                entry["error"] = error
            results.append(entry)
            status = "✅" if entry["passed"] else "❌"
            pbar.write(f"  {status} [{cid}] {name} ({entry['seconds']:.1f}s)")

    passed = all(r["passed"] for r in results)
    report = {
        "artifact_version": ARTIFACT_VERSION,
        "level": level,
        "master_seed": master_seed,
        "passed": passed,
        "criteria": results,
        "wall_clock_seconds": time.time() - started,
    }
    report = json.loads(json.dumps(report, default=_plain))
    if report_path:
        save_report(report, report_path)
    if strict and not passed:
        failed = [r["id"] for r in results if not r["passed"]]
        raise VerificationFailure(f"criteria {failed} failed")
    return (EXIT_OK if passed else EXIT_FAILED), report


def _plain(value):
    if isinstance(value, (np.generic,)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def load_schema() -> dict:
    path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                        "schemas", "verify_report.schema.json")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
