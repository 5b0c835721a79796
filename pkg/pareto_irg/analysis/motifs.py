"""
Per-node and global graph statistics.

Triangle values follow the 1/6 double-sum convention: the per-node value is
(triangles containing i) / 3, so the per-node values sum to the number of
distinct triangles. Counts are kept as the integer "triangles containing i"
and divided only when reported.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..errors import ParameterError
from ..sampling.graphgen import GraphSample

logger = logging.getLogger(__name__)

WEDGE_CONVENTIONS = ("definition", "theorem")


@dataclass(frozen=True)
class DegreeRecord:
    degrees: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.degrees.mean()) if self.degrees.size else 0.0

    @property
    def max(self) -> int:
        return int(self.degrees.max()) if self.degrees.size else 0

    def ccdf_support(self) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct degree values d and the empirical P(D >= d)"""
        values, counts = np.unique(self.degrees, return_counts=True)
        tail = np.cumsum(counts[::-1])[::-1] / self.degrees.size
        return values, tail


@dataclass(frozen=True)
class MotifRecord:
    degrees: np.ndarray
    wedges: np.ndarray
    wedge_convention: str
    triangles_containing: np.ndarray
    total_triangles: int
    isolated: int

    @property
    def triangles_per_node(self) -> np.ndarray:
        return self.triangles_containing / 3.0


def degree_sequence(graph: GraphSample) -> DegreeRecord:
    return DegreeRecord(degrees=graph.degrees())


def _wedges_from_degree(d, convention: str):
    if convention == "definition":
        return d * (d - 1) // 2
    if convention == "theorem":
        return d * (d - 1)
    raise ParameterError(f"wedge convention must be one of {WEDGE_CONVENTIONS}")


def wedge_count(graph: GraphSample, i: int, convention: str) -> int:
    """Wedges centred at i: C(D, 2) under ``definition``, D(D-1) under ``theorem``"""
    if not (0 <= i < graph.n):
        raise ParameterError(f"node {i} out of range")
    d = int(graph.indptr[i + 1] - graph.indptr[i])
    return int(_wedges_from_degree(d, convention))


def wedge_counts(graph: GraphSample, convention: str) -> np.ndarray:
    return _wedges_from_degree(graph.degrees(), convention)


def triangles_containing(graph: GraphSample) -> np.ndarray:
    """Number of triangles through each node.

    Forward algorithm: orient each edge from lower to higher (degree, id)
    rank, then for every node u intersect its out-list with the out-lists
    of its out-neighbours. Each triangle is found exactly once.
    """
    n = graph.n
    counts = np.zeros(n, dtype=np.int64)
    if graph.n_edges == 0:
        return counts
    deg = graph.degrees()
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), deg))] = np.arange(n)

    rows = np.repeat(np.arange(n, dtype=np.int64), deg)
    cols = graph.indices
    keep = rank[rows] < rank[cols]
    src, dst = rows[keep], cols[keep]
    out_deg = np.bincount(src, minlength=n)
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(out_deg, out=out_ptr[1:])
    out_idx = dst  # rows already grouped by source in CSR order

    mark = np.zeros(n, dtype=bool)
    for u in np.flatnonzero(out_deg >= 2):
        mine = out_idx[out_ptr[u]:out_ptr[u + 1]]
        lengths = out_deg[mine]
        total = int(lengths.sum())
        if total == 0:
            continue
        owner = np.repeat(np.arange(mine.size), lengths)
        offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        candidates = out_idx[out_ptr[mine][owner] + offsets]
        mark[mine] = True
        hit = mark[candidates]
        mark[mine] = False
        if not hit.any():
            continue
        closing = candidates[hit]
        middle = mine[owner[hit]]
        counts[u] += closing.size
        np.add.at(counts, middle, 1)
        np.add.at(counts, closing, 1)
    return counts


def triangle_counts(graph: GraphSample) -> Tuple[np.ndarray, int]:
    """(per-node value, total distinct triangles)"""
    containing = triangles_containing(graph)
    total = int(containing.sum()) // 3
    return containing / 3.0, total


def isolated_count(graph: GraphSample) -> int:
    return int(np.count_nonzero(graph.degrees() == 0))


def motif_record(graph: GraphSample, convention: str = "definition") -> MotifRecord:
    degrees = graph.degrees()
    containing = triangles_containing(graph)
    return MotifRecord(
        degrees=degrees,
        wedges=_wedges_from_degree(degrees, convention),
        wedge_convention=convention,
        triangles_containing=containing,
        total_triangles=int(containing.sum()) // 3,
        isolated=int(np.count_nonzero(degrees == 0)),
    )


def hill_estimator(sample: Sequence[float], k: int) -> float:
    """Hill tail-index estimate from the k largest order statistics"""
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ParameterError("need a 1-D sample of at least two values")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ParameterError("Hill estimator needs positive finite values")
    k = int(k)
    if not (1 <= k < x.size):
        raise ParameterError(f"k must satisfy 1 <= k < {x.size}")
    x = np.sort(x)[::-1]
    mean_log_excess = float(np.mean(np.log(x[:k] / x[k])))
    if mean_log_excess <= 0.0:
        raise ParameterError("top order statistics are all equal; tail index undefined")
    return 1.0 / mean_log_excess


def _pairs(pairs) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    if arr.shape[0] == 0:
        raise ParameterError("need at least one degree pair")
    return arr[:, 0], arr[:, 1]


def _check_unit(value, name) -> float:
    value = float(value)
    if not (0.0 < value <= 1.0):
        raise ParameterError(f"{name} must lie in (0, 1], got {value}")
    return value


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(values.size))


def empirical_joint_pgf(pairs, t: float, s: float = 1.0) -> Tuple[float, float]:
    """Sample mean of t^{d1} s^{d2} and its standard error"""
    d1, d2 = _pairs(pairs)
    t, s = _check_unit(t, "t"), _check_unit(s, "s")
    return _mean_se(np.power(t, d1) * np.power(s, d2))


def empirical_pgf_gap(pairs, t: float, s: float) -> Tuple[float, float]:
    """Joint PGF minus the product of marginal PGFs, with a delta-method SE"""
    d1, d2 = _pairs(pairs)
    t, s = _check_unit(t, "t"), _check_unit(s, "s")
    x, y = np.power(t, d1), np.power(s, d2)
    mx, my = x.mean(), y.mean()
    gap = float((x * y).mean() - mx * my)
    influence = x * y - my * x - mx * y
    if influence.size < 2:
        return gap, 0.0
    return gap, float(influence.std(ddof=1) / np.sqrt(influence.size))


def degree_histogram(degrees: Iterable[int], max_degree: int) -> np.ndarray:
    """Counts of 0..max_degree-1 followed by one pooled bin for >= max_degree"""
    d = np.asarray(list(degrees) if not isinstance(degrees, np.ndarray) else degrees, dtype=np.int64)
    if max_degree < 1:
        raise ParameterError("max_degree must be at least 1")
    clipped = np.minimum(d, max_degree)
    return np.bincount(clipped, minlength=max_degree + 1)


def total_variation(empirical: Sequence[float], model: Sequence[float]) -> float:
    p = np.asarray(empirical, dtype=np.float64)
    q = np.asarray(model, dtype=np.float64)
    if p.shape != q.shape:
        raise ParameterError("distributions must share a support")
    return 0.5 * float(np.abs(p - q).sum())


def tail_dependence(pairs, thresholds: Sequence[float]) -> List[dict]:
    """Joint and product exceedance frequencies for each threshold x"""
    d1, d2 = _pairs(pairs)
    rows = []
    for x in thresholds:
        a, b = d1 > x, d2 > x
        joint = float(np.mean(a & b))
        product = float(np.mean(a)) * float(np.mean(b))
        rows.append({
            "threshold": float(x),
            "p_first": float(np.mean(a)),
            "p_second": float(np.mean(b)),
            "p_joint": joint,
            "p_product": product,
            "ratio": joint / product if product > 0 else float("nan"),
        })
    return rows
