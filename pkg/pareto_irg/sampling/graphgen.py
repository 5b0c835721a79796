"""
Sampling of G_n(alpha, eps) given a weight vector, plus block coarse-graining.

Pair {i, j} is present with probability 1 - exp(-eps W_i W_j), independently.

Random streams (both ``np.random.Generator(PCG64(graph_seed))``):

* naive sampler: one uniform per pair, row-major over i < j in original
  labels (row i draws ``n - i - 1`` uniforms for j = i+1..n-1). The edge is
  present iff u_ij < p_ij, so raising eps with the same seed only adds edges.
* fast sampler: vertices sorted by descending weight (stable). For each row
  the prefix of pairs with p >= DENSE_THRESHOLD is drawn directly with one
  uniform per pair, row-major in sorted order, in blocks of whole rows of at
  most DENSE_PAIR_BUDGET pairs. The remaining pairs of all rows are walked
  together by geometric skipping under the current (largest remaining)
  probability and accepted with ratio p/p_bar, two uniforms per active row
  per round.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from ..errors import ParameterError
from ..utils.limits import SimulationLimits
from .heavytail import TailIndex, WeightVector

logger = logging.getLogger(__name__)

DENSE_THRESHOLD = 0.1
# pairs drawn per block of the dense prefix; bounds working memory
DENSE_PAIR_BUDGET = 1 << 20


@dataclass(frozen=True)
class ModelParams:
    """(n, alpha, eps), with eps either explicit or k * n^{-1/alpha}"""
    n: int
    alpha: TailIndex
    eps: Optional[float] = None
    k_critical: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "n", SimulationLimits.validate_nodes(self.n))
        if not isinstance(self.alpha, TailIndex):
            object.__setattr__(self, "alpha", TailIndex(self.alpha))
        if (self.eps is None) == (self.k_critical is None):
            raise ParameterError("give exactly one of eps or k_critical")
        if self.eps is not None:
            object.__setattr__(self, "eps", SimulationLimits.validate_positive(self.eps, "eps"))
        else:
            object.__setattr__(self, "k_critical",
                               SimulationLimits.validate_positive(self.k_critical, "k_critical"))

    @classmethod
    def critical(cls, n: int, alpha, k: float = 1.0) -> "ModelParams":
        return cls(n=n, alpha=alpha, k_critical=k)

    @property
    def epsilon(self) -> float:
        """Resolved eps"""
        if self.eps is not None:
            return self.eps
        return self.k_critical * float(self.n) ** (-1.0 / self.alpha.alpha)

    def describe(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha.alpha,
            "eps": self.epsilon,
            "k_critical": self.k_critical,
        }


@dataclass(frozen=True)
class GraphSample:
    """Simple undirected graph in CSR form with sorted neighbour lists"""
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    params: ModelParams
    weight_seed: int = 0
    graph_seed: int = 0
    replica_id: int = 0
    n_edges: int = field(init=False)

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "n_edges", int(indices.size // 2))

    @classmethod
    def from_edges(cls, n: int, edges: np.ndarray, params: ModelParams, **provenance) -> "GraphSample":
        """Build from an (m, 2) array of unordered pairs with i != j and no repeats"""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(n=n, indptr=indptr, indices=cols, params=params, **provenance)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_array(self) -> np.ndarray:
        """(m, 2) array of pairs i < j, sorted"""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    def to_csr(self) -> sparse.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def provenance(self) -> dict:
        return {
            **self.params.describe(),
            "weight_seed": self.weight_seed,
            "graph_seed": self.graph_seed,
            "replica": self.replica_id,
        }


def validate_graph(graph: GraphSample) -> None:
    """Raise ParameterError unless graph is simple, symmetric and canonical"""
    n, indptr, indices = graph.n, graph.indptr, graph.indices
    if indptr.size != n + 1 or indptr[0] != 0 or indptr[-1] != indices.size:
        raise ParameterError("malformed CSR index pointer")
    if np.any(np.diff(indptr) < 0):
        raise ParameterError("index pointer is not non-decreasing")
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        raise ParameterError("neighbour index out of range")
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    if np.any(rows == indices):
        raise ParameterError("self-loop present")
    # strictly increasing inside each row rules out multi-edges too
    same_row = rows[1:] == rows[:-1]
    if np.any(indices[1:][same_row] <= indices[:-1][same_row]):
        raise ParameterError("neighbour lists not strictly increasing")
    if indices.size % 2:
        raise ParameterError("odd adjacency size breaks the handshake identity")
    forward = rows * n + indices
    backward = indices * n + rows
    if not np.array_equal(np.sort(forward), np.sort(backward)):
        raise ParameterError("adjacency is not symmetric")


def connection_prob(w_i, w_j, epsilon):
    """1 - exp(-eps w_i w_j)"""
    eps = SimulationLimits.validate_positive(epsilon, "epsilon")
    wi = np.asarray(w_i, dtype=np.float64)
    wj = np.asarray(w_j, dtype=np.float64)
    if np.any(wi < 1.0) or np.any(wj < 1.0):
        raise ParameterError("weights must be >= 1")
    out = -np.expm1(-eps * wi * wj)
    return float(out) if out.ndim == 0 else out


def _check_inputs(params: ModelParams, weights: WeightVector, graph_seed: int) -> int:
    if weights.n != params.n:
        raise ParameterError(f"weights have n={weights.n}, params have n={params.n}")
    return SimulationLimits.validate_seed(graph_seed)


def sample_graph(params: ModelParams, weights: WeightVector, graph_seed: int,
                 replica_id: int = 0) -> GraphSample:
    """Reference sampler: one uniform per pair in row-major order"""
    graph_seed = _check_inputs(params, weights, graph_seed)
    n, eps, w = params.n, params.epsilon, weights.values
    rng = np.random.Generator(np.random.PCG64(graph_seed))
    heads, tails = [], []
    for i in range(n - 1):
        u = rng.random(n - i - 1)
        p = -np.expm1(-eps * w[i] * w[i + 1:])
        hit = np.flatnonzero(u < p)
        if hit.size:
            heads.append(np.full(hit.size, i, dtype=np.int64))
            tails.append(hit + i + 1)
    edges = _stack(heads, tails)
    logger.debug("naive sampler: n=%d eps=%.3g edges=%d", n, eps, len(edges))
    return GraphSample.from_edges(n, edges, params, weight_seed=weights.seed,
                                  graph_seed=graph_seed, replica_id=replica_id)


def _stack(heads, tails) -> np.ndarray:
    if not heads:
        return np.empty((0, 2), dtype=np.int64)
    return np.column_stack([np.concatenate(heads), np.concatenate(tails)])


def _ragged_arange(starts: np.ndarray, lengths: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Concatenation of arange(s, s + l) for each (s, l), and the owning row"""
    total = int(lengths.sum())
    owner = np.repeat(np.arange(starts.size), lengths)
    offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return starts[owner] + offsets, owner


def sample_graph_fast(params: ModelParams, weights: WeightVector, graph_seed: int,
                      replica_id: int = 0) -> GraphSample:
    """Same law as sample_graph; dense prefixes drawn directly, the rest by skipping"""
    graph_seed = _check_inputs(params, weights, graph_seed)
    n, eps = params.n, params.epsilon
    rng = np.random.Generator(np.random.PCG64(graph_seed))
    order = np.argsort(-weights.values, kind="stable")
    w = weights.values[order]
    heads, tails = [], []

    # Dense prefix of row i: positions i+1 .. m_i-1 where p >= DENSE_THRESHOLD,
    # i.e. w_j >= cutoff / w_i. w is descending so this is a prefix.
    cutoff = -math.log1p(-DENSE_THRESHOLD) / eps
    rows = np.arange(n - 1, dtype=np.int64)
    m = np.searchsorted(-w, -cutoff / w[:-1], side="right")
    m = np.maximum(m, rows + 1)
    lengths = m - rows - 1
    # Whole rows at a time, at most DENSE_PAIR_BUDGET pairs per block unless a
    # single row is longer. Uniforms are drawn in the same order either way.
    ends = np.cumsum(lengths)
    dense_rows = int(np.flatnonzero(lengths)[-1]) + 1 if ends.size and ends[-1] else 0
    start = 0
    while start < dense_rows:
        done = int(ends[start - 1]) if start else 0
        stop = int(np.searchsorted(ends, done + DENSE_PAIR_BUDGET, side="right"))
        stop = min(max(stop, start + 1), dense_rows)
        cols, owner = _ragged_arange(rows[start:stop] + 1, lengths[start:stop])
        src = rows[start:stop][owner]
        u = rng.random(cols.size)
        p = -np.expm1(-eps * w[src] * w[cols])
        hit = u < p
        heads.append(src[hit])
        tails.append(cols[hit])
        start = stop

    # Sparse remainder: all rows advance together, one proposal per round
    u_row = rows[m < n]
    v = m[m < n]
    p_bar = -np.expm1(-eps * w[u_row] * w[v])
    rounds = 0
    while u_row.size:
        rounds += 1
        r = 1.0 - rng.random(u_row.size)  # (0, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            skip = np.floor(np.log(r) / np.log1p(-p_bar))
        skip = np.where(np.isfinite(skip), np.minimum(skip, n), n).astype(np.int64)
        v = v + skip
        alive = v < n
        u_row, v, p_bar = u_row[alive], v[alive], p_bar[alive]
        if not u_row.size:
            break
        q = -np.expm1(-eps * w[u_row] * w[v])
        accept = rng.random(u_row.size) < q / p_bar
        heads.append(u_row[accept])
        tails.append(v[accept])
        p_bar = q
        v = v + 1
        alive = (v < n) & (p_bar > 0.0)
        u_row, v, p_bar = u_row[alive], v[alive], p_bar[alive]

    edges = _stack(heads, tails)
    edges = order[edges] if edges.size else edges
    logger.debug("fast sampler: n=%d eps=%.3g edges=%d skip rounds=%d", n, eps, len(edges), rounds)
    return GraphSample.from_edges(n, edges, params, weight_seed=weights.seed,
                                  graph_seed=graph_seed, replica_id=replica_id)


SAMPLERS = {
    "naive": sample_graph,
    "fast": sample_graph_fast,
}


def get_sampler(name: str):
    try:
        return SAMPLERS[name]
    except KeyError:
        raise ParameterError(f"unknown sampler {name!r}; choose from {sorted(SAMPLERS)}")


def coarse_grain(graph: GraphSample, weights: WeightVector, block_size: int
                 ) -> Tuple[GraphSample, WeightVector]:
    """Merge consecutive blocks of ``block_size`` vertices.

    Block weights are sums; two blocks are adjacent iff some cross pair was.
    eps is carried over unchanged.
    """
    b = int(block_size)
    if b < 1 or graph.n % b:
        raise ParameterError(f"block size {block_size} must divide n={graph.n}")
    if weights.n != graph.n:
        raise ParameterError("weights and graph sizes differ")
    n_blocks = graph.n // b
    edges = graph.edge_array() // b
    edges = edges[edges[:, 0] != edges[:, 1]]
    if edges.size:
        edges = np.unique(np.sort(edges, axis=1), axis=0)
    block_weights = WeightVector(values=weights.values.reshape(n_blocks, b).sum(axis=1),
                                 alpha=weights.alpha, seed=weights.seed)
    params = ModelParams(n=n_blocks, alpha=graph.params.alpha, eps=graph.params.epsilon)
    coarse = GraphSample.from_edges(n_blocks, edges, params, weight_seed=graph.weight_seed,
                                    graph_seed=graph.graph_seed, replica_id=graph.replica_id)
    return coarse, block_weights
