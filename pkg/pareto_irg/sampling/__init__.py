from .heavytail import TailIndex, WeightVector, sample_weights
from .graphgen import GraphSample, ModelParams, coarse_grain, get_sampler, sample_graph, sample_graph_fast

__all__ = [
    "TailIndex",
    "WeightVector",
    "sample_weights",
    "ModelParams",
    "GraphSample",
    "sample_graph",
    "sample_graph_fast",
    "get_sampler",
    "coarse_grain",
]
