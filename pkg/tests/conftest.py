import numpy as np
import pytest

from pareto_irg.sampling.graphgen import GraphSample, ModelParams, sample_graph_fast
from pareto_irg.sampling.heavytail import sample_weights


@pytest.fixture
def critical_params():
    return ModelParams.critical(400, 0.5, 1.0)


@pytest.fixture
def small_graph(critical_params):
    weights = sample_weights(critical_params.n, critical_params.alpha, 11)
    return sample_graph_fast(critical_params, weights, 12)


def graph_from_edges(n, edges, alpha=0.5, eps=0.1):
    params = ModelParams(n=n, alpha=alpha, eps=eps)
    return GraphSample.from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2), params)


@pytest.fixture
def make_graph():
    return graph_from_edges
