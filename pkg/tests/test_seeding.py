import numpy as np
import pytest

from pareto_irg.errors import ParameterError
from pareto_irg.utils.seeding import Purpose, derive_substream, derive_substreams, splitmix64


def test_splitmix64_reference_value():
    # first output of the reference SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_substreams_are_distinct():
    seeds = {derive_substream(42, r, p) for r in range(500) for p in Purpose}
    assert len(seeds) == 500 * len(Purpose)


def test_substream_depends_on_master():
    assert derive_substream(1, 0, Purpose.GRAPH) != derive_substream(2, 0, Purpose.GRAPH)
    assert derive_substream(1, 0, "graph") == derive_substream(1, 0, Purpose.GRAPH)


def test_vectorized_matches_scalar():
    masters = np.array([0, 7, 2**64 - 1], dtype=np.uint64)
    replicas = np.arange(3, dtype=np.uint64)
    vectorized = derive_substreams(masters[:, None], replicas[None, :], Purpose.WEIGHTS)
    for a, m in enumerate(masters):
        for b, r in enumerate(replicas):
            assert int(vectorized[a, b]) == derive_substream(int(m), int(r), Purpose.WEIGHTS)


def test_rejects_bad_inputs():
    with pytest.raises(ParameterError):
        derive_substream(-1, 0, Purpose.GRAPH)
    with pytest.raises(ParameterError):
        derive_substream(1, 2**32, Purpose.GRAPH)
    with pytest.raises(ParameterError):
        derive_substream(1, 0, "colour")
    with pytest.raises(ParameterError):
        derive_substreams([1], [2**32], Purpose.GRAPH)
