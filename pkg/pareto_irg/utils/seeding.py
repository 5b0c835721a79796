"""
Reproducible per-replica seeds.

    derive(master, replica, purpose) =
        splitmix64(splitmix64(master) XOR (purpose << 32 | replica))

splitmix64's finalizer is a bijection on 64-bit words, so for a fixed master
distinct (replica, purpose) pairs with replica < 2^32 always give distinct
seeds. All arithmetic is modulo 2^64, so results are platform independent.
"""

from enum import IntEnum

import numpy as np

from ..errors import ParameterError
from .limits import SimulationLimits

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
MAX_REPLICA = (1 << 32) - 1


class Purpose(IntEnum):
    """What a derived seed is used for"""
    WEIGHTS = 1
    GRAPH = 2
    SCAN = 3  # one master seed per grid point of a parameter scan


def splitmix64(z: int) -> int:
    z = (z + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


def _coerce_purpose(purpose) -> Purpose:
    if isinstance(purpose, str):
        try:
            return Purpose[purpose.upper()]
        except KeyError:
            raise ParameterError(f"unknown seed purpose {purpose!r}")
    return Purpose(purpose)


def derive_substream(master_seed: int, replica_id: int, purpose) -> int:
    """64-bit seed for (master, replica, purpose)"""
    master_seed = SimulationLimits.validate_seed(master_seed)
    if isinstance(replica_id, bool) or int(replica_id) != replica_id or not (0 <= replica_id <= MAX_REPLICA):
        raise ParameterError(f"replica id must be an integer in [0, 2^32), got {replica_id!r}")
    code = int(_coerce_purpose(purpose))
    return splitmix64(splitmix64(master_seed) ^ ((code << 32) | int(replica_id)))


def _splitmix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = z + np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_2)
    return z ^ (z >> np.uint64(31))


def derive_substreams(master_seeds, replica_ids, purpose) -> np.ndarray:
    """Vectorized derive_substream over uint64 arrays (broadcasting)"""
    masters = np.asarray(master_seeds, dtype=np.uint64)
    replicas = np.asarray(replica_ids, dtype=np.uint64)
    if np.any(replicas > np.uint64(MAX_REPLICA)):
        raise ParameterError("replica ids must be below 2^32")
    code = np.uint64(int(_coerce_purpose(purpose)) << 32)
    return _splitmix64_array(_splitmix64_array(masters) ^ (code | replicas))
