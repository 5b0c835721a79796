import logging
import math
import time
from pathlib import Path
from typing import Optional

from ..errors import IrgError, ParameterError

logger = logging.getLogger(__name__)


class SimulationLimits:
    """Parameter validation and resource limits for pareto_irg.

    Every validator rejects bad input with ParameterError instead of
    clamping it: a silently altered n, alpha or epsilon would bias every
    statistic computed downstream.
    """

    # Model constraints
    MIN_ALPHA = 0.0  # exclusive
    MAX_ALPHA = 1.0  # exclusive

    # Resource limits
    MAX_NODES = 10_000_000
    MAX_REPLICAS = 1_000_000
    MAX_THREADS = 256
    MAX_EXECUTION_TIME_HOURS = 12
    MAX_SEED = 2**64 - 1

    # File system constraints
    DANGEROUS_PREFIXES = ['/etc', '/var', '/usr', '/bin', '/sbin', '/sys', '/proc',
                          'C:\\Windows', 'C:\\Program Files']

    @classmethod
    def validate_alpha(cls, alpha: float) -> float:
        """Tail index must lie strictly inside (0, 1)"""
        try:
            alpha = float(alpha)
        except (TypeError, ValueError):
            raise ParameterError(f"alpha must be a real number, got {alpha!r}")
        if not (cls.MIN_ALPHA < alpha < cls.MAX_ALPHA):
            raise ParameterError(f"alpha must lie strictly inside (0, 1), got {alpha}")
        return alpha

    @classmethod
    def validate_nodes(cls, n: int) -> int:
        """Node count must be a positive integer below MAX_NODES"""
        if isinstance(n, bool) or int(n) != n:
            raise ParameterError(f"n must be an integer, got {n!r}")
        n = int(n)
        if n < 1:
            raise ParameterError(f"n must be at least 1, got {n}")
        if n > cls.MAX_NODES:
            raise ParameterError(f"n={n} exceeds the limit of {cls.MAX_NODES} nodes")
        return n

    @classmethod
    def validate_replicas(cls, replicas: int) -> int:
        if isinstance(replicas, bool) or int(replicas) != replicas or replicas < 1:
            raise ParameterError(f"replicas must be a positive integer, got {replicas!r}")
        if replicas > cls.MAX_REPLICAS:
            raise ParameterError(f"replicas={replicas} exceeds the limit of {cls.MAX_REPLICAS}")
        return int(replicas)

    @classmethod
    def validate_threads(cls, threads: Optional[int]) -> int:
        """None or 0 means serial execution"""
        if threads is None:
            return 1
        if int(threads) != threads or threads < 0:
            raise ParameterError(f"threads must be a non-negative integer, got {threads!r}")
        if threads > cls.MAX_THREADS:
            raise ParameterError(f"threads={threads} exceeds the limit of {cls.MAX_THREADS}")
        return max(1, int(threads))

    @classmethod
    def validate_seed(cls, seed: int) -> int:
        """Seeds are unsigned 64-bit integers"""
        if isinstance(seed, bool) or int(seed) != seed:
            raise ParameterError(f"seed must be an integer, got {seed!r}")
        seed = int(seed)
        if not (0 <= seed <= cls.MAX_SEED):
            raise ParameterError(f"seed must fit in 64 unsigned bits, got {seed}")
        return seed

    @classmethod
    def validate_positive(cls, value: float, name: str) -> float:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ParameterError(f"{name} must be a real number, got {value!r}")
        if not math.isfinite(value) or value <= 0:
            raise ParameterError(f"{name} must be a positive finite number, got {value}")
        return value

    @staticmethod
    def _inside(path: Path, prefix: str) -> bool:
        """Whole-component containment, so '/var' does not cover '/variant'"""
        base = Path(prefix)
        return path.is_relative_to(base) or path.is_relative_to(base.resolve())

    @classmethod
    def validate_output_path(cls, output_path: str) -> str:
        """Resolve an output path and refuse system directories"""
        resolved_path = Path(output_path).expanduser().resolve()
        path_str = str(resolved_path)
        if any(cls._inside(resolved_path, prefix) for prefix in cls.DANGEROUS_PREFIXES):
            raise ParameterError(f"Output path targets a system directory: {path_str}")
        if resolved_path.exists() and resolved_path.is_dir():
            raise ParameterError(f"Output path is a directory, expected a file: {path_str}")
        return path_str


class RunMonitor:
    """Track wall-clock time of a run and of its named stages"""

    def __init__(self, max_hours: Optional[float] = None):
        self.start_time = time.time()
        self.replica_count = 0
        self.max_hours = max_hours or SimulationLimits.MAX_EXECUTION_TIME_HOURS
        self.stage_timings = {}  # Open stages
        self.completed = {}  # Stage name -> elapsed seconds

    def record_replica(self):
        self.replica_count += 1

    def check_runtime_limit(self):
        """Raise once the run exceeds its maximum runtime"""
        runtime_hours = (time.time() - self.start_time) / 3600
        if runtime_hours > self.max_hours:
            raise IrgError(f"Runtime limit of {self.max_hours}h exceeded")

    def start_timing(self, stage: str):
        self.stage_timings[stage] = time.time()

    def end_timing(self, stage: str) -> float:
        """End timing a stage and return elapsed seconds"""
        if stage in self.stage_timings:
            elapsed = time.time() - self.stage_timings.pop(stage)
            self.completed[stage] = elapsed
            logger.debug("stage %s took %.3fs", stage, elapsed)
            return elapsed
        return 0.0

    def elapsed(self) -> float:
        return time.time() - self.start_time
