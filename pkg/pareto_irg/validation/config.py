"""
Run configuration.

Layers, highest priority first: CLI flags, the ``--config`` file, the
environment (``PARETO_IRG_<KEY>``, optionally seeded from a ``.env``), then
the defaults below. The config file is flat ``key=value`` text read with
python-dotenv; ``#`` starts a comment, keys may use ``-`` or ``_``.

    n=2000
    alpha=0.5
    k_critical=1.0
    statistics=degree,joint-degree
    pgf_grid=0.5:0.5,0.9:0.9
"""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

from ..errors import ParameterError

logger = logging.getLogger(__name__)

ENV_PREFIX = "PARETO_IRG_"

STATISTICS = ("degree", "wedges", "triangles", "dust", "joint-degree", "coarse-grain")
SAMPLER_NAMES = ("fast", "naive")
WEIGHT_POLICIES = ("fresh", "pinned")
VERIFY_LEVELS = ("fast", "full")


def _split(raw: str):
    return [part.strip() for part in str(raw).split(",") if part.strip()]


def parse_float_list(raw) -> Tuple[float, ...]:
    if isinstance(raw, (list, tuple)):
        return tuple(float(x) for x in raw)
    return tuple(float(x) for x in _split(raw))


def parse_int_list(raw) -> Tuple[int, ...]:
    if isinstance(raw, (list, tuple)):
        return tuple(int(x) for x in raw)
    return tuple(int(float(x)) for x in _split(raw))


def parse_pgf_grid(raw) -> Tuple[Tuple[float, float], ...]:
    """'t:s,t:s' -> ((t, s), (t, s))"""
    if isinstance(raw, (list, tuple)):
        return tuple((float(t), float(s)) for t, s in raw)
    grid = []
    for item in _split(raw):
        t, sep, s = item.partition(":")
        if not sep:
            raise ParameterError(f"pgf_grid entries look like t:s, got {item!r}")
        grid.append((float(t), float(s)))
    return tuple(grid)


def parse_statistics(raw) -> Tuple[str, ...]:
    names = tuple(raw) if isinstance(raw, (list, tuple, set, frozenset)) else tuple(_split(raw))
    unknown = [s for s in names if s not in STATISTICS]
    if unknown:
        raise ParameterError(f"unknown statistics {unknown}; choose from {list(STATISTICS)}")
    # canonical order keeps output columns stable
    return tuple(s for s in STATISTICS if s in names)


def _optional_float(raw):
    if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
        return None
    return float(raw)


def _int(raw) -> int:
    return int(float(raw)) if isinstance(raw, str) else int(raw)


def _bool(raw) -> bool:
    if isinstance(raw, bool):
        return raw
    return str(raw).strip().lower() in ("1", "true", "yes", "on")


def _choice(options) -> Callable[[Any], str]:
    def convert(raw):
        value = str(raw).strip()
        if value not in options:
            raise ParameterError(f"expected one of {list(options)}, got {value!r}")
        return value
    return convert


def _optional_str(raw):
    return None if raw is None or str(raw).strip() == "" else str(raw)


@dataclass(frozen=True)
class RunConfig:
    n: int = 2000
    alpha: float = 0.5
    eps: Optional[float] = None
    k_critical: Optional[float] = None
    replicas: int = 100
    seed: int = 20240601
    out: Optional[str] = None
    threads: int = 1
    sampler: str = "fast"
    weight_policy: str = "fresh"
    statistics: Tuple[str, ...] = ("degree",)
    joint_nodes: Tuple[int, ...] = (0, 1)
    pgf_grid: Tuple[Tuple[float, float], ...] = ((0.5, 0.5),)
    block_size: Tuple[int, ...] = (2,)
    k_grid: Tuple[float, ...] = (0.05, 3.0)
    n_grid: Tuple[int, ...] = (500, 2000, 8000)
    level: str = "fast"
    debug: bool = False
    sources: Dict[str, str] = field(default_factory=dict, compare=False)

    def resolved_scale(self) -> Dict[str, Optional[float]]:
        """eps or k_critical, defaulting to the critical scale with k = 1"""
        if self.eps is not None and self.k_critical is not None:
            raise ParameterError("give at most one of eps or k_critical")
        if self.eps is None and self.k_critical is None:
            return {"eps": None, "k_critical": 1.0}
        return {"eps": self.eps, "k_critical": self.k_critical}


CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "n": _int,
    "alpha": float,
    "eps": _optional_float,
    "k_critical": _optional_float,
    "replicas": _int,
    "seed": _int,
    "out": _optional_str,
    "threads": _int,
    "sampler": _choice(SAMPLER_NAMES),
    "weight_policy": _choice(WEIGHT_POLICIES),
    "statistics": parse_statistics,
    "joint_nodes": parse_int_list,
    "pgf_grid": parse_pgf_grid,
    "block_size": parse_int_list,
    "k_grid": parse_float_list,
    "n_grid": parse_int_list,
    "level": _choice(VERIFY_LEVELS),
    "debug": _bool,
}


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def _convert(key: str, raw, source: str):
    try:
        return CONVERTERS[key](raw)
    except ParameterError as e:
        raise ParameterError(f"{key} ({source}): {e}") from None
    except (TypeError, ValueError) as e:
        raise ParameterError(f"{key} ({source}): cannot parse {raw!r}: {e}") from None


def read_config_file(path: str) -> Dict[str, str]:
    if not os.path.isfile(path):
        raise ParameterError(f"config file not found: {path}")
    values = {}
    for key, raw in dotenv_values(path).items():
        name = _normalize_key(key)
        if name not in CONVERTERS:
            raise ParameterError(f"{path}: unknown key {key!r}")
        values[name] = raw
    return values


def read_environment(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
    environ = os.environ if environ is None else environ
    values = {}
    for key, raw in environ.items():
        if key.startswith(ENV_PREFIX):
            name = _normalize_key(key[len(ENV_PREFIX):])
            if name in CONVERTERS:
                values[name] = raw
    return values


def load_config(config_path: Optional[str] = None,
                overrides: Optional[Mapping[str, Any]] = None,
                environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Merge defaults, environment, config file and CLI overrides (None means unset)"""
    layers = [("environment", read_environment(environ))]
    if config_path:
        layers.append((config_path, read_config_file(config_path)))
    cli = {_normalize_key(k): v for k, v in (overrides or {}).items() if v is not None}
    layers.append(("command line", {k: v for k, v in cli.items() if k in CONVERTERS}))

    values: Dict[str, Any] = {}
    sources: Dict[str, str] = {}
    for source, layer in layers:
        for key, raw in layer.items():
            values[key] = _convert(key, raw, source)
            sources[key] = source
    # an explicit eps in a higher layer replaces k_critical from a lower one
    if "eps" in values and "k_critical" in values and sources["eps"] != sources["k_critical"]:
        lower = "k_critical" if _rank(layers, sources["eps"]) > _rank(layers, sources["k_critical"]) else "eps"
        values.pop(lower)
        sources.pop(lower)

    config = replace(RunConfig(), **values, sources=sources)
    logger.debug("config sources: %s", sources)
    return config


def _rank(layers, source: str) -> int:
    return [name for name, _ in layers].index(source)


def config_keys():
    return [f.name for f in fields(RunConfig) if f.name != "sources"]
