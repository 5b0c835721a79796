import json
import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from ..errors import ParameterError
from .limits import SimulationLimits

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
CSV_META_PREFIX = "# metadata "
CSV_UNITS_PREFIX = "# units "
# Metadata that legitimately differs between identical runs
VOLATILE_METADATA = ("wall_clock_seconds", "created_at")


def _jsonable(value):
    """json.dump default hook for numpy scalars and arrays"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _normalized(metadata: dict, drop_volatile: bool) -> dict:
    stable = {k: v for k, v in metadata.items() if not (drop_volatile and k in VOLATILE_METADATA)}
    return json.loads(json.dumps(stable, default=_jsonable, sort_keys=True))


@contextmanager
def atomic_output(path: str, mode: str = "w"):
    """Write to a temporary sibling and move it into place on success.

    On any exception the temporary file is removed, so a failed run never
    leaves a partial data file behind.
    """
    path = SimulationLimits.validate_output_path(path)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp_path = f"{path}.partial"
    try:
        with open(tmp_path, mode, encoding="utf-8", newline="") as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


@dataclass
class StatTable:
    """Named columns, one dict per row, plus metadata to regenerate the table"""
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    units: Dict[str, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def append(self, row: Dict[str, Any]):
        missing = [c for c in self.columns if c not in row]
        if missing:
            raise ParameterError(f"row is missing columns {missing}")
        self.rows.append({c: row[c] for c in self.columns})

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, metadata=None, units=None) -> "StatTable":
        rows = [{k: (v.item() if isinstance(v, np.generic) else v) for k, v in rec.items()}
                for rec in frame.to_dict("records")]
        return cls(columns=list(frame.columns), rows=rows,
                   metadata=dict(metadata or {}), units=dict(units or {}))

    def column(self, name: str) -> np.ndarray:
        return np.asarray([row[name] for row in self.rows])

    def equals(self, other: "StatTable", ignore_volatile: bool = True) -> bool:
        if self.columns != other.columns or self.units != other.units:
            return False
        if _normalized(self.metadata, ignore_volatile) != _normalized(other.metadata, ignore_volatile):
            return False
        return self.to_frame().equals(other.to_frame())

    # CSV: two comment lines of JSON, then RFC 4180 data with 17 significant digits
    def to_csv(self, path: str) -> str:
        meta = json.dumps(_normalized(self.metadata, True), sort_keys=True)
        units = json.dumps(self.units, sort_keys=True)
        with atomic_output(path) as f:
            f.write(f"{CSV_META_PREFIX}{meta}\n")
            f.write(f"{CSV_UNITS_PREFIX}{units}\n")
            self.to_frame().to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.debug("wrote %d rows to %s", len(self.rows), path)
        return path

    @classmethod
    def from_csv(cls, path: str) -> "StatTable":
        metadata, units = {}, {}
        with open(path, "r", encoding="utf-8", newline="") as f:
            for _ in range(2):
                pos = f.tell()
                line = f.readline()
                if line.startswith(CSV_META_PREFIX):
                    metadata = json.loads(line[len(CSV_META_PREFIX):])
                elif line.startswith(CSV_UNITS_PREFIX):
                    units = json.loads(line[len(CSV_UNITS_PREFIX):])
                else:
                    f.seek(pos)
                    break
            frame = pd.read_csv(f, float_precision="round_trip")
        return cls.from_frame(frame, metadata, units)

    def to_json(self, path: str) -> str:
        payload = {
            "columns": self.columns,
            "units": self.units,
            "metadata": self.metadata,
            "rows": self.rows,
        }
        with atomic_output(path) as f:
            json.dump(payload, f, indent=2, default=_jsonable)
            f.write("\n")
        return path

    @classmethod
    def from_json(cls, path: str) -> "StatTable":
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        return cls(columns=payload["columns"], rows=payload["rows"],
                   metadata=payload.get("metadata", {}), units=payload.get("units", {}))


def save_table(table: StatTable, path: str) -> str:
    """Write a table as JSON when the path ends in .json, CSV otherwise"""
    if path.lower().endswith(".json"):
        return table.to_json(path)
    return table.to_csv(path)


def save_report(report: dict, path: str) -> str:
    with atomic_output(path) as f:
        json.dump(report, f, indent=2, sort_keys=True, default=_jsonable)
        f.write("\n")
    return path


def write_edge_list(graph, path: str) -> str:
    """'# n=.. alpha=.. eps=.. weight_seed=.. graph_seed=.. replica=..' then 'i j' per line"""
    p = graph.params
    header = (f"# n={graph.n} alpha={p.alpha.alpha!r} eps={p.epsilon!r} "
              f"weight_seed={graph.weight_seed} graph_seed={graph.graph_seed} replica={graph.replica_id}")
    edges = graph.edge_array()
    with atomic_output(path) as f:
        f.write(header + "\n")
        for i, j in edges:
            f.write(f"{i} {j}\n")
    return path


def read_edge_list(path: str) -> Tuple[Dict[str, Any], np.ndarray]:
    """Return (header fields, (m, 2) edge array)"""
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
    if not first.startswith("#"):
        raise ParameterError(f"{path}: missing edge-list header")
    header = {}
    for token in first[1:].split():
        key, _, value = token.partition("=")
        header[key] = float(value) if key in ("alpha", "eps") else int(value)
    try:
        frame = pd.read_csv(path, sep=" ", comment="#", header=None, names=["i", "j"], dtype=np.int64)
    except pd.errors.EmptyDataError:
        return header, np.empty((0, 2), dtype=np.int64)
    return header, frame.to_numpy(dtype=np.int64).reshape(-1, 2)


def write_weights(weights, path: str) -> str:
    frame = pd.DataFrame({"index": np.arange(weights.n), "weight": weights.values})
    with atomic_output(path) as f:
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_weights(path: str) -> np.ndarray:
    frame = pd.read_csv(path, float_precision="round_trip")
    return frame.sort_values("index")["weight"].to_numpy(dtype=np.float64)
