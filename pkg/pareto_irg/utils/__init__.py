from .limits import RunMonitor, SimulationLimits
from .results_utils import (
    StatTable,
    read_edge_list,
    read_weights,
    save_report,
    save_table,
    write_edge_list,
    write_weights,
)
from .seeding import Purpose, derive_substream, derive_substreams

# Define public API for the utils package
__all__ = [
    # Limits and run monitoring
    "SimulationLimits",
    "RunMonitor",

    # Results utilities
    "StatTable",
    "save_table",
    "save_report",
    "write_edge_list",
    "read_edge_list",
    "write_weights",
    "read_weights",

    # Seeding
    "Purpose",
    "derive_substream",
    "derive_substreams",
]
