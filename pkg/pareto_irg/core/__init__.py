import os
import sys

try:
    # Try relative imports first (when run as module)
    from .ensemble import EnsembleSpec, run_ensemble
    from .experiments import (
        experiment_coarse_grain,
        experiment_degree_law,
        experiment_dust_scan,
        experiment_joint,
    )
    from .verify import VERIFY_PLANS, experiment_verify
except ImportError:
    # Fall back for direct execution from the package directory
    parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)

    from core.ensemble import EnsembleSpec, run_ensemble
    from core.experiments import (
        experiment_coarse_grain,
        experiment_degree_law,
        experiment_dust_scan,
        experiment_joint,
    )
    from core.verify import VERIFY_PLANS, experiment_verify

__all__ = [
    "EnsembleSpec",
    "run_ensemble",
    "experiment_dust_scan",
    "experiment_joint",
    "experiment_coarse_grain",
    "experiment_degree_law",
    "experiment_verify",
    "VERIFY_PLANS",
]
