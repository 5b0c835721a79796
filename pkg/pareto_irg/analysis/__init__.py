from .motifs import (
    degree_sequence,
    empirical_joint_pgf,
    hill_estimator,
    motif_record,
    triangle_counts,
    wedge_count,
)

__all__ = [
    "degree_sequence",
    "wedge_count",
    "triangle_counts",
    "motif_record",
    "hill_estimator",
    "empirical_joint_pgf",
]
