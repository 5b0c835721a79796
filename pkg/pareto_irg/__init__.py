"""
pareto-irg - Simulate and verify inhomogeneous random graphs whose vertex
fitnesses are Pareto distributed with infinite mean.

Pairs {i, j} connect independently with probability 1 - exp(-eps W_i W_j).
The package samples such graphs, measures degree, wedge, triangle and
isolated-node statistics over reproducible ensembles, and checks them
against quadrature oracles for the model's finite-n and limiting behaviour.
"""

# Version information
__version__ = "0.1.0"
__author__ = "soundwanders"

# Define exports
__all__ = [
    "EnsembleSpec",    # Ensemble description
    "run_ensemble",    # Replica runner
    "main",            # Main function
    "__version__",     # Version info
    "run_simulator",   # CLI runner function
]


def __getattr__(name):
    """
    Lazy attribute access (PEP 562).

    Importing .main eagerly here would make `python -m pareto_irg.main`
    import the module twice (once via this __init__, once as __main__).
    """
    if name in ("EnsembleSpec", "run_ensemble"):
        from .core import ensemble
        return getattr(ensemble, name)
    if name == "main":
        from .main import main
        return main
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def run_simulator():
    """Run pareto-irg from the command line."""
    from .main import main
    main()
