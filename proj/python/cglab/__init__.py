"""Corner growth laboratory.

Exponential last-passage percolation grown from a two-sided staircase, the
coupled exclusion process, limit-shape formulas, and a seeded experiment
runner. Heavy lifting happens in the compiled core; this package adds a
keyword-friendly entry point.
"""

from ._core import *  # noqa: F401,F403
from ._core import (
    Experiment,
    ExperimentConfig,
    run_experiment,
)

__version__ = "0.1.0"


def run(experiment, **kwargs):
    """Run one experiment by name and return its report.

    ``run("coupling", n=60, replicas=20, seed=7, out="rows.csv")`` mirrors
    the ``cglab`` command line. Accepted keywords are the fields of
    :class:`ExperimentConfig`: ``lam``, ``rho``, ``n``, ``t``, ``replicas``,
    ``seed``, ``threads``, ``out``, ``format``, ``resume``.
    """
    config = ExperimentConfig()
    config.experiment = (
        experiment
        if isinstance(experiment, Experiment)
        else getattr(Experiment, str(experiment))
    )
    for key, value in kwargs.items():
        if not hasattr(config, key):
            raise TypeError(f"run() got an unexpected keyword {key!r}")
        setattr(config, key, value)
    return run_experiment(config)
