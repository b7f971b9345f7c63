"""Sparse contextual bandits under covariates missing at random.

The heavy lifting lives in the compiled extension; this package re-exports
its surface: the missingness-adjusted moment estimators, the projected
gradient lasso solver, the bandit policies, the synthetic environment, and
the expression-data statistics.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
