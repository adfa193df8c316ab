"""Newton basins, rough partitions and Bayesian/inverse-Bayesian inference."""

from ._bibfractal import *  # noqa: F401,F403
from ._bibfractal import BibError, __version__  # noqa: F401
