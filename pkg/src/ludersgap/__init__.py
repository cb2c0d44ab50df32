"""Sequential measurements on a qutrit under the Lüders and von Neumann rules.

Leggett-Garg and noncontextuality combinations are computed by direct
density-matrix simulation, with closed-form references, a deterministic
optimizer and a command-line front end.
"""

from .lgi import KValue, LgiParams, k_values
from .nci import BetaValue, NciParams, beta_values
from .optim import ArgMaxResult, Dim, ParamBox, maximize

__all__ = [
    "KValue",
    "LgiParams",
    "k_values",
    "BetaValue",
    "NciParams",
    "beta_values",
    "ArgMaxResult",
    "Dim",
    "ParamBox",
    "maximize",
]

__version__ = "0.1.0"
