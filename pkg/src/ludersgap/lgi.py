"""Three-time Leggett-Garg scenario on a qutrit.

The dichotomic observable is ``M1 = diag(-1, 1, 1)``.  Its +1 eigenspace is
two-dimensional, so a von Neumann measurement needs a rank-one basis there;
the one-parameter family used here is::

    |2'> = xi |2> + sqrt(1 - xi^2) |3>
    |3'> = sqrt(1 - xi^2) |2> - xi |3>

Between measurements the state evolves under ``exp(i g Jx)``.  Couplings
are only ever used as the products ``g1`` (t1 -> t2) and ``g2`` (t2 -> t3).
The state is evolved (Schrödinger picture) and ``M1`` is always measured in
its fixed basis.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .matcore import DensityMatrix, _propagator_matrix, propagator, pure_state
from .measure import (
    LUDERS,
    EigenBasis,
    ProjectorSet,
    VonNeumann,
    correlation_from_superop,
    kraus_by_outcome,
    projectors_from_basis,
    signed_dephasing,
    vn_correction_term,
)

__all__ = [
    "LgiParams",
    "KValue",
    "STATES",
    "RULES",
    "m1_basis",
    "m1_observable",
    "m1_projectors",
    "initial_state",
    "lgi_correlator",
    "lgi_correlators",
    "correction_terms",
    "k_values",
    "k13_closed_equal_g",
    "k13_closed_xi1",
    "k_closed_form",
    "CLOSED_FORMS",
]

STATES = ("001", "100")
RULES = ("luders", "vn")
PAIRS = ((1, 2), (2, 3), (1, 3))
CLOSED_FORMS = ("k13v", "k23v", "k12v", "k12v2")


@dataclass(frozen=True)
class LgiParams:
    g1: float
    g2: float
    xi: float = 1.0
    state: str = "001"
    rule: str = "vn"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g1) and math.isfinite(self.g2)):
            raise ValueError(f"couplings must be finite, got g1={self.g1!r}, g2={self.g2!r}")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError(f"xi must lie in [0, 1], got {self.xi!r}")
        if self.state not in STATES:
            raise ValueError(f"state must be one of {STATES}, got {self.state!r}")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")


@dataclass(frozen=True)
class KValue:
    k13: float
    k23: float
    k12: float

    @classmethod
    def from_correlators(cls, c12: float, c23: float, c13: float) -> "KValue":
        return cls(
            k13=c12 + c23 - c13,
            k23=c12 - c23 + c13,
            k12=-c12 + c23 + c13,
        )

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@lru_cache(maxsize=4096)
def m1_basis(xi: float) -> EigenBasis:
    """Eigenbasis of ``M1`` with the +1 pair rotated by ``xi``.

    ``xi = 1`` is the computational basis; ``xi = 0`` swaps ``|2>`` and ``|3>``.
    """
    xi = float(xi)
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi must lie in [0, 1], got {xi!r}")
    c = math.sqrt(1.0 - xi * xi)
    return EigenBasis(
        [[1.0, 0.0, 0.0], [0.0, xi, c], [0.0, c, -xi]],
        (-1.0, 1.0, 1.0),
    )


_M1_BLOCKS = projectors_from_basis(m1_basis(1.0))
_M1 = _M1_BLOCKS.observable()
_M1.setflags(write=False)


def m1_projectors() -> ProjectorSet:
    return _M1_BLOCKS


def m1_observable() -> np.ndarray:
    return _M1


@lru_cache(maxsize=None)
def initial_state(state: str) -> DensityMatrix:
    if state == "001":
        return pure_state([0.0, 0.0, 1.0])
    if state == "100":
        return pure_state([1.0, 0.0, 0.0])
    raise ValueError(f"state must be one of {STATES}, got {state!r}")


@lru_cache(maxsize=4096)
def _dephasing(xi: float, rule: str) -> np.ndarray:
    b = m1_basis(xi)
    return signed_dephasing(kraus_by_outcome(b, LUDERS if rule == "luders" else VonNeumann(b)))


def _legs(p: LgiParams, r: int, s: int) -> tuple[float, float]:
    # (coupling from t1 to t_r, coupling from t_r to t_s)
    if (r, s) == (1, 2):
        return 0.0, p.g1
    if (r, s) == (2, 3):
        return p.g1, p.g2
    if (r, s) == (1, 3):
        return 0.0, p.g1 + p.g2
    raise ValueError(f"invalid time pair ({r}, {s}); expected (1,2), (2,3) or (1,3)")


def _state_at(p: LgiParams, g_to_r: float) -> np.ndarray:
    rho = initial_state(p.state).mat
    if g_to_r == 0.0:
        return rho
    u = _propagator_matrix(g_to_r)
    return u @ rho @ u.conj().T


def lgi_correlator(p: LgiParams, r: int, s: int) -> float:
    """Sequential correlator ``<M_r M_s>`` for measurement times ``r < s``.

    The state is evolved to ``t_r``, measured with ``M1`` under ``p.rule``
    (basis ``m1_basis(p.xi)``), evolved to ``t_s``, and read with the
    coarse ``M1`` blocks.
    """
    g_to_r, g_mid = _legs(p, r, s)
    return correlation_from_superop(
        _state_at(p, g_to_r), _dephasing(p.xi, p.rule), _propagator_matrix(g_mid), _M1
    )


def lgi_correlators(p: LgiParams) -> dict[tuple[int, int], float]:
    return {pair: lgi_correlator(p, *pair) for pair in PAIRS}


def correction_terms(p: LgiParams) -> dict[tuple[int, int], float]:
    """Lüders-minus-von-Neumann gap of each correlator at basis ``p.xi``.

    The second observable is carried back to time ``t_r``, i.e.
    ``U^dagger M1 U`` with ``U`` the propagator between the two measurements.
    """
    out = {}
    m1 = m1_observable()
    for pair in PAIRS:
        g_to_r, g_mid = _legs(p, *pair)
        u = propagator(g_mid).mat
        out[pair] = vn_correction_term(_state_at(p, g_to_r), m1_basis(p.xi), u.conj().T @ m1 @ u)
    return out


def k_values(p: LgiParams) -> KValue:
    c = lgi_correlators(p)
    return KValue.from_correlators(c[(1, 2)], c[(2, 3)], c[(1, 3)])


def k13_closed_equal_g(g):
    """``K13`` for ``|001>``, von Neumann at ``xi = 1``, equal couplings ``g``."""
    g = np.asarray(g, dtype=float)
    return (1.0 + 32.0 * np.cos(g) - 20.0 * np.cos(2 * g) + 3.0 * np.cos(4 * g)) / 16.0


def k13_closed_xi1(g1, g2, corrected: bool = False):
    """``K13`` for ``|001>``, von Neumann at ``xi = 1``, independent couplings.

    As printed, the ``cos^2(g1) cos(g2)`` term carries a factor 2; with it
    the expression neither matches simulation nor reduces to
    :func:`k13_closed_equal_g` at ``g1 == g2``.  ``corrected=True`` drops it.
    """
    g1, g2 = np.asarray(g1, dtype=float), np.asarray(g2, dtype=float)
    s, c = np.sin, np.cos
    head = 1.0 if corrected else 2.0
    out = 0.5 * (
        s(g1) ** 2
        + c(g2)
        + head * c(g1) ** 2 * c(g2)
        + c(g2) ** 2 * s(g1) ** 2
        + c(g1) * (2 + s(g2) ** 2)
        - 2 * c(g1 + g2)
        - s(g1 + g2) ** 2
    )
    return float(out) if np.ndim(out) == 0 else out


def _k13v(g1, g2, xi, corrected):
    x2, x4 = xi**2, xi**4
    # literal form repeats sin^2(g1/2) and has "15 xi^2" twice
    s2 = np.sin(g2 / 2) ** 2 if corrected else np.sin(g1 / 2) ** 2
    q = 15 * x4 if corrected else 15 * x2
    inner = (
        -2 - 11 * x2 + 11 * x4
        + 9 * x2 * (-1 + x2) * np.cos(g2)
        + np.cos(g1) * (4 - 21 * x2 + 21 * x4 + (2 - 15 * x2 + q) * np.cos(g2))
    )
    return (
        1
        + inner * np.sin(g1 / 2) ** 2 * s2
        + (1 - 2 * x2 + 2 * x4) * np.sin(g1) * np.sin(g2)
        - 0.25 * (1 - 6 * x2 + 6 * x4) * np.sin(2 * g1) * np.sin(2 * g2)
    )


def _k23v(g1, g2, xi, corrected):
    x2, x4 = xi**2, xi**4
    # literal form reads (1 - 2 xi^2 + 2 xi^2) in the sin g1 sin g2 term
    t = 2 * x4 if corrected else 2 * x2
    inner = (
        -4 - 3 * x2 + 3 * x4
        - 4 * np.cos(g2)
        + x2 * (-1 + x2) * (4 * np.cos(g2) + 9 * np.cos(2 * g2))
        + np.cos(g1)
        * (
            2 - 21 * x2 + 21 * x4
            + 4 * (1 - 3 * x2 + 3 * x4) * np.cos(g2)
            + (2 - 15 * x2 + 15 * x4) * np.cos(2 * g2)
        )
    )
    return 0.25 * (
        4
        + inner * np.sin(g1 / 2) ** 2
        - 4 * (1 - 2 * x2 + t) * np.sin(g1) * np.sin(g2)
        + (1 - 6 * x2 + 6 * x4) * np.sin(2 * g1) * np.sin(2 * g2)
    )


def _k12v(g1, g2, xi, corrected):
    x2, x4 = xi**2, xi**4
    # literal form has sin^2(g2/2) in the cos(g1) term; simulation needs sin^4
    power = 4 if corrected else 2
    inner = (
        -8 - x2 + x4
        + (-2 - 3 * x2 + 3 * x4) * np.cos(g2)
        + np.cos(2 * g1) * (4 - 27 * x2 + 27 * x4 + (6 - 33 * x2 + 33 * x4) * np.cos(g2))
    )
    return 0.25 * (
        4
        + inner * np.sin(g2 / 2) ** 2
        - 8 * (1 - 3 * x2 + 3 * x4) * np.cos(g1) * np.sin(g2 / 2) ** power
        - 4 * np.sin(g1) * np.sin(g2)
        + 8 * x2 * (-1 + x2) * (-1 + 3 * np.cos(g1) * np.cos(g2)) * np.sin(g1) * np.sin(g2)
        + np.sin(2 * g1) * np.sin(2 * g2)
    )


def _k12v2(g1, g2, xi, corrected):
    x2, x4 = xi**2, xi**4
    sh = np.sin(g2 / 2) ** 2
    return (
        x2 - x4 + 2
        - 16 * np.cos(g1) * sh * ((3 * x4 - 3 * x2 + 1) * np.cos(g2) + x4 - x2 + 3)
        + 2 * np.cos(2 * g2)
        + 4 * np.cos(2 * g1) * sh * ((9 * x4 - 9 * x2 - 2) * np.cos(g2) + 3 * x4 - 3 * x2 - 4)
        - 16 * np.sin(g1) * np.sin(g2)
        - 4 * np.sin(2 * g1) * np.sin(2 * g2)
        - 3 * (x2 - 1) * x2 * np.cos(2 * g2)
        + 4 * (x4 - x2 + 3) * np.cos(g2)
    ) / 16


_FORMS = {"k13v": _k13v, "k23v": _k23v, "k12v": _k12v, "k12v2": _k12v2}


def k_closed_form(which: str, g1, g2, xi, corrected: bool = False):
    """Closed-form von Neumann K values.

    ``which`` selects ``k13v``, ``k23v``, ``k12v`` (all for ``|001>``) or
    ``k12v2`` (``K12`` for ``|100>``).  ``corrected=False`` evaluates the
    expression term-for-term as printed; ``corrected=True`` applies the
    minimal fixes that make it agree with direct simulation.  Broadcasts
    over array arguments.
    """
    try:
        fn = _FORMS[which]
    except KeyError:
        raise ValueError(f"unknown closed form {which!r}; expected one of {CLOSED_FORMS}") from None
    g1, g2, xi = (np.asarray(a, dtype=float) for a in (g1, g2, xi))
    out = fn(g1, g2, xi, corrected)
    return float(out) if np.ndim(out) == 0 else out
