"""Noncontextuality scenario: three commuting dichotomic qutrit observables.

``A_i = I - 2 |alpha_i><alpha_i|`` for an orthonormal triple ``alpha_i``;
each has eigenvalues ``(-1, 1, 1)``.  Every pair correlator is a fresh
two-measurement experiment on ``psi(theta, phi)`` with no evolution in
between.  The first-listed observable is measured first and carries its own
von Neumann basis parameter: ``eps`` for ``A1``, ``lam`` for ``A2`` and
``delta`` for ``A3``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .matcore import DensityMatrix, pure_state
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
    "NciParams",
    "BetaValue",
    "nci_observables",
    "nci_projectors",
    "nci_basis",
    "psi",
    "nci_correlator",
    "nci_correlators",
    "correction_terms",
    "beta_values",
    "beta_luders_closed",
    "beta_vn_closed",
]

_R2 = 1.0 / math.sqrt(2.0)
_ALPHA = (
    np.array([-_R2, 0.0, _R2]),
    np.array([_R2, 0.0, _R2]),
    np.array([0.0, 1.0, 0.0]),
)
# (eigenvalue -1 vector, first +1 vector, second +1 vector) for A1, A2, A3
_ANCHORS = (
    (_ALPHA[0], _ALPHA[1], _ALPHA[2]),
    (_ALPHA[1], _ALPHA[0], _ALPHA[2]),
    (_ALPHA[2], np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])),
)
PAIRS = ((1, 2), (2, 3), (3, 1))
RULES = ("luders", "vn")


@dataclass(frozen=True)
class NciParams:
    theta: float
    phi: float
    eps: float = 1.0
    lam: float = 1.0
    delta: float = 1.0
    rule: str = "vn"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("state angles must be finite")
        for name in ("eps", "lam", "delta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")

    def basis_param(self, observable: int) -> float:
        return (self.eps, self.lam, self.delta)[observable - 1]


@dataclass(frozen=True)
class BetaValue:
    b31: float
    b23: float
    b12: float

    @classmethod
    def from_correlators(cls, c12: float, c23: float, c31: float) -> "BetaValue":
        return cls(
            b31=c12 + c23 - c31,
            b23=c12 - c23 + c31,
            b12=-c12 + c23 + c31,
        )

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


_OBS = tuple(np.eye(3) - 2.0 * np.outer(a, a) for a in _ALPHA)
for _o in _OBS:
    _o.setflags(write=False)


def nci_observables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return _OBS


def _check_index(observable: int) -> int:
    if observable not in (1, 2, 3):
        raise ValueError(f"observable index must be 1, 2 or 3, got {observable!r}")
    return observable - 1


@lru_cache(maxsize=4096)
def nci_basis(observable: int, param: float) -> EigenBasis:
    """Eigenbasis of ``A_observable`` with its +1 pair rotated by ``param``.

    With anchors ``(v1, v2, v3)`` the basis is ``v1`` (eigenvalue -1),
    ``param*v2 + sqrt(1-param^2)*v3`` and ``sqrt(1-param^2)*v2 - param*v3``.
    """
    i = _check_index(observable)
    param = float(param)
    if not 0.0 <= param <= 1.0:
        raise ValueError(f"basis parameter must lie in [0, 1], got {param!r}")
    v1, v2, v3 = _ANCHORS[i]
    c = math.sqrt(1.0 - param * param)
    return EigenBasis([v1, param * v2 + c * v3, c * v2 - param * v3], (-1.0, 1.0, 1.0))


_BLOCKS = tuple(projectors_from_basis(nci_basis(i, 1.0)) for i in (1, 2, 3))


def nci_projectors(observable: int) -> ProjectorSet:
    return _BLOCKS[_check_index(observable)]


def _psi_vector(theta: float, phi: float) -> np.ndarray:
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    v = np.array([st * sp, ct * sp, cp])
    # renormalize away the last-ulp drift so the unit-norm check is exact
    return v / math.sqrt(float(v @ v))


def psi(theta: float, phi: float) -> DensityMatrix:
    """Pure state ``(sin t sin p, cos t sin p, cos p)``."""
    return pure_state(_psi_vector(theta, phi))


def _psi_array(theta: float, phi: float) -> np.ndarray:
    # unvalidated hot-path twin of psi(); the vector is unit norm by construction
    v = _psi_vector(theta, phi)
    return np.outer(v, v).astype(np.complex128)


@lru_cache(maxsize=8192)
def _dephasing(observable: int, param: float, rule: str) -> np.ndarray:
    b = nci_basis(observable, param)
    return signed_dephasing(kraus_by_outcome(b, LUDERS if rule == "luders" else VonNeumann(b)))


def nci_correlator(p: NciParams, first: int, second: int, rho: DensityMatrix | None = None) -> float:
    """``<A_first A_second>`` with ``A_first`` measured first under ``p.rule``."""
    _check_index(first)
    j = _check_index(second)
    r = _psi_array(p.theta, p.phi) if rho is None else rho.mat
    return correlation_from_superop(r, _dephasing(first, p.basis_param(first), p.rule), None, _OBS[j])


def nci_correlators(p: NciParams) -> dict[tuple[int, int], float]:
    r = _psi_array(p.theta, p.phi)
    return {
        (i, j): correlation_from_superop(r, _dephasing(i, p.basis_param(i), p.rule), None, _OBS[j - 1])
        for i, j in PAIRS
    }


def correction_terms(p: NciParams) -> dict[tuple[int, int], float]:
    """Lüders-minus-von-Neumann gap of each pair correlator."""
    rho = psi(p.theta, p.phi)
    return {
        (i, j): vn_correction_term(rho, nci_basis(i, p.basis_param(i)), _OBS[j - 1])
        for i, j in PAIRS
    }


def beta_values(p: NciParams) -> BetaValue:
    c = nci_correlators(p)
    return BetaValue.from_correlators(c[(1, 2)], c[(2, 3)], c[(3, 1)])


def beta_luders_closed(theta, phi) -> BetaValue:
    """Lüders values of the three noncontextual combinations for ``psi``."""
    st, sp, cp, ct = np.sin(theta), np.sin(phi), np.cos(phi), np.cos(theta)
    return BetaValue(
        b31=1 - 2 * (cp + st * sp) ** 2,
        b23=1 - 2 * (cp - st * sp) ** 2,
        b12=1 - 4 * ct**2 * sp**2,
    )


def _w(x):
    # recurring basis-angle factor x (1 - 2x^2) sqrt(1 - x^2)
    return x * (1 - 2 * x**2) * np.sqrt(1 - x**2)


def beta_vn_closed(p: NciParams, corrected: bool = False) -> BetaValue:
    """Closed-form von Neumann values (``p.rule`` is ignored).

    ``corrected=False`` evaluates each expression term-for-term as printed.
    ``corrected=True`` fixes one sign slip per expression, which restores
    agreement with :func:`beta_values`:

    * ``b31``: the ``lam`` part of the ``cos(theta) sin(2 phi)`` coefficient
    * ``b23``: the ``eps^4`` term of the ``cos^2(phi)`` coefficient
    * ``b12``: the constant and ``eps^2`` terms of the ``cos^2(phi)`` coefficient
    """
    t, f = p.theta, p.phi
    e, l, d = p.eps, p.lam, p.delta
    e2, e4, l2, l4, d2, d4 = e**2, e**4, l**2, l**4, d**2, d**4
    r2 = math.sqrt(2.0)
    c2f, s2f, sin2f = np.cos(f) ** 2, np.sin(f) ** 2, np.sin(2 * f)
    c2t, s2t, sin2t = np.cos(2 * t), np.sin(t) ** 2, np.sin(2 * t)
    wd = _w(d)

    lam_cos = _w(l) if corrected else -_w(l)
    b31 = (
        (-1 + 2 * e2 - 2 * e4 + (-1 + l2) * 2 * l2 + 2 * wd) * c2f
        + (
            (e - l) * (e + l) * (-1 + e2 + l2)
            + (1 - 3 * e2 + 3 * e4 + 3 * l2 - 3 * l4) * c2t
            - 2 * wd * s2t
            + r2 * (_w(e) + _w(l)) * sin2t
        )
        * s2f
        - (r2 * (-_w(e) + lam_cos) * np.cos(t) + np.sin(t) + 2 * (-e2 + e4 - l2 + l4 + 2 * d2 - 2 * d4) * np.sin(t))
        * sin2f
    )

    e4_term = -2 * e4 if corrected else 2 * e4
    b23 = (
        (-1 + 2 * e2 + e4_term + 2 * l2 - 2 * l4 - 2 * wd) * c2f
        + (
            -e2 + e4 - l2 + l4
            + (1 - 3 * e2 + 3 * e4 - 3 * l2 + 3 * l4) * c2t
            + 2 * wd * s2t
            + r2 * (_w(e) - _w(l)) * sin2t
        )
        * s2f
        + (r2 * (_w(e) + _w(l)) * np.cos(t) + np.sin(t) + 2 * (e2 - e4 - l2 + l4 + 2 * d2 - 2 * d4) * np.sin(t))
        * sin2f
    )

    head = (1 - 2 * e2) if corrected else (-1 + 2 * e2)
    b12 = (
        (head + 2 * e4 + (-1 + l2) * 2 * l2 - 2 * wd) * c2f
        - (
            1 - e2 + e4 - l2 + l4
            + (2 - 3 * e2 + 3 * e4 - 3 * l2 + 3 * l4) * c2t
            - 2 * wd * s2t
            + r2 * (_w(e) - _w(l)) * sin2t
        )
        * s2f
        + (
            r2 * (-_w(e) - _w(l)) * np.cos(t)
            + (-1 - 2 * e2 + 2 * e4 + 2 * l2 - 2 * l4 + 4 * d2 - 4 * d4) * np.sin(t)
        )
        * sin2f
    )
    return BetaValue(float(b31), float(b23), float(b12))
