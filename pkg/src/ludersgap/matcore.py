"""Dense linear algebra for small qutrit systems.

Matrices are plain ``numpy`` complex arrays.  The validated wrappers
:class:`DensityMatrix` and :class:`Unitary` hold read-only copies, so every
value handed out by this module is immutable.

The spin-1 propagator uses the identity ``Jx**3 == Jx``, which makes the
exponential exact and branch free::

    exp(i g Jx) = I + i sin(g) Jx + (cos(g) - 1) Jx**2
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "StateError",
    "DensityMatrix",
    "Unitary",
    "as_cmatrix",
    "as_cvector",
    "identity",
    "add",
    "scale",
    "mul",
    "adjoint",
    "trace",
    "outer",
    "herm_eig",
    "jx_spin1",
    "propagator",
    "pure_state",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class StateError(ValueError):
    """A matrix or vector fails a physical-state invariant."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def as_cmatrix(a) -> np.ndarray:
    """Return ``a`` as a square complex matrix, raising on any other shape."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def as_cvector(v) -> np.ndarray:
    x = np.asarray(v, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"expected a non-empty vector, got shape {x.shape}")
    return x


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[0]:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def add(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a + b


def scale(c: complex, a) -> np.ndarray:
    return complex(c) * as_cmatrix(a)


def mul(a, b) -> np.ndarray:
    """Matrix-matrix or matrix-vector product with an explicit shape check."""
    a = as_cmatrix(a)
    b = np.asarray(b, dtype=np.complex128)
    _same_dim(a, b)
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_cmatrix(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(as_cmatrix(a)))


def outer(u, v=None) -> np.ndarray:
    """``|u><v|``; with one argument, the projector-like ``|u><u|``."""
    u = as_cvector(u)
    v = u if v is None else as_cvector(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return np.outer(u, v.conj())


def herm_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    values : ndarray
        Real eigenvalues in ascending order.
    vectors : ndarray
        Orthonormal eigenvectors as columns.
    """
    m = as_cmatrix(a)
    if not np.allclose(m, m.conj().T, atol=HERMITIAN_TOL, rtol=0):
        raise StateError("herm_eig requires a Hermitian matrix")
    return np.linalg.eigh(m)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite state."""

    mat: np.ndarray

    def __post_init__(self) -> None:
        m = as_cmatrix(self.mat)
        herm_err = float(np.max(np.abs(m - m.conj().T)))
        if herm_err > HERMITIAN_TOL:
            raise StateError(f"density matrix not Hermitian (max deviation {herm_err:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"density matrix trace is {tr!r}, expected 1")
        lowest = float(np.linalg.eigvalsh(m)[0])
        if lowest < PSD_TOL:
            raise StateError(f"density matrix has negative eigenvalue {lowest:.3g}")
        object.__setattr__(self, "mat", _frozen(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def expect(self, op) -> float:
        """``Re Tr[rho op]``."""
        return float(np.trace(self.mat @ as_cmatrix(op)).real)


@dataclass(frozen=True, eq=False)
class Unitary:
    mat: np.ndarray

    def __post_init__(self) -> None:
        m = as_cmatrix(self.mat)
        err = float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))
        if err > UNITARY_TOL:
            raise StateError(f"matrix is not unitary (max deviation {err:.3g})")
        object.__setattr__(self, "mat", _frozen(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def conjugate(self, x: np.ndarray) -> np.ndarray:
        """``U x U^dagger``."""
        return self.mat @ x @ self.mat.conj().T


_S = 1.0 / math.sqrt(2.0)
_JX = _frozen([[0, _S, 0], [_S, 0, _S], [0, _S, 0]])
_JX2 = _frozen(_JX @ _JX)
_I3 = _frozen(np.eye(3))


def jx_spin1() -> np.ndarray:
    """Spin-1 ``Jx`` (hbar = 1) in the ordered basis ``|1>, |2>, |3>``."""
    return _JX


def _propagator_matrix(g: float) -> np.ndarray:
    return _I3 + 1j * math.sin(g) * _JX + (math.cos(g) - 1.0) * _JX2


def propagator(g: float) -> Unitary:
    """``exp(+i g Jx)`` for the dimensionless coupling-time product ``g``.

    The exponent sign follows the ``+i`` convention.  For the real initial
    states and real observables used here the two sign choices give the
    same statistics (they are complex conjugates of each other).
    """
    g = float(g)
    if not math.isfinite(g):
        raise ValueError(f"propagator needs a finite coupling, got {g!r}")
    return Unitary(_propagator_matrix(g))


def pure_state(v) -> DensityMatrix:
    """``|v><v|`` for a unit vector ``v``."""
    x = as_cvector(v)
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > NORM_TOL:
        raise StateError(f"state vector must be normalized, norm is {norm!r}")
    return DensityMatrix(np.outer(x, x.conj()))
