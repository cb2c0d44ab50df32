"""Projective measurements under the Lüders and von Neumann update rules.

An observable is described by an :class:`EigenBasis`: an ordered, complete
orthonormal set of eigenvectors, each carrying its eigenvalue.  Summing the
rank-one projectors of equal eigenvalue gives the coarse
:class:`ProjectorSet`.

Update rules for outcome ``m``::

    Luders:      rho -> P_m rho P_m
    VonNeumann:  rho -> sum_a P_m^a rho P_m^a   (rank-one P_m^a from a chosen basis)

The two rules agree on every outcome probability; they differ only in how
much coherence inside a degenerate eigenspace survives, which the next
measurement can detect.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .matcore import (
    DensityMatrix,
    DimensionError,
    StateError,
    Unitary,
    as_cmatrix,
    as_cvector,
)

__all__ = [
    "EigenBasis",
    "ProjectorSet",
    "Luders",
    "VonNeumann",
    "LUDERS",
    "UpdateRule",
    "ZeroProbabilityError",
    "projectors_from_basis",
    "kraus_by_outcome",
    "branch_state",
    "measure_update",
    "joint_probabilities",
    "correlation_from_kraus",
    "signed_dephasing",
    "correlation_from_superop",
    "sequential_correlation",
    "luders_closed_form",
    "vn_correction_term",
]

ORTHO_TOL = 1e-10
GROUP_TOL = 1e-9
PROB_FLOOR = 1e-14
BLOCK_TOL = 1e-10


class ZeroProbabilityError(ValueError):
    """The requested outcome has (numerically) zero probability."""


def _group_key(value: float, keys: Iterable[float]) -> float | None:
    for k in keys:
        if abs(k - value) <= GROUP_TOL:
            return k
    return None


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Ordered orthonormal eigenvectors with their eigenvalue labels.

    Parameters
    ----------
    vectors : array_like
        Either a sequence of vectors or a 2-D array whose *rows* are the
        eigenvectors.
    eigenvalues : sequence of float
        One real label per vector.
    """

    vectors: np.ndarray
    eigenvalues: tuple[float, ...]

    def __post_init__(self) -> None:
        vecs = np.array([as_cvector(v) for v in self.vectors], dtype=np.complex128)
        labels = tuple(float(x) for x in self.eigenvalues)
        n, d = vecs.shape
        if n != d:
            raise DimensionError(f"basis must be complete: {n} vectors in dimension {d}")
        if len(labels) != n:
            raise DimensionError(f"{len(labels)} eigenvalues for {n} vectors")
        gram = vecs.conj() @ vecs.T
        err = float(np.max(np.abs(gram - np.eye(n))))
        if err > ORTHO_TOL:
            raise StateError(f"basis vectors are not orthonormal (max deviation {err:.3g})")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "eigenvalues", labels)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def rank_one(self, i: int) -> np.ndarray:
        v = self.vectors[i]
        return np.outer(v, v.conj())

    def groups(self) -> dict[float, tuple[int, ...]]:
        """Vector indices grouped by eigenvalue, in first-seen order."""
        out: dict[float, list[int]] = {}
        for i, lam in enumerate(self.eigenvalues):
            key = _group_key(lam, out)
            out.setdefault(lam if key is None else key, []).append(i)
        return {k: tuple(v) for k, v in out.items()}

    def observable(self) -> np.ndarray:
        """``sum_i lambda_i |v_i><v_i|``."""
        return sum(lam * self.rank_one(i) for i, lam in enumerate(self.eigenvalues))

    def diagonalizes(self, op, tol: float = ORTHO_TOL) -> bool:
        """True if every vector is an eigenvector of ``op`` with its own label."""
        a = as_cmatrix(op)
        if a.shape[0] != self.dim:
            return False
        for v, lam in zip(self.vectors, self.eigenvalues):
            if np.max(np.abs(a @ v - lam * v)) > tol:
                return False
        return True


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    """Eigenvalue-keyed coarse projectors of an observable."""

    blocks: dict

    def __post_init__(self) -> None:
        blocks = {float(k): as_cmatrix(p).copy() for k, p in self.blocks.items()}
        if not blocks:
            raise ValueError("ProjectorSet needs at least one block")
        dims = {p.shape for p in blocks.values()}
        if len(dims) != 1:
            raise DimensionError(f"blocks have mixed shapes {sorted(dims)}")
        d = next(iter(dims))[0]
        total = np.zeros((d, d), dtype=np.complex128)
        mats = list(blocks.values())
        for i, p in enumerate(mats):
            if np.max(np.abs(p @ p - p)) > BLOCK_TOL:
                raise StateError("projector block is not idempotent")
            for q in mats[i + 1 :]:
                if np.max(np.abs(p @ q)) > BLOCK_TOL:
                    raise StateError("projector blocks are not mutually orthogonal")
            total += p
        if np.max(np.abs(total - np.eye(d))) > BLOCK_TOL:
            raise StateError("projector blocks do not resolve the identity")
        for p in mats:
            p.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return next(iter(self.blocks.values())).shape[0]

    def observable(self) -> np.ndarray:
        return sum(k * p for k, p in self.blocks.items())

    def conjugated(self, u: Unitary | np.ndarray) -> "ProjectorSet":
        """Blocks ``U P U^dagger`` (the observable carried along by ``U``)."""
        m = u.mat if isinstance(u, Unitary) else as_cmatrix(u)
        return ProjectorSet({k: m @ p @ m.conj().T for k, p in self.blocks.items()})


class Luders:
    """Degeneracy-respecting update with coarse projectors."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "LUDERS"


LUDERS = Luders()


@dataclass(frozen=True, eq=False)
class VonNeumann:
    """Degeneracy-breaking update in the rank-one basis ``basis``."""

    basis: EigenBasis


UpdateRule = Union[Luders, VonNeumann]


def projectors_from_basis(b: EigenBasis) -> ProjectorSet:
    return ProjectorSet(
        {lam: sum(b.rank_one(i) for i in idx) for lam, idx in b.groups().items()}
    )


def _check_rule(b: EigenBasis, rule: UpdateRule) -> None:
    if isinstance(rule, Luders):
        return
    if not isinstance(rule, VonNeumann):
        raise TypeError(f"unknown update rule {rule!r}")
    if rule.basis is b:
        return
    if rule.basis.dim != b.dim or not rule.basis.diagonalizes(b.observable()):
        raise StateError("von Neumann basis does not diagonalize the measured observable")


def kraus_by_outcome(b: EigenBasis, rule: UpdateRule) -> list[tuple[float, list[np.ndarray]]]:
    """Projectors applied for each outcome of ``b`` under ``rule``.

    Luders gives one coarse projector per outcome; von Neumann gives the
    rank-one projectors of ``rule.basis`` that fall in that outcome.  The
    returned arrays are read-only so callers may cache them.
    """
    _check_rule(b, rule)
    groups = b.groups()
    if isinstance(rule, Luders):
        out = [(lam, [sum(b.rank_one(i) for i in idx)]) for lam, idx in groups.items()]
    else:
        fine = rule.basis
        out = []
        for lam in groups:
            idx = [i for i, mu in enumerate(fine.eigenvalues) if abs(mu - lam) <= GROUP_TOL]
            out.append((lam, [fine.rank_one(i) for i in idx]))
    for _, projs in out:
        for p in projs:
            p.setflags(write=False)
    return out


def _rho_array(rho) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityMatrix) else as_cmatrix(rho)


def _branch(rho: np.ndarray, projectors: list[np.ndarray]) -> np.ndarray:
    out = projectors[0] @ rho @ projectors[0]
    for p in projectors[1:]:
        out = out + p @ rho @ p
    return out


def branch_state(rho, b: EigenBasis, rule: UpdateRule, outcome: float) -> np.ndarray:
    """Unnormalized post-measurement state for ``outcome`` (trace = probability)."""
    r = _rho_array(rho)
    if r.shape[0] != b.dim:
        raise DimensionError(f"state dimension {r.shape[0]} vs basis dimension {b.dim}")
    for lam, projs in kraus_by_outcome(b, rule):
        if abs(lam - outcome) <= GROUP_TOL:
            return _branch(r, projs)
    raise ValueError(f"outcome {outcome!r} is not an eigenvalue of the basis {b.eigenvalues}")


def measure_update(
    rho, b: EigenBasis, rule: UpdateRule, outcome: float
) -> tuple[float, DensityMatrix]:
    """Outcome probability and conditional post-measurement state.

    Raises
    ------
    ZeroProbabilityError
        If the outcome probability is at most ``1e-14``.
    """
    br = branch_state(rho, b, rule, outcome)
    p = float(np.trace(br).real)
    if p <= PROB_FLOOR:
        raise ZeroProbabilityError(f"outcome {outcome!r} has probability {p:.3g}")
    post = 0.5 * (br + br.conj().T) / p
    return p, DensityMatrix(post)


def _umat(u) -> np.ndarray | None:
    if u is None:
        return None
    return u.mat if isinstance(u, Unitary) else as_cmatrix(u)


def joint_probabilities(
    rho, first: tuple[EigenBasis, UpdateRule], u_mid, second: ProjectorSet
) -> dict[tuple[float, float], float]:
    """``p(m, n)`` for measuring ``first``, evolving by ``u_mid``, then ``second``."""
    r = _rho_array(rho)
    b, rule = first
    u = _umat(u_mid)
    if r.shape[0] != b.dim or second.dim != b.dim or (u is not None and u.shape[0] != b.dim):
        raise DimensionError("state, bases, and propagator must share one dimension")
    out = {}
    for m, projs in kraus_by_outcome(b, rule):
        br = _branch(r, projs)
        if u is not None:
            br = u @ br @ u.conj().T
        for n, pn in second.blocks.items():
            out[(m, n)] = float(np.trace(br @ pn).real)
    return out


def correlation_from_kraus(rho: np.ndarray, kraus, u: np.ndarray | None, second_obs: np.ndarray) -> float:
    """Unchecked core of :func:`sequential_correlation` on raw arrays.

    ``kraus`` is the output of :func:`kraus_by_outcome` and ``second_obs`` is
    ``sum_n n P_n`` of the second measurement, so that
    ``sum_n n p(m, n) = Tr[U branch_m U^dagger second_obs]``.
    """
    total = 0.0
    for m, projs in kraus:
        br = _branch(rho, projs)
        if u is not None:
            br = u @ br @ u.conj().T
        total += m * np.trace(br @ second_obs).real
    return float(total)


def signed_dephasing(kraus) -> np.ndarray:
    """Superoperator of ``rho -> sum_m m sum_P P rho P`` on row-major ``vec(rho)``.

    Folding the whole update rule into one 9x9 matrix (for a qutrit) lets a
    correlator be evaluated with a single matrix-vector product.
    """
    d = kraus[0][1][0].shape[0]
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for m, projs in kraus:
        for p in projs:
            # vec(P X P) = (P kron P^T) vec(X), and P^T = conj(P) for Hermitian P
            out += m * np.kron(p, p.conj())
    out.setflags(write=False)
    return out


def correlation_from_superop(rho: np.ndarray, dephasing: np.ndarray, u: np.ndarray | None, second_obs: np.ndarray) -> float:
    """Same value as :func:`correlation_from_kraus`, from :func:`signed_dephasing`."""
    d = rho.shape[0]
    signed = (dephasing @ rho.reshape(-1)).reshape(d, d)
    if u is not None:
        second_obs = u.conj().T @ second_obs @ u
    # Tr[S B] as an elementwise sum
    return float(np.sum(signed * second_obs.T).real)


def sequential_correlation(
    rho, first: tuple[EigenBasis, UpdateRule], u_mid, second: ProjectorSet
) -> float:
    """``sum_{m,n} m n p(m, n)`` built from unnormalized branch states."""
    r = _rho_array(rho)
    b, rule = first
    u = _umat(u_mid)
    if r.shape[0] != b.dim or second.dim != b.dim or (u is not None and u.shape[0] != b.dim):
        raise DimensionError("state, bases, and propagator must share one dimension")
    return correlation_from_kraus(r, kraus_by_outcome(b, rule), u, second.observable())


def luders_closed_form(rho, a, b) -> float:
    """``Re Tr[rho (AB + BA)] / 2``, valid for a dichotomic first observable."""
    r = _rho_array(rho)
    a, b = as_cmatrix(a), as_cmatrix(b)
    if not (r.shape == a.shape == b.shape):
        raise DimensionError(f"shapes {r.shape}, {a.shape}, {b.shape} differ")
    return float(0.5 * np.trace(r @ (a @ b + b @ a)).real)


def vn_correction_term(rho, b: EigenBasis, obs) -> float:
    """Cross term dropped by the von Neumann rule inside the +1 eigenspace.

    Returns ``Tr[(P1 rho P2 + P2 rho P1) B]`` where ``P1``, ``P2`` are the two
    rank-one projectors of ``b`` with eigenvalue +1, so that the von Neumann
    correlator equals the Lüders one minus this value.
    """
    groups = b.groups()
    key = _group_key(1.0, groups)
    if key is None or len(groups[key]) != 2:
        raise ValueError("basis needs a two-fold degenerate +1 eigenspace")
    i, j = groups[key]
    p1, p2 = b.rank_one(i), b.rank_one(j)
    r = _rho_array(rho)
    m = as_cmatrix(obs)
    if r.shape != m.shape or r.shape[0] != b.dim:
        raise DimensionError("state, basis, and observable must share one dimension")
    return float(np.trace((p1 @ r @ p2 + p2 @ r @ p1) @ m).real)
