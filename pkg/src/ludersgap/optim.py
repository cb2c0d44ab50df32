"""Deterministic derivative-free maximization over a parameter box.

A dense lattice scan finds the basins, then a Nelder-Mead simplex polishes
the best few lattice points.  Nothing is randomized, so repeated runs give
bit-identical results.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "Dim",
    "ParamBox",
    "ArgMaxResult",
    "EvaluationBudgetError",
    "NonFiniteObjectiveError",
    "default_points",
    "default_workers",
    "grid_scan",
    "refine",
    "maximize",
]

Objective = Callable[[Mapping[str, float]], float]

MAX_EVALUATIONS = 10**8
REFINE_MAX_EVALS = 10_000
REFINE_FATOL = 1e-10
REFINE_XATOL = 1e-9
MAX_RESTARTS = 20
SIMPLEX_EDGE = 0.02
N_SEEDS = 5
TIE_MARGIN = 1e-12


class EvaluationBudgetError(ValueError):
    """A lattice scan would exceed the evaluation guard."""


class NonFiniteObjectiveError(ValueError):
    def __init__(self, point: Mapping[str, float], value: float):
        super().__init__(f"objective returned {value!r} at {dict(point)!r}")
        self.point = dict(point)
        self.value = value


@dataclass(frozen=True)
class Dim:
    name: str
    lo: float
    hi: float
    periodic: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise ValueError(f"dimension {self.name!r} needs finite lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def canonical(self, x: float) -> float:
        """Wrap periodic coordinates into ``[lo, hi)``; clamp the others."""
        if self.periodic:
            y = self.lo + math.fmod(x - self.lo, self.span)
            if y < self.lo:
                y += self.span
            return self.lo if y >= self.hi else y
        return min(max(x, self.lo), self.hi)

    def lattice(self, n: int) -> np.ndarray:
        # periodic dims drop the endpoint, which duplicates lo
        return np.linspace(self.lo, self.hi, n, endpoint=not self.periodic)


@dataclass(frozen=True)
class ParamBox:
    dims: tuple[Dim, ...]

    def __post_init__(self) -> None:
        dims = tuple(self.dims)
        if not 1 <= len(dims) <= 6:
            raise ValueError(f"a box needs 1 to 6 dimensions, got {len(dims)}")
        names = [d.name for d in dims]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate dimension names in {names}")
        object.__setattr__(self, "dims", dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def canonical(self, x: Sequence[float]) -> tuple[float, ...]:
        return tuple(d.canonical(float(v)) for d, v in zip(self.dims, x))

    def named(self, x: Sequence[float]) -> dict[str, float]:
        return dict(zip(self.names, (float(v) for v in x)))

    def contains(self, x: Sequence[float]) -> bool:
        return all(d.periodic or d.lo <= v <= d.hi for d, v in zip(self.dims, x))


@dataclass(frozen=True)
class ArgMaxResult:
    point: dict[str, float]
    value: float
    grid_best: float
    evaluations: int
    grid_point: dict[str, float] = field(default_factory=dict)


def default_points(ndim: int) -> int:
    """Lattice density per dimension.

    121 for one or two dimensions and 41 for three.  Four or more
    dimensions drop to 9 so the scan stays at desk scale (41**5 alone
    exceeds the evaluation guard).
    """
    if ndim <= 2:
        return 121
    if ndim == 3:
        return 41
    return 9


def default_workers() -> int:
    env = os.environ.get("LUDERSGAP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"LUDERSGAP_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _checked(objective: Objective, point: Mapping[str, float]) -> float:
    v = float(objective(point))
    if not math.isfinite(v):
        raise NonFiniteObjectiveError(point, v)
    return v


def grid_scan(
    objective: Objective,
    box: ParamBox,
    points_per_dim: int,
    workers: int | None = None,
) -> list[tuple[dict[str, float], float]]:
    """Evaluate ``objective`` on the full lattice, best first.

    Ties keep row-major (lexicographic) lattice order.  The lattice may be
    split across ``workers`` threads; ordering is fixed afterwards, so the
    result does not depend on the thread count.
    """
    if points_per_dim < 2:
        raise ValueError(f"points_per_dim must be at least 2, got {points_per_dim}")
    total = points_per_dim ** len(box.dims)
    if total > MAX_EVALUATIONS:
        raise EvaluationBudgetError(
            f"{points_per_dim}**{len(box.dims)} = {total} evaluations exceeds the {MAX_EVALUATIONS} guard"
        )
    axes = [d.lattice(points_per_dim) for d in box.dims]
    points = [box.named(x) for x in product(*axes)]

    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or total < 4096:
        values = [_checked(objective, pt) for pt in points]
    else:
        chunk = math.ceil(total / workers)
        parts = [points[i : i + chunk] for i in range(0, total, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(lambda ps: [_checked(objective, pt) for pt in ps], parts)
            values = [v for part in results for v in part]

    order = sorted(range(total), key=lambda i: (-values[i], i))
    return [(points[i], values[i]) for i in order]


def refine(
    objective: Objective,
    start: Mapping[str, float],
    box: ParamBox,
) -> tuple[dict[str, float], float, int]:
    """Nelder-Mead ascent from ``start``.

    The initial simplex has edges of 2% of each dimension's span.  A pass
    ends when the simplex values agree to ``1e-10`` and its vertices to
    ``1e-9``; passes restart from the incumbent until one fails to improve,
    or 10_000 evaluations are spent.
    Periodic coordinates are wrapped before each evaluation; bounded ones are
    clipped to the box.

    Returns
    -------
    point, value, evaluations
    """
    x0 = np.array([float(start[n]) for n in box.names])
    if not box.contains(x0):
        raise ValueError(f"start point {dict(start)!r} lies outside the box")

    def neg(x):
        return -_checked(objective, box.named(box.canonical(x)))

    bounds = [(None, None) if d.periodic else (d.lo, d.hi) for d in box.dims]
    x, fx, nfev = x0, neg(x0), 1
    # A simplex straddling the optimum symmetrically has zero value spread
    # and stops early; restarting from the incumbent with a fresh simplex
    # continues until a restart no longer improves.
    for _ in range(MAX_RESTARTS):
        if nfev >= REFINE_MAX_EVALS:
            break
        res = minimize(
            neg,
            x,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "initial_simplex": _simplex(x, box),
                "fatol": REFINE_FATOL,
                "xatol": REFINE_XATOL,
                "maxfev": REFINE_MAX_EVALS - nfev,
            },
        )
        nfev += int(res.nfev)
        improved = fx - float(res.fun) > REFINE_FATOL
        if float(res.fun) < fx:
            x, fx = np.asarray(res.x, dtype=float), float(res.fun)
        if not improved:
            break
    return box.named(box.canonical(x)), -fx, nfev


def _simplex(x0: np.ndarray, box: ParamBox) -> np.ndarray:
    n = len(x0)
    simplex = np.tile(x0, (n + 1, 1))
    for i, d in enumerate(box.dims):
        step = SIMPLEX_EDGE * d.span
        # step inward when the start sits on an upper wall
        if not d.periodic and x0[i] + step > d.hi:
            step = -step
        simplex[i + 1, i] += step
    return simplex


def maximize(
    objective: Objective,
    box: ParamBox,
    points_per_dim: int | None = None,
    seeds: int = N_SEEDS,
    workers: int | None = None,
) -> ArgMaxResult:
    """Lattice scan followed by simplex refinement of the top ``seeds`` points."""
    if points_per_dim is None:
        points_per_dim = default_points(len(box.dims))
    scan = grid_scan(objective, box, points_per_dim, workers=workers)
    evaluations = len(scan)
    grid_pt, grid_best = scan[0]
    best_pt, best_val = dict(grid_pt), grid_best
    first = True
    for pt, _ in scan[:seeds]:
        cand, val, nfev = refine(objective, pt, box)
        evaluations += nfev
        # later seeds must win by more than round-off, so symmetric twins
        # of the top seed do not displace it
        margin = 0.0 if first else TIE_MARGIN
        first = False
        if val > best_val + margin:
            best_pt, best_val = cand, val
    return ArgMaxResult(
        point=best_pt,
        value=best_val,
        grid_best=grid_best,
        evaluations=evaluations,
        grid_point=dict(grid_pt),
    )
