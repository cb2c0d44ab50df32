"""Published maxima and figure data, recomputed with pass/fail checks.

Each target returns a :class:`Reproduction`: a list of :class:`Check` rows
comparing a published number with the recomputed one, plus the raw sweep
data for the figure targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import scenarios
from .optim import maximize

__all__ = [
    "TARGETS",
    "VALUE_TOL",
    "ARGMAX_TOL",
    "Check",
    "Reproduction",
    "argmax_matches",
    "reproduce",
    "table1",
    "table2",
    "table4",
    "fig1",
    "fig2",
]

TARGETS = ("table1", "table2", "table4", "fig1", "fig2")
VALUE_TOL = 0.01
ARGMAX_TOL = 0.02
# value gap below which a quoted point counts as a maximizer in its own right
PLATEAU_TOL = 1e-9
CERTIFY_FLOOR = 1.99

PI = math.pi
R2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Check:
    """One published number against its recomputation.

    ``argmax_ok`` is ``None`` where no location is being checked.
    """

    label: str
    published_value: float
    reproduced: float
    tolerance: float
    published_point: dict[str, float]
    argmax: dict[str, float]
    value_at_published_point: float
    argmax_ok: bool | None = None
    floor: float | None = None

    @property
    def abs_deviation(self) -> float:
        return abs(self.reproduced - self.published_value)

    @property
    def passed(self) -> bool:
        if self.floor is not None:
            ok = self.reproduced >= self.floor
        else:
            ok = self.abs_deviation <= self.tolerance
        return ok and self.argmax_ok is not False

    def record(self) -> dict:
        return {
            "label": self.label,
            "published_value": self.published_value,
            "reproduced": self.reproduced,
            "abs_deviation": self.abs_deviation,
            "tolerance": self.tolerance,
            "value_at_published_point": self.value_at_published_point,
            "published_point": dict(self.published_point),
            "argmax": dict(self.argmax),
            "argmax_ok": self.argmax_ok,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class Reproduction:
    target: str
    checks: list[Check]
    header: list[str] = field(default_factory=list)
    data: list[list[float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _wrap(x: float) -> float:
    return (x + PI) % (2 * PI) - PI


def argmax_matches(
    found: Mapping[str, float],
    quoted: Mapping[str, float],
    value_at_quoted: float,
    best: float,
    tol: float = ARGMAX_TOL,
) -> bool:
    """Whether an optimizer's argmax agrees with a quoted coupling point.

    Accepts ``found`` within ``tol`` (per coordinate, mod 2 pi) of ``quoted``
    or of its mirror ``-quoted``, which has the same K values.  A quoted
    point that itself reaches ``best`` also passes, since a flat maximum has
    no unique location.
    """
    if best - value_at_quoted <= PLATEAU_TOL:
        return True
    for sign in (1.0, -1.0):
        if all(abs(_wrap(found[k] - sign * quoted[k])) <= tol for k in quoted):
            return True
    return False


# label, component, rule, equal couplings, published max, quoted (g1, g2)
_TABLE1 = (
    ("K13 luders", "k13", "luders", False, 1.45, (PI / 2, PI / 4)),
    ("K13 vn equal g", "k13", "vn", True, 1.75, (1.31, 1.31)),
    ("K13 vn", "k13", "vn", False, 1.91, (0.98, 1.85)),
    ("K23 luders", "k23", "luders", False, 1.0, (PI, PI)),
    ("K23 vn equal g", "k23", "vn", True, 1.0, (PI, PI)),
    ("K23 vn", "k23", "vn", False, 1.78, (-PI / 3, 2 * PI / 3)),
    ("K12 luders", "k12", "luders", False, 1.45, (3 * PI / 4, -PI / 4)),
    ("K12 vn equal g", "k12", "vn", True, 1.0, (PI, PI)),
    ("K12 vn", "k12", "vn", False, 1.44, (2.41, -0.73)),
)


def table1(points_per_dim: int | None = None) -> Reproduction:
    """Maxima over the couplings at ``xi = 1`` for ``|001>``."""
    checks = []
    for label, comp, rule, equal, published, (q1, q2) in _TABLE1:
        f = scenarios.objective("lgi", comp, {"xi": 1.0}, rule=rule, equal_couplings=equal)
        if equal:
            res = maximize(f, scenarios.param_box(["g"]), points_per_dim)
            found = {"g1": res.point["g"], "g2": res.point["g"]}
            at_quoted = f({"g": q1})
        else:
            res = maximize(f, scenarios.param_box(["g1", "g2"]), points_per_dim)
            found = res.point
            at_quoted = f({"g1": q1, "g2": q2})
        quoted = {"g1": q1, "g2": q2}
        checks.append(
            Check(
                label=label,
                published_value=published,
                reproduced=res.value,
                tolerance=VALUE_TOL,
                published_point=quoted,
                argmax=found,
                value_at_published_point=at_quoted,
                argmax_ok=argmax_matches(found, quoted, at_quoted, res.value),
            )
        )
    return Reproduction("table1", checks)


# label, component, state, published value, (g1, g2, xi)
_TABLE2 = (
    ("K13 vn", "k13", "001", 1.91, (0.98, 1.85, 1.0)),
    ("K23 vn", "k23", "001", 2.0, (PI, PI, R2)),
    ("K12 vn", "k12", "001", 1.44, (2.41, -0.73, 1.0)),
)


def table2(points_per_dim: int | None = None) -> Reproduction:
    """Values at the quoted ``(g1, g2, xi)`` and the coupling maxima at that ``xi``.

    The reported value is the value at the quoted point; the optimizer's
    maximum at the same ``xi`` must also lie within tolerance.
    """
    checks = []
    for label, comp, state, published, (g1, g2, xi) in _TABLE2:
        f = scenarios.objective("lgi", comp, {"xi": xi}, state=state)
        at_quoted = f({"g1": g1, "g2": g2})
        res = maximize(f, scenarios.param_box(["g1", "g2"]), points_per_dim)
        checks.append(
            Check(
                label=label,
                published_value=published,
                reproduced=at_quoted,
                tolerance=VALUE_TOL,
                published_point={"g1": g1, "g2": g2, "xi": xi},
                argmax={**res.point, "xi": xi},
                value_at_published_point=at_quoted,
                argmax_ok=abs(res.value - published) <= VALUE_TOL,
            )
        )
    return Reproduction("table2", checks)


# label, component, published value, (phi, theta, eps, lam, delta)
_TABLE4 = (
    ("b31 vn", "b31", 2.0, (PI / 2, 0.0, 0.0, 0.1, 0.7)),
    ("b23 vn", "b23", 2.0, (PI / 4, PI / 2, 0.7, 1.0, 0.7)),
    ("b12 vn", "b12", 2.0, (3 * PI / 4, PI / 2, 1.0, 1.0, 1.0)),
)
_NCI_FREE = ("theta", "phi", "eps", "lam", "delta")


def _row_point(row) -> dict[str, float]:
    phi, theta, eps, lam, delta = row
    return {"theta": theta, "phi": phi, "eps": eps, "lam": lam, "delta": delta}


def table4(points_per_dim: int | None = None) -> Reproduction:
    """von Neumann beta at the quoted rows, plus a certified maximum.

    Each inequality contributes two checks: the value at its quoted row
    (within tolerance of 2) and the optimizer's maximum over all five
    parameters (at least 1.99).
    """
    checks = []
    for label, comp, published, row in _TABLE4:
        point = _row_point(row)
        f = scenarios.objective("nci", comp)
        at_quoted = f(point)
        checks.append(
            Check(
                label=f"{label} at row",
                published_value=published,
                reproduced=at_quoted,
                tolerance=VALUE_TOL,
                published_point=point,
                argmax=point,
                value_at_published_point=at_quoted,
            )
        )
        res = maximize(f, scenarios.param_box(_NCI_FREE), points_per_dim)
        checks.append(
            Check(
                label=f"{label} max",
                published_value=published,
                reproduced=res.value,
                tolerance=VALUE_TOL,
                published_point=point,
                argmax=res.point,
                value_at_published_point=at_quoted,
                floor=CERTIFY_FLOOR,
            )
        )
    return Reproduction("table4", checks)


FIG1_COUPLINGS = {"k13": (0.98, 1.85, "001"), "k23": (PI, PI, "001"), "k12": (PI, PI, "100")}


def fig1(steps: int = 101) -> Reproduction:
    """K values against ``xi`` in ``[0, 1]``.

    ``k13`` and ``k23`` use ``|001>`` at their table couplings; ``k12`` uses
    ``|100>`` at ``g1 = g2 = pi``, where it also peaks at 2.
    """
    xs = np.linspace(0.0, 1.0, steps)
    cols = {}
    for comp, (g1, g2, state) in FIG1_COUPLINGS.items():
        f = scenarios.objective("lgi", comp, {"g1": g1, "g2": g2}, state=state)
        cols[comp] = [f({"xi": float(x)}) for x in xs]
    header = ["xi", "k13", "k23", "k12"]
    data = [[float(x), cols["k13"][i], cols["k23"][i], cols["k12"][i]] for i, x in enumerate(xs)]

    checks = []
    for comp in ("k23", "k12"):
        i = int(np.argmax(cols[comp]))
        g1, g2, _ = FIG1_COUPLINGS[comp]
        at_quoted = scenarios.objective("lgi", comp, {"g1": g1, "g2": g2}, state=FIG1_COUPLINGS[comp][2])({"xi": R2})
        checks.append(
            Check(
                label=f"{comp} peak over xi",
                published_value=2.0,
                reproduced=cols[comp][i],
                tolerance=VALUE_TOL,
                published_point={"xi": R2},
                argmax={"xi": float(xs[i])},
                value_at_published_point=at_quoted,
                argmax_ok=abs(float(xs[i]) - R2) <= ARGMAX_TOL,
            )
        )
    return Reproduction("fig1", checks, header, data)


def fig2(steps: int = 361) -> Reproduction:
    """von Neumann beta against ``theta`` in ``[0, 2 pi]``, each at its table row."""
    ts = np.linspace(0.0, 2 * PI, steps)
    cols = {}
    checks = []
    for label, comp, published, row in _TABLE4:
        point = _row_point(row)
        f = scenarios.objective("nci", comp, {k: v for k, v in point.items() if k != "theta"})
        cols[comp] = [f({"theta": float(t)}) for t in ts]
        i = int(np.argmax(cols[comp]))
        checks.append(
            Check(
                label=f"{comp} peak over theta",
                published_value=published,
                reproduced=cols[comp][i],
                tolerance=VALUE_TOL,
                published_point=point,
                argmax={"theta": float(ts[i])},
                value_at_published_point=f({"theta": point["theta"]}),
            )
        )
    header = ["theta", "b31", "b23", "b12"]
    data = [[float(t), cols["b31"][i], cols["b23"][i], cols["b12"][i]] for i, t in enumerate(ts)]
    return Reproduction("fig2", checks, header, data)


def reproduce(target: str, steps: int | None = None, points_per_dim: int | None = None) -> Reproduction:
    if target == "table1":
        return table1(points_per_dim)
    if target == "table2":
        return table2(points_per_dim)
    if target == "table4":
        return table4(points_per_dim)
    if target == "fig1":
        return fig1(steps or 101)
    if target == "fig2":
        return fig2(steps or 361)
    raise ValueError(f"target must be one of {TARGETS}, got {target!r}")
