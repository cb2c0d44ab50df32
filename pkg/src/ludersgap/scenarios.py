"""Uniform access to the two scenarios by parameter name.

The CLI and the reproduction targets address both scenarios through flat
``{name: value}`` maps; this module turns those into ``LgiParams`` or
``NciParams``, builds objectives for the optimizer and runs sweeps.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence

import numpy as np

from . import lgi, nci
from .optim import Dim, ParamBox

__all__ = [
    "SCENARIOS",
    "PARAMS",
    "COMPONENTS",
    "DEFAULTS",
    "values",
    "correlators",
    "corrections",
    "evaluate_report",
    "objective",
    "param_box",
    "sweep",
]

SCENARIOS = ("lgi", "nci")
PARAMS = {
    "lgi": ("g1", "g2", "xi"),
    "nci": ("theta", "phi", "eps", "lam", "delta"),
}
COMPONENTS = {
    "lgi": ("k13", "k23", "k12"),
    "nci": ("b31", "b23", "b12"),
}
DEFAULTS = {"xi": 1.0, "eps": 1.0, "lam": 1.0, "delta": 1.0}

_TWO_PI = 2.0 * math.pi
_DOMAINS = {
    "g1": (-math.pi, math.pi, True),
    "g2": (-math.pi, math.pi, True),
    "g": (-math.pi, math.pi, True),
    "xi": (0.0, 1.0, False),
    "theta": (0.0, _TWO_PI, True),
    "phi": (0.0, _TWO_PI, True),
    "eps": (0.0, 1.0, False),
    "lam": (0.0, 1.0, False),
    "delta": (0.0, 1.0, False),
}


def _check_scenario(scenario: str) -> None:
    if scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")


def _params(scenario: str, p: Mapping[str, float], rule: str, state: str):
    _check_scenario(scenario)
    kw = {}
    for name in PARAMS[scenario]:
        if name in p:
            kw[name] = float(p[name])
        elif name in DEFAULTS:
            kw[name] = DEFAULTS[name]
        else:
            raise ValueError(f"missing parameter {name!r} for scenario {scenario!r}")
    if scenario == "lgi":
        return lgi.LgiParams(state=state, rule=rule, **kw)
    return nci.NciParams(rule=rule, **kw)


def values(scenario: str, p: Mapping[str, float], rule: str = "vn", state: str = "001") -> dict[str, float]:
    """The three inequality combinations (K for lgi, beta for nci)."""
    params = _params(scenario, p, rule, state)
    if scenario == "lgi":
        return lgi.k_values(params).as_dict()
    return nci.beta_values(params).as_dict()


def _pair_key(scenario: str, pair: tuple[int, int]) -> str:
    return ("c" if scenario == "lgi" else "a") + f"{pair[0]}{pair[1]}"


def correlators(scenario: str, p: Mapping[str, float], rule: str = "vn", state: str = "001") -> dict[str, float]:
    params = _params(scenario, p, rule, state)
    raw = lgi.lgi_correlators(params) if scenario == "lgi" else nci.nci_correlators(params)
    return {_pair_key(scenario, k): v for k, v in raw.items()}


def corrections(scenario: str, p: Mapping[str, float], state: str = "001") -> dict[str, float]:
    """Lüders-minus-von-Neumann gap of every pair correlator."""
    params = _params(scenario, p, "vn", state)
    raw = lgi.correction_terms(params) if scenario == "lgi" else nci.correction_terms(params)
    return {_pair_key(scenario, k): v for k, v in raw.items()}


def evaluate_report(scenario: str, p: Mapping[str, float], state: str = "001") -> dict[str, dict[str, float]]:
    """Both rules side by side, with the per-correlator gap.

    Keys of the returned map are ``luders``, ``vn`` and ``gap``; the rule
    entries hold both the combinations and the pair correlators.
    """
    out = {}
    for rule in ("luders", "vn"):
        out[rule] = {**values(scenario, p, rule, state), **correlators(scenario, p, rule, state)}
    out["gap"] = corrections(scenario, p, state)
    return out


def objective(
    scenario: str,
    component: str,
    fixed: Mapping[str, float] | None = None,
    rule: str = "vn",
    state: str = "001",
    equal_couplings: bool = False,
) -> Callable[[Mapping[str, float]], float]:
    """Single-valued objective over the free parameters.

    Parameters not in ``fixed`` are read from the point passed at call time.
    With ``equal_couplings`` the lgi objective takes one coordinate ``g``
    used for both ``g1`` and ``g2``.
    """
    _check_scenario(scenario)
    if component not in COMPONENTS[scenario]:
        raise ValueError(f"component must be one of {COMPONENTS[scenario]}, got {component!r}")
    base = dict(fixed or {})
    if equal_couplings and scenario != "lgi":
        raise ValueError("equal couplings apply to the lgi scenario only")
    # validate rule and state once, up front
    _params(scenario, {**{n: 0.0 for n in PARAMS[scenario]}, **base}, rule, state)

    if scenario == "lgi":
        def f(point):
            q = {**base, **point}
            if equal_couplings:
                q["g1"] = q["g2"] = q.pop("g")
            return getattr(lgi.k_values(_params("lgi", q, rule, state)), component)
    else:
        def f(point):
            return getattr(nci.beta_values(_params("nci", {**base, **point}, rule, state)), component)
    return f


def param_box(names: Sequence[str]) -> ParamBox:
    """Search box over the natural domain of each named parameter."""
    dims = []
    for n in names:
        if n not in _DOMAINS:
            raise ValueError(f"unknown parameter {n!r}")
        lo, hi, periodic = _DOMAINS[n]
        dims.append(Dim(n, lo, hi, periodic))
    return ParamBox(tuple(dims))


def sweep(
    scenario: str,
    base: Mapping[str, float],
    axis: str,
    start: float,
    stop: float,
    steps: int,
    rule: str = "vn",
    state: str = "001",
) -> tuple[list[str], list[list[float]]]:
    """Evaluate all three combinations along ``axis``.

    ``steps`` points are spaced evenly from ``start`` to ``stop`` inclusive.

    Returns
    -------
    header, rows
    """
    _check_scenario(scenario)
    if axis not in PARAMS[scenario]:
        raise ValueError(f"axis must be one of {PARAMS[scenario]} for {scenario!r}, got {axis!r}")
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    grid = np.linspace(start, stop, steps) if steps > 1 else np.array([float(start)])
    header = [axis, *COMPONENTS[scenario]]
    rows = []
    for x in grid:
        v = values(scenario, {**base, axis: float(x)}, rule, state)
        rows.append([float(x), *(v[c] for c in COMPONENTS[scenario])])
    return header, rows
