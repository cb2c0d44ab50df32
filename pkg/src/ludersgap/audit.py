"""Closed-form expressions checked against direct simulation.

Every closed form is evaluated at random parameter points and compared
with the density-matrix simulation.  A worst-case deviation above
``AUDIT_TOL`` marks the expression as a suspected transcription typo.
Expressions with a known slip are audited twice: as printed ("literal")
and with the minimal repair ("corrected").
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lgi, nci

__all__ = ["AUDIT_TOL", "AUDIT_SEED", "AuditEntry", "EQUATIONS", "audit", "audit_one"]

AUDIT_TOL = 1e-9
AUDIT_SEED = 20150
N_POINTS = 500

PI = math.pi


@dataclass(frozen=True)
class AuditEntry:
    name: str
    variant: str
    reference: str
    samples: int
    max_abs_dev: float
    worst_point: dict[str, float]

    @property
    def verdict(self) -> str:
        return "pass" if self.max_abs_dev <= AUDIT_TOL else "suspect-typo"

    def record(self) -> dict:
        return {
            "name": self.name,
            "variant": self.variant,
            "reference": self.reference,
            "samples": self.samples,
            "max_abs_dev": self.max_abs_dev,
            "verdict": self.verdict,
            "worst_point": dict(self.worst_point),
        }


def _lgi_points(rng, n, xi_free=True):
    g = rng.uniform(-PI, PI, size=(n, 2))
    xi = rng.uniform(0.0, 1.0, size=n) if xi_free else np.ones(n)
    return [{"g1": a, "g2": b, "xi": x} for (a, b), x in zip(g.tolist(), xi.tolist())]


def _nci_points(rng, n):
    ang = rng.uniform(0.0, 2 * PI, size=(n, 2))
    par = rng.uniform(0.0, 1.0, size=(n, 3))
    return [
        {"theta": t, "phi": f, "eps": e, "lam": l, "delta": d}
        for (t, f), (e, l, d) in zip(ang.tolist(), par.tolist())
    ]


def _k_sim(component: str, state: str = "001"):
    def sim(pt):
        return getattr(lgi.k_values(lgi.LgiParams(pt["g1"], pt["g2"], pt["xi"], state=state)), component)
    return sim


def _beta_sim(component: str, rule: str):
    def sim(pt):
        return getattr(nci.beta_values(nci.NciParams(rule=rule, **pt)), component)
    return sim


def _beta_vn(component: str, corrected: bool):
    def closed(pt):
        return getattr(nci.beta_vn_closed(nci.NciParams(**pt), corrected=corrected), component)
    return closed


def _beta_luders(component: str):
    def closed(pt):
        return float(getattr(nci.beta_luders_closed(pt["theta"], pt["phi"]), component))
    return closed


def _k_form(which: str, corrected: bool):
    def closed(pt):
        return lgi.k_closed_form(which, pt["g1"], pt["g2"], pt["xi"], corrected=corrected)
    return closed


def _xi1_points(rng, n):
    return _lgi_points(rng, n, xi_free=False)


def _k13_xi1(corrected: bool):
    def closed(pt):
        return lgi.k13_closed_xi1(pt["g1"], pt["g2"], corrected=corrected)
    return closed


def _equal_g_points(rng, n):
    g = rng.uniform(-PI, PI, size=n).tolist()
    return [{"g1": x, "g2": x, "xi": 1.0} for x in g]


_Sampler = Callable[[np.random.Generator, int], list]
_Fn = Callable[[dict], float]

# name -> (variant, sampler, closed form, reference label, reference)
EQUATIONS: dict[str, list[tuple[str, _Sampler, _Fn, str, _Fn]]] = {
    "k13_equal_g": [
        ("literal", _equal_g_points, lambda p: float(lgi.k13_closed_equal_g(p["g1"])), "simulation", _k_sim("k13")),
    ],
    "k13_xi1": [
        (v, _xi1_points, _k13_xi1(v == "corrected"), "simulation", _k_sim("k13"))
        for v in ("literal", "corrected")
    ],
    **{
        f"beta{c[1:]}_luders": [("literal", _nci_points, _beta_luders(c), "simulation", _beta_sim(c, "luders"))]
        for c in ("b31", "b23", "b12")
    },
    **{
        name: [
            (v, _lgi_points, _k_form(name, v == "corrected"), "simulation", _k_sim(comp, state))
            for v in ("literal", "corrected")
        ]
        for name, comp, state in (
            ("k13v", "k13", "001"),
            ("k23v", "k23", "001"),
            ("k12v", "k12", "001"),
            ("k12v2", "k12", "100"),
        )
    },
    **{
        f"beta{c[1:]}_vn": [
            (v, _nci_points, _beta_vn(c, v == "corrected"), "simulation", _beta_sim(c, "vn"))
            for v in ("literal", "corrected")
        ]
        for c in ("b31", "b23", "b12")
    },
    # the general K13 form must collapse onto the equal-coupling one at xi = 1
    "k13v_reduction": [
        (v, _equal_g_points, _k_form("k13v", v == "corrected"), "k13_equal_g",
         lambda p: float(lgi.k13_closed_equal_g(p["g1"])))
        for v in ("literal", "corrected")
    ],
}


def audit_one(name: str, variant: str, n_points: int = N_POINTS, seed: int = AUDIT_SEED) -> AuditEntry:
    for v, sampler, closed, ref_label, ref in EQUATIONS[name]:
        if v != variant:
            continue
        # one stream per equation, shared by its variants, so literal and
        # corrected forms see the same points
        index = list(EQUATIONS).index(name)
        rng = np.random.default_rng([seed, index])
        worst, worst_pt = -1.0, {}
        points = sampler(rng, n_points)
        for pt in points:
            dev = abs(closed(pt) - ref(pt))
            if not math.isfinite(dev):
                dev = math.inf
            if dev > worst:
                worst, worst_pt = dev, pt
        return AuditEntry(name, variant, ref_label, len(points), worst, worst_pt)
    raise ValueError(f"no {variant!r} variant for {name!r}")


def audit(n_points: int = N_POINTS, seed: int = AUDIT_SEED) -> list[AuditEntry]:
    """Audit every closed form and variant, in a fixed order."""
    return [
        audit_one(name, variant, n_points, seed)
        for name, variants in EQUATIONS.items()
        for variant, *_ in variants
    ]
