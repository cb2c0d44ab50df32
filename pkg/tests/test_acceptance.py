"""Acceptance criteria, one test per criterion.

A summary line per criterion is printed at the end of the pytest run (see
conftest.py).  Run on its own with ``pytest tests/test_acceptance.py`` or
``python tests/test_acceptance.py``.
"""

import math

import numpy as np
import pytest

from ludersgap import lgi, nci
from ludersgap.audit import AUDIT_TOL, audit
from ludersgap.measure import (
    LUDERS,
    EigenBasis,
    VonNeumann,
    measure_update,
    projectors_from_basis,
    sequential_correlation,
    vn_correction_term,
    ZeroProbabilityError,
)
from ludersgap.reproduce import ARGMAX_TOL, VALUE_TOL, reproduce

PI = math.pi
R2 = 1 / math.sqrt(2)


def _report(number, failures):
    status = "PASS" if not failures else "FAIL"
    print(f"criterion {number}: {status}")
    for f in failures:
        print("   ", f)
    assert not failures, "\n".join(failures)


@pytest.mark.criterion(1, "equal-coupling K13 simulation equals its closed form to 1e-9")
def test_criterion_1_equal_coupling_k13():
    gs = np.linspace(-PI, PI, 100)
    sim = np.array([lgi.k_values(lgi.LgiParams(g, g, 1.0, "001", "vn")).k13 for g in gs])
    dev = np.max(np.abs(sim - lgi.k13_closed_equal_g(gs)))
    _report(1, [] if dev <= 1e-9 else [f"max deviation {dev:.3g}"])


TABLE1 = {
    "K13 luders": 1.45, "K13 vn equal g": 1.75, "K13 vn": 1.91,
    "K23 luders": 1.0, "K23 vn equal g": 1.0, "K23 vn": 1.78,
    "K12 luders": 1.45, "K12 vn equal g": 1.0, "K12 vn": 1.44,
}


@pytest.mark.criterion(2, "table1 maxima within 0.01 and argmaxes within 0.02")
def test_criterion_2_table1():
    rep = reproduce("table1")
    assert [c.label for c in rep.checks] == list(TABLE1)
    failures = []
    for c in rep.checks:
        if abs(c.reproduced - TABLE1[c.label]) > VALUE_TOL:
            failures.append(f"{c.label}: max {c.reproduced:.6f} vs {TABLE1[c.label]}")
        if not c.argmax_ok:
            failures.append(
                f"{c.label}: argmax {c.argmax['g1']:.4f}, {c.argmax['g2']:.4f} is more than {ARGMAX_TOL} "
                f"from quoted {c.published_point['g1']:.4f}, {c.published_point['g2']:.4f} and its mirror; "
                f"value there {c.value_at_published_point:.6f} < max {c.reproduced:.6f}"
            )
    _report(2, failures)


@pytest.mark.criterion(3, "table2 values within 0.01 at the quoted points")
def test_criterion_3_table2():
    expected = {"K13 vn": 1.91, "K23 vn": 2.0, "K12 vn": 1.44}
    rep = reproduce("table2")
    failures = [
        f"{c.label}: {c.reproduced:.6f} vs {expected[c.label]}"
        for c in rep.checks
        if abs(c.reproduced - expected[c.label]) > VALUE_TOL
    ]
    _report(3, failures)


@pytest.mark.criterion(4, "K12 from |100> reaches 2 at g1 = g2 = pi, xi = 1/sqrt2")
def test_criterion_4_k12_state_100():
    k12 = lgi.k_values(lgi.LgiParams(PI, PI, R2, "100", "vn")).k12
    _report(4, [] if abs(k12 - 2.0) <= 0.005 else [f"k12 = {k12:.6f}"])


@pytest.mark.criterion(5, "table4 rows give 2 within 0.01 and maximize certifies >= 1.99")
def test_criterion_5_table4():
    rep = reproduce("table4")
    failures = []
    for c in rep.checks:
        if c.label.endswith("at row") and abs(c.reproduced - 2.0) > VALUE_TOL:
            failures.append(f"{c.label}: {c.reproduced:.6f} at {c.published_point}")
        if c.label.endswith("max") and c.reproduced < 1.99:
            failures.append(f"{c.label}: certified max only {c.reproduced:.6f}")
    _report(5, failures)


@pytest.mark.criterion(6, "Lüders ceilings and equal-coupling vn ceilings hold")
def test_criterion_6_luders_ceilings():
    failures = []
    gs = np.linspace(-PI, PI, 201)
    for state in lgi.STATES:
        worst = max(
            max(lgi.k_values(lgi.LgiParams(a, b, 1.0, state, "luders")).as_dict().values())
            for a in gs
            for b in gs
        )
        if worst > 1.5 + 1e-9:
            failures.append(f"Lüders K reaches {worst!r} for |{state}>")
    rng = np.random.default_rng(6)
    ang = rng.uniform(0, 2 * PI, size=(10_000, 2))
    worst_b = max(max(nci.beta_values(nci.NciParams(t, f, rule="luders")).as_dict().values()) for t, f in ang)
    if worst_b > 1 + 1e-9:
        failures.append(f"Lüders beta reaches {worst_b!r}")
    for g in gs:
        k = lgi.k_values(lgi.LgiParams(g, g, 1.0, "001", "vn"))
        if max(k.k23, k.k12) > 1 + 1e-9:
            failures.append(f"equal-coupling vn K23/K12 exceeds 1 at g={g!r}: {k}")
            break
    _report(6, failures)


def _random_unitary(rng, n=3):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_rho(rng):
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    r = z @ z.conj().T
    return r / np.trace(r).real


def _degenerate_pair(rng):
    """Two eigenbases of one random (-1, 1, 1) observable, differing in the +1 split."""
    q = _random_unitary(rng)
    coarse = EigenBasis(q, (-1.0, 1.0, 1.0))
    w = _random_unitary(rng, 2)
    fine = EigenBasis(np.vstack([q[:1], w @ q[1:]]), (-1.0, 1.0, 1.0))
    return coarse, fine


def _is_density_matrix(m):
    return (
        np.allclose(m, m.conj().T, atol=1e-12)
        and abs(np.trace(m).real - 1) <= 1e-12
        and np.linalg.eigvalsh(m)[0] >= -1e-10
    )


@pytest.mark.criterion(7, "update-rule identities on 1000 random instances each")
def test_criterion_7_update_rule_identities():
    rng = np.random.default_rng(7)
    worst = dict(decomposition=0.0, marginal=0.0, luders_basis_invariance=0.0, nondegenerate=0.0)
    bad_states = 0
    for _ in range(1000):
        rho = _random_rho(rng)
        coarse, fine = _degenerate_pair(rng)
        u = _random_unitary(rng)
        second_basis, _ = _degenerate_pair(rng)
        second = projectors_from_basis(second_basis)

        lud = sequential_correlation(rho, (coarse, LUDERS), u, second)
        vn = sequential_correlation(rho, (fine, VonNeumann(fine)), u, second)
        corr = vn_correction_term(rho, fine, u.conj().T @ second.observable() @ u)
        worst["decomposition"] = max(worst["decomposition"], abs(lud - vn - corr))

        lud_fine = sequential_correlation(rho, (fine, LUDERS), u, second)
        worst["luders_basis_invariance"] = max(worst["luders_basis_invariance"], abs(lud - lud_fine))

        for m in (-1.0, 1.0):
            try:
                pl, post_l = measure_update(rho, coarse, LUDERS, m)
                pv, post_v = measure_update(rho, fine, VonNeumann(fine), m)
            except ZeroProbabilityError:
                continue
            worst["marginal"] = max(worst["marginal"], abs(pl - pv))
            bad_states += not (_is_density_matrix(post_l.mat) and _is_density_matrix(post_v.mat))

        nd = EigenBasis(_random_unitary(rng), tuple(sorted(rng.uniform(-2, 2, size=3))))
        a = sequential_correlation(rho, (nd, LUDERS), u, second)
        b = sequential_correlation(rho, (nd, VonNeumann(nd)), u, second)
        worst["nondegenerate"] = max(worst["nondegenerate"], abs(a - b))

    failures = [f"{name}: worst deviation {v:.3g}" for name, v in worst.items() if v > 1e-12]
    if bad_states:
        failures.append(f"{bad_states} post-measurement states are not valid density matrices")
    _report(7, failures)


@pytest.mark.criterion(8, "closed-form audit: reference forms pass, every form gets a verdict")
def test_criterion_8_audit():
    entries = audit()
    by_key = {(e.name, e.variant): e for e in entries}
    failures = []
    for name in ("k13_equal_g", "beta31_luders", "beta23_luders", "beta12_luders"):
        e = by_key[(name, "literal")]
        if e.max_abs_dev > AUDIT_TOL:
            failures.append(f"{name}: deviation {e.max_abs_dev:.3g}")
    for e in entries:
        if e.verdict not in ("pass", "suspect-typo") or e.samples != 500:
            failures.append(f"{e.name}/{e.variant}: verdict {e.verdict}, samples {e.samples}")
    if by_key[("k13v_reduction", "corrected")].verdict != "pass":
        failures.append("corrected general K13 form does not reduce to the equal-coupling form")
    # determinism
    again = audit()
    if [e.record() for e in again] != [e.record() for e in entries]:
        failures.append("audit output differs between runs")
    _report(8, failures)


@pytest.mark.criterion(9, "figure sweeps reach 2 within 0.01")
def test_criterion_9_figure_data():
    failures = []
    f1 = reproduce("fig1")
    k23 = [row[2] for row in f1.data]
    i = int(np.argmax(k23))
    xi_peak = f1.data[i][0]
    if abs(k23[i] - 2.0) > VALUE_TOL or abs(xi_peak - R2) > ARGMAX_TOL:
        failures.append(f"xi sweep: k23 peaks at {k23[i]:.6f} at xi={xi_peak:.4f}")
    f2 = reproduce("fig2")
    for col, name in enumerate(("b31", "b23", "b12"), start=1):
        peak = max(row[col] for row in f2.data)
        if abs(peak - 2.0) > VALUE_TOL:
            failures.append(f"theta sweep: {name} peaks at {peak:.6f}")
    _report(9, failures)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
