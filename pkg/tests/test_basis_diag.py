import math

import numpy as np
import pytest

from jumpspec.basis_diag import (
    BlowupRow, ProjNormRecord, Which, blowup_probe, expansion_residuals,
    generic_norm_median, proj_norm_zero_generic, projection_norm,
    rational_bound_check, random_smooth_probe, truncated_completeness,
)
from jumpspec.eigensystem import biorthogonalize, generalized_xi
from jumpspec.param import NotIrrational, ParamA
from jumpspec.spectrum import SpectralCase, enumerate_spectrum


def record_at(a, lam, lam_max=100.0):
    for r in enumerate_spectrum(a, lam_max):
        if abs(r.lam - lam) < 1e-9:
            return r
    raise LookupError(lam)


# ---------------------------------------------------------------------------
# projection norms
# ---------------------------------------------------------------------------

def test_zero_eigenvalue_norm():
    for expr in ("0", "1/3", "sqrt(2)-1"):
        a = ParamA.from_expr(expr)
        (rec,) = projection_norm(record_at(a, 0.0), a)
        assert rec.closed_form == pytest.approx(math.sqrt(4 / 3), abs=1e-12)
        assert abs(rec.closed_form - rec.quadrature) / rec.closed_form < 1e-8


def test_exceptional_odd_norm_is_one():
    a = ParamA.from_expr("0")
    (rec,) = projection_norm(record_at(a, 4.0), a)
    assert rec.closed_form == 1.0
    assert rec.quadrature == pytest.approx(1.0, abs=1e-8)


def test_exceptional_triple_norms():
    a = ParamA.from_expr("1/3")
    recs = projection_norm(record_at(a, 36.0), a)
    assert [r.which for r in recs] == [Which.P1, Which.P2, Which.P3]
    assert recs[0].closed_form == pytest.approx(math.sqrt(2 / (1 - a.value)))
    assert recs[0].closed_form == pytest.approx(math.sqrt(3.0))
    for r in recs:
        assert abs(r.closed_form - r.quadrature) / r.closed_form < 1e-8
        assert r.closed_form >= 1.0


def test_all_norms_dominate_one():
    for expr in ("1/3", "2/5", "sqrt(2)-1"):
        a = ParamA.from_expr(expr)
        for rec in enumerate_spectrum(a, 500.0):
            for pn in projection_norm(rec, a):
                assert pn.closed_form >= 1.0 - 1e-12
                assert abs(pn.closed_form - pn.quadrature) / pn.closed_form < 1e-8


def test_triple_norm_large_m_limits():
    # the P2 and P3 norms tend to explicit constants as the family index
    # grows: sqrt(16 pi^2 (1+a))/(2 sqrt(3) pi sqrt(1+a)) = 2/sqrt(3) and
    # sqrt(64 pi^2)/(2 sqrt(6) pi sqrt(1+a)(1-a))
    rng = np.random.default_rng(0)
    from util import rational_exceptional_config
    a, m, t = rational_exceptional_config(rng)
    av = a.value
    from jumpspec.basis_diag import _proj_norms_exceptional
    _, p2, p3 = _proj_norms_exceptional(a, 1000)
    lim2 = 2 / math.sqrt(3.0)
    lim3 = 8 * math.pi / (2 * math.sqrt(6.0) * math.pi * math.sqrt(1 + av) * (1 - av))
    assert p2 == pytest.approx(lim2, rel=0.01)
    assert p3 == pytest.approx(lim3, rel=0.01)


# ---------------------------------------------------------------------------
# blow-up along convergents
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("expr", ["sqrt(2)-1", "(sqrt(5)-1)/2", "1/pi"])
def test_blowup_running_max(expr):
    a = ParamA.from_expr(expr)
    rows = blowup_probe(a, 10)
    median = generic_norm_median(a)
    running_max = 0.0
    exceeded_at = None
    for row in rows:
        running_max = max(running_max, row.norm)
        if exceeded_at is None and running_max > 10 * median:
            exceeded_at = row.k
    assert exceeded_at is not None and exceeded_at < 10
    # envelope grows: last running max dominates the first row
    assert running_max > rows[0].norm


def test_blowup_sqrt2_values():
    a = ParamA.from_expr("sqrt(2)-1")
    rows = blowup_probe(a, 5)
    by_q = {r.q: r for r in rows}
    assert by_q[29].norm > 10           # exceeds 10 by q = 29
    assert by_q[12].norm > 10
    for r in rows:
        # Dirichlet-bound consistency: 1 - cos < (2 pi / q)^2 / 2
        assert r.one_minus_cos < (2 * math.pi / r.q) ** 2 / 2
        assert r.m == 2 * r.q
        # growth at least ~ q/(pi sqrt(2))
        assert r.norm >= r.q / (math.pi * math.sqrt(2.0))


def test_blowup_requires_irrational():
    with pytest.raises(NotIrrational):
        blowup_probe(ParamA.from_expr("1/3"), 5)


def test_generic_norms_stay_moderate_off_the_sequence():
    a = ParamA.from_expr("sqrt(2)-1")
    special = {2 * c.q for c in __import__("jumpspec.param", fromlist=["convergents"]).convergents(a, 8)}
    norms = [proj_norm_zero_generic(a, m) for m in range(1, 60) if m not in special]
    assert float(np.median(norms)) < 10.0


# ---------------------------------------------------------------------------
# rational bounds
# ---------------------------------------------------------------------------

def test_rational_bounds_one_third():
    a = ParamA.from_expr("1/3")
    rep = rational_bound_check(a, 120)
    assert rep["estimates_hold"]
    assert rep["within_bounds"]
    assert rep["bounds"]["zero"] == pytest.approx(3 * math.sqrt(2) / 2)
    assert rep["vacuous"]["minus"]  # every -1-class index is exceptional here


def test_rational_bounds_a_zero_vacuous():
    rep = rational_bound_check(ParamA.from_expr("0"), 50)
    assert all(rep["vacuous"].values())
    assert rep["within_bounds"]


@pytest.mark.parametrize("pq", [(2, 5), (-1, 4), (3, 7), (1, 6)])
def test_rational_bounds_various(pq):
    rep = rational_bound_check(ParamA.from_fraction(*pq), 150)
    assert rep["estimates_hold"] and rep["within_bounds"]


# ---------------------------------------------------------------------------
# truncated completeness
# ---------------------------------------------------------------------------

def test_residuals_decrease_for_smooth_probes():
    a = ParamA.from_expr("sqrt(2)-1")
    rep = truncated_completeness(a, 100, 3, seed=2024)
    n_lo, n_hi = 25, 100
    for name, res in rep["residuals"].items():
        if name == "family_member":
            assert res[n_hi] < 1e-9
        else:
            assert res[n_hi] < res[n_lo]


def test_family_member_reproduced_exactly():
    a = ParamA.from_expr("2/5")
    pairs = biorthogonalize(a, 600.0)
    member = pairs[5].psi.fn
    res = expansion_residuals(member, pairs, [6, 10])
    assert res[6] < 1e-9 and res[10] < 1e-9


def test_excluding_generalized_vectors_blocks_completeness():
    a = ParamA.from_expr("1/3")
    pairs = biorthogonalize(a, 4.0 * 44 ** 2)[:48]
    rec = record_at(a, 36.0)
    xi = generalized_xi(rec, a).fn
    full = expansion_residuals(xi, pairs, [12, 24, 48], include_generalized=True)
    reduced = expansion_residuals(xi, pairs, [12, 24, 48], include_generalized=False)
    assert full[48] < 1e-9
    from jumpspec.funcspace import norm_l2
    floor = norm_l2(xi)
    for n_cut in (12, 24, 48):
        assert reduced[n_cut] == pytest.approx(floor, rel=1e-6)


def test_truncation_cap():
    with pytest.raises(ValueError):
        truncated_completeness(ParamA.from_expr("sqrt(2)-1"), 500, 1)
