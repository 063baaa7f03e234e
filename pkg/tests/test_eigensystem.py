import math

import numpy as np
import pytest

from jumpspec.eigensystem import (
    BiorthPair, CaseMismatch, DegenerateNormalization, Rank, Side,
    biorthogonalize, eigenfunctions_H, eigenfunctions_Hstar, family_to_json,
    generalized_eta, generalized_xi, gram_matrix, pairing_eta_psi2,
    pairing_minus_exceptional, pairing_minus_generalised,
    pairing_minus_generic, pairing_plus_generic, pairing_zero_generic,
    pairing_zero_odd, pairing_zero_zero, phi_zero_mode, root_system,
)
from jumpspec.funcspace import (
    PiecewiseTrig, inner_closed, norm_l2, validate_domain_H,
    validate_domain_Hstar,
)
from jumpspec.param import ParamA
from jumpspec.spectrum import SpectralCase, enumerate_spectrum

from util import rational_exceptional_config

HALF_PI = math.pi / 2


def record_at(a, lam, lam_max=100.0):
    for r in enumerate_spectrum(a, lam_max):
        if abs(r.lam - lam) < 1e-9:
            return r
    raise LookupError(lam)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def test_generic_zero_class_eigenfunction_shape():
    a = ParamA.from_expr("1/3")
    psi = eigenfunctions_H(record_at(a, 4.0), a)[0]
    xs = np.linspace(-HALF_PI, HALF_PI, 64)
    expected = np.cos(2 * xs) - math.sqrt(3) * np.sin(2 * xs)
    assert np.allclose(psi.fn(xs), expected, atol=1e-12)


def test_zero_eigenvalue_is_constant():
    a = ParamA.from_expr("2/5")
    psi = eigenfunctions_H(record_at(a, 0.0), a)[0]
    xs = np.linspace(-HALF_PI, HALF_PI, 32)
    assert np.allclose(psi.fn(xs), 1.0)


def test_exceptional_odd_is_pure_sine():
    a = ParamA.from_expr("0")
    psi = eigenfunctions_H(record_at(a, 4.0), a)[0]
    xs = np.linspace(-HALF_PI, HALF_PI, 64)
    assert np.allclose(psi.fn(xs), np.sin(2 * xs), atol=1e-14)


def test_adjoint_tent():
    a = ParamA.from_expr("0")
    phi = eigenfunctions_Hstar(record_at(a, 0.0), a)[0]
    assert phi.fn.one_sided(0.0, -1) == pytest.approx(-HALF_PI)
    assert phi.fn.one_sided(0.0, +1) == pytest.approx(-HALF_PI)


def test_adjoint_exceptional_pair_one_sided_sines():
    a = ParamA.from_expr("1/3")
    rec = record_at(a, 36.0)
    phi1, phi2 = eigenfunctions_Hstar(rec, a)
    xb = HALF_PI / 3
    xs_left = np.linspace(-HALF_PI, xb - 1e-9, 16)
    xs_right = np.linspace(xb + 1e-9, HALF_PI, 16)
    assert np.allclose(phi1.fn(xs_left), 0.0)
    assert np.allclose(phi1.fn(xs_right), np.sin(6 * (xs_right - HALF_PI)), atol=1e-12)
    assert np.allclose(phi2.fn(xs_right), 0.0)
    assert np.allclose(phi2.fn(xs_left), np.sin(6 * (xs_left + HALF_PI)), atol=1e-12)


def test_adjoint_plus_generic_at_sqrt2():
    a = ParamA.from_expr("sqrt(2)-1")
    rec = record_at(a, 8.0)
    phi = eigenfunctions_Hstar(rec, a)[0]
    k = 4 / (1 + a.value)
    xs = np.linspace(-HALF_PI, HALF_PI * a.value - 1e-9, 24)
    assert np.allclose(phi.fn(xs), np.sin(k * (xs + HALF_PI)), atol=1e-12)


def test_every_eigenfunction_passes_its_validator():
    for expr in ("1/3", "0", "2/5", "sqrt(2)-1"):
        a = ParamA.from_expr(expr)
        for rec in enumerate_spectrum(a, 120.0):
            for ef in eigenfunctions_H(rec, a):
                assert validate_domain_H(ef.fn, a).in_domain, (expr, rec.lam)
            for ef in eigenfunctions_Hstar(rec, a):
                assert validate_domain_Hstar(ef.fn, a).in_domain, (expr, rec.lam)


def test_eigen_residuals():
    for expr in ("1/3", "sqrt(2)-1"):
        a = ParamA.from_expr(expr)
        for rec in enumerate_spectrum(a, 120.0):
            for ef in eigenfunctions_H(rec, a) + eigenfunctions_Hstar(rec, a):
                resid = ef.fn.derivative(2).scaled(-1.0) - ef.fn.scaled(rec.lam)
                assert norm_l2(resid) < 1e-12 * max(1.0, rec.lam)


def test_case_mismatch_errors():
    a13 = ParamA.from_expr("1/3")
    airr = ParamA.from_expr("sqrt(2)-1")
    rec = record_at(a13, 36.0)
    with pytest.raises(CaseMismatch):
        eigenfunctions_H(rec, airr)
    simple = record_at(a13, 4.0)
    with pytest.raises(CaseMismatch):
        generalized_xi(simple, a13)
    with pytest.raises(CaseMismatch):
        generalized_eta(simple, a13)


# ---------------------------------------------------------------------------
# generalized vectors and the Jordan chain
# ---------------------------------------------------------------------------

def test_xi_solves_the_chain_equation():
    a = ParamA.from_expr("0")
    rec = record_at(a, 16.0)
    psi1, psi2 = eigenfunctions_H(rec, a)
    xi = generalized_xi(rec, a)
    # at a = 0 the root vector is -(cos 4x + 8x sin 4x)/64
    xs = np.linspace(-HALF_PI, HALF_PI, 64)
    expected = -(np.cos(4 * xs) + 8 * xs * np.sin(4 * xs)) / 64
    assert np.allclose(xi.fn(xs), expected, atol=1e-14)
    resid = (xi.fn.derivative(2).scaled(-1.0) - xi.fn.scaled(rec.lam)) - psi2.fn
    assert norm_l2(resid) < 1e-10
    assert validate_domain_H(xi.fn, a).in_domain


def test_jordan_chain_terminates():
    a = ParamA.from_expr("1/3")
    rec = record_at(a, 36.0)
    psi2 = eigenfunctions_H(rec, a)[1]
    xi = generalized_xi(rec, a)
    apply_once = lambda f: (f.derivative(2).scaled(-1.0) - f.scaled(rec.lam))
    assert norm_l2(apply_once(psi2.fn)) < 1e-9
    assert norm_l2(apply_once(apply_once(xi.fn))) < 1e-9


def test_eta_constraint_and_equation():
    a = ParamA.from_expr("1/3")
    rec = record_at(a, 36.0)
    eta = generalized_eta(rec, a)
    am, ap = eta.constants["A_minus"], eta.constants["A_plus"]
    assert am * (1 + a.value) == pytest.approx(-ap * (1 - a.value), abs=1e-14)
    assert validate_domain_Hstar(eta.fn, a).in_domain
    phi1, phi2 = eigenfunctions_Hstar(rec, a)
    rhs = phi1.fn.scaled(ap) + phi2.fn.scaled(am)
    resid = (eta.fn.derivative(2).scaled(-1.0) - eta.fn.scaled(rec.lam)) - rhs
    assert norm_l2(resid) < 1e-10


def test_eta_requires_the_admissibility_constraint():
    # same functional form with unconstrained constants violates the
    # adjoint-domain derivative-jump identity
    a = ParamA.from_expr("1/3")
    rec = record_at(a, 36.0)
    eta = generalized_eta(rec, a)
    bad = PiecewiseTrig((eta.fn.pieces[0],
                         type(eta.fn.pieces[1])(eta.fn.pieces[1].lo,
                                                eta.fn.pieces[1].hi,
                                                tuple(t for t in eta.fn.pieces[0].terms))))
    assert not validate_domain_Hstar(bad, a).in_domain


# ---------------------------------------------------------------------------
# printed pairings vs independent integration
# ---------------------------------------------------------------------------

def test_minus_generic_pairing_formula():
    a = ParamA.from_expr("sqrt(2)-1")
    m = 1
    rec = record_at(a, (4 / (1 - a.value)) ** 2)
    psi = eigenfunctions_H(rec, a)[0]
    phi = eigenfunctions_Hstar(rec, a)[0]
    assert inner_closed(phi.fn, psi.fn) == pytest.approx(
        pairing_minus_generic(a, m), abs=1e-13)


def test_zero_zero_pairing_formula():
    for expr in ("0", "1/3", "sqrt(2)-1"):
        a = ParamA.from_expr(expr)
        rec = record_at(a, 0.0)
        psi = eigenfunctions_H(rec, a)[0]
        phi = eigenfunctions_Hstar(rec, a)[0]
        assert inner_closed(phi.fn, psi.fn) == pytest.approx(
            pairing_zero_zero(a), abs=1e-13)
        assert pairing_zero_zero(a) == pytest.approx(
            -math.pi ** 2 / 4 * (1 - a.value ** 2))


def test_exceptional_pairings_and_orthogonality():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a, m, t = rational_exceptional_config(rng)
        lam = (4 * m / (1 - a.value)) ** 2
        rec = record_at(a, lam, lam_max=lam + 1)
        psi1, psi2, xi, phi1, phi2, eta = root_system(rec, a)
        p11, p21 = pairing_minus_exceptional(a, m)
        assert inner_closed(phi1.fn, psi1.fn) == pytest.approx(p11, rel=1e-11)
        assert inner_closed(phi2.fn, psi1.fn) == pytest.approx(p21, rel=1e-11)
        assert abs(inner_closed(phi1.fn, psi2.fn)) < 1e-12
        assert abs(inner_closed(phi2.fn, psi2.fn)) < 1e-12
        g1, g2 = pairing_minus_generalised(a, m)
        assert inner_closed(phi1.fn, xi.fn) == pytest.approx(g1, rel=1e-11)
        assert inner_closed(phi2.fn, xi.fn) == pytest.approx(g2, rel=1e-11)
        assert inner_closed(eta.fn, psi2.fn) == pytest.approx(
            pairing_eta_psi2(a, m), rel=1e-11)


# ---------------------------------------------------------------------------
# biorthogonal family
# ---------------------------------------------------------------------------

def test_gram_identity_irrational():
    a = ParamA.from_expr("sqrt(2)-1")
    pairs = biorthogonalize(a, 4000.0)[:30]
    g = gram_matrix(pairs)
    assert np.max(np.abs(g - np.eye(30))) < 1e-9


def test_gram_identity_root_block():
    a = ParamA.from_expr("1/3")
    pairs = biorthogonalize(a, 40.0)
    g = gram_matrix(pairs)
    assert np.max(np.abs(g - np.eye(len(pairs)))) < 1e-9
    # the 3x3 root block sits at the top eigenvalue
    root = [p for p in pairs if p.psi.record.lam == pytest.approx(36.0)]
    assert len(root) == 3
    labels = [p.psi.label for p in root]
    assert labels == ["psi1", "psi2", "xi"]


def test_pairing_fields_are_normalized():
    a = ParamA.from_expr("2/5")
    for pair in biorthogonalize(a, 200.0):
        assert pair.pairing == pytest.approx(1.0, abs=1e-9)


def test_gauge_invariance_of_biorthogonality():
    a = ParamA.from_expr("sqrt(2)-1")
    pairs = biorthogonalize(a, 60.0)
    c = 2.0 - 1.5j
    for p in pairs[:4]:
        psi_scaled = p.psi.fn.scaled(c)
        phi_scaled = p.phi.fn.scaled(1.0 / np.conj(c))
        assert inner_closed(phi_scaled, psi_scaled) == pytest.approx(1.0, abs=1e-10)


def test_forward_members_keep_printed_shape():
    a = ParamA.from_expr("sqrt(2)-1")
    pairs = biorthogonalize(a, 30.0)
    lam4 = next(p for p in pairs if abs(p.psi.record.lam - 4.0) < 1e-12)
    xs = np.linspace(-HALF_PI, HALF_PI, 33)
    av = a.value
    coef = ((math.cos(math.pi) - math.cos(math.pi * av))
            / math.sin(math.pi * av))
    assert np.allclose(lam4.psi.fn(xs), np.cos(2 * xs) + coef * np.sin(2 * xs),
                       atol=1e-12)


def test_family_json_export():
    a = ParamA.from_expr("1/3")
    text = family_to_json(biorthogonalize(a, 40.0))
    assert '"label": "xi"' in text and '"pairing"' in text
