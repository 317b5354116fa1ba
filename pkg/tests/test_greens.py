import numpy as np
import pytest
from mpmath import mp

from hlab import curves, profiles
from hlab.errors import DomainError, TruncationError
from hlab.greens import (GreensFamily, offdiag_pair_greens, offdiag_term, pair_greens_along_curve,
                         pair_greens_many, product_pair_greens, riesz_terms)

G = profiles.odd_part(profiles.product(profiles.polynomial([1, 0.4]), profiles.rescale(profiles.odd_bump(), 0.9)))


def _g(t):
    return float(G(np.array([float(t)], dtype=np.longdouble))[0])


def _kernel_d2(zeta, gam):
    # retarded propagator of box - zeta in two dimensions is I0(sqrt(zeta Gamma)) / 2
    return mp.besseli(0, mp.sqrt(zeta * gam)) if zeta >= 0 else mp.besselj(0, mp.sqrt(-zeta * gam))


def _kernel_d3(zeta, gam):
    s = mp.sqrt(abs(zeta) * gam)
    return (mp.cosh(s) if zeta >= 0 else mp.cos(s)) / (mp.pi * mp.sqrt(gam))


CURVES = {"straight": (lambda d: curves.StraightLine(d), lambda t: t * t),
          "hyperbolic": (lambda d: curves.HyperbolicCurve(d), lambda t: 4 * mp.sinh(t / 2) ** 2)}


@pytest.mark.parametrize("d, kernel", [(2, _kernel_d2), (3, _kernel_d3)])
@pytest.mark.parametrize("shape", ["straight", "hyperbolic"])
@pytest.mark.parametrize("mu, z", [(0.0, 0.0), (1.0, 0.5), (0.0, -2.0)])
def test_closed_form_propagators(d, kernel, shape, mu, z):
    make, gamma_of_t = CURVES[shape]
    fam = GreensFamily.klein_gordon(d, mu)
    zeta = mp.mpf(mu) + mp.mpf(z)
    got = pair_greens_along_curve(fam, z, make(d), G)
    ref = mp.quad(lambda t: kernel(zeta, gamma_of_t(t)) * _g(t), [0, 0.3, 0.6, 0.9])
    assert abs(got - ref) <= 1e-13 * abs(ref)


def test_d4_function_terms():
    w = curves.StraightLine(4)
    terms = riesz_terms(4, w, G, 2)
    m0 = mp.quad(_g, [0, 0.45, 0.9])
    m2 = mp.quad(lambda t: t * t * _g(t), [0, 0.45, 0.9])
    assert abs(terms[1] - m0 / (4 * mp.pi)) < 1e-16
    assert abs(terms[2] - m2 / (32 * mp.pi)) < 1e-16


def test_z_dependence_is_the_power_series():
    fam = GreensFamily(4, mu=0.3, truncation=6)
    w = curves.HyperbolicCurve(4)
    terms = riesz_terms(4, w, G, 6)
    zs = [0.0, 0.2, -0.4]
    vals, meta = pair_greens_many(fam, zs, w, G)
    assert meta["K"] == 6
    for z, v in zip(zs, vals):
        ref = sum((mp.mpf(0.3) + mp.mpf(z)) ** k * t for k, t in enumerate(terms))
        assert abs(v - ref) <= 1e-25 * abs(ref)


def test_hadamard_coefficients_of_family():
    fam = GreensFamily(4, mu=0.5)
    assert fam.hadamard_coefficient(0) == 1
    assert abs(fam.hadamard_coefficient(3, 0.25) - mp.mpf(0.75) ** 3) < 1e-30


def test_odd_part_only_matters():
    fam = GreensFamily(3, mu=0.5)
    w = curves.HyperbolicCurve(3)
    even = profiles.rescale(profiles.bump(), 0.5)
    mixed = profiles.SmoothProfile(lambda t, order: G.taylor(t, order) + even.taylor(t, order), 1.0, name="g+even")
    a = pair_greens_along_curve(fam, 0, w, G)
    b = pair_greens_along_curve(fam, 0, w, mixed)
    assert abs(a - b) <= 1e-18 * abs(a)
    assert pair_greens_along_curve(fam, 0, w, even) == 0


def test_truncation_failure_is_reported():
    fam = GreensFamily(3, mu=0.0, truncation=3)
    with pytest.raises(TruncationError):
        pair_greens_along_curve(fam, 400.0, curves.StraightLine(3), G)


def test_product_pairing_uses_lifted_family():
    fam = GreensFamily(2, mu=0.4)
    w = curves.LiftedCurve(curves.StraightLine(2), 1.0)
    a = product_pair_greens(fam, 0.1, w, G)
    b = pair_greens_along_curve(GreensFamily(3, mu=0.4), 0.1, curves.StraightLine(3), G)
    assert abs(a - b) <= 1e-30 + 1e-25 * abs(b)


def test_curve_dimension_mismatch():
    with pytest.raises(ValueError):
        pair_greens_along_curve(GreensFamily(3), 0, curves.StraightLine(2), G)


def test_offdiag_scaling_law():
    chi = profiles.rescale(profiles.bump(), 1.0)
    for d in (2, 3, 4):
        for k in range(4):
            ratio = offdiag_term(k, d, 0.2, chi) / offdiag_term(k, d, 0.1, chi)
            assert abs(ratio - mp.mpf(2) ** (mp.mpf(2 * k + 3 - d) / 2)) < 1e-25


def test_offdiag_branches_and_domain():
    fam = GreensFamily(2, mu=0.5)
    chi = profiles.bump()
    x, y = np.zeros(2), np.array([1.0, 0.3])
    plus = offdiag_pair_greens(fam, 0, x, y, 0.1, chi)
    assert plus != 0
    assert offdiag_pair_greens(fam, 0, x, y, 0.1, chi, branch="-") == 0
    assert offdiag_pair_greens(fam, 0, x, -y, 0.1, chi) == plus
    with pytest.raises(DomainError):
        offdiag_pair_greens(fam, 0, x, [0.2, 0.5], 0.1, chi)
    with pytest.raises(DomainError):
        offdiag_pair_greens(fam, 0, x, y, 0.95, chi)


def test_offdiag_massless_keeps_only_leading_term():
    fam = GreensFamily(3, mu=0.0)
    chi = profiles.bump()
    v = offdiag_pair_greens(fam, 0, np.zeros(3), [1.0, 0.2, 0.1], 0.05, chi)
    assert v == offdiag_term(0, 3, 0.05, chi)
