import numpy as np
import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from hlab import profiles
from hlab.errors import PoleError, PrecisionError
from hlab.mellin import MellinValue, mellin, mellin_over_gamma, mellin_prime

F = profiles.odd_bump()


def _f(t):
    return t * mp.exp(1 / (t * t - 1)) if abs(t) < 1 else mp.zero


def _series_oracle(alpha, delta=mp.mpf("0.1"), terms=60):
    """Independent continuation: exact Taylor series of t*exp(1/(t^2-1)) on [0, delta], quadrature beyond."""
    # exp(-1/(1-u)) = e^-1 exp(-(u + u^2 + ...)) with u = t^2, via the exponential recurrence
    g = [mp.zero] + [-mp.one] * terms
    e = [mp.exp(-1)] + [mp.zero] * terms
    for n in range(1, terms + 1):
        e[n] = sum(k * g[k] * e[n - k] for k in range(1, n + 1)) / n
    head = sum(e[n] * delta ** (alpha + 2 * n + 1) / (alpha + 2 * n + 1) for n in range(terms + 1))
    return head + mp.quad(lambda t: _f(t) * t ** (alpha - 1), [delta, 0.5, 1])


def test_bump_at_one_is_its_integral():
    chi = profiles.bump()
    ref = mp.quad(lambda t: mp.exp(1 / (t * t - 1)), [0, 1])
    assert abs(mellin(chi, 1).value - ref) < 1e-18


@pytest.mark.parametrize("alpha", [-0.5, -2.5, -3.25, -5.5])
def test_continuation_matches_taylor_subtraction(alpha):
    got = mellin(F, alpha).value
    ref = _series_oracle(mp.mpf(alpha))
    assert abs(got / ref - 1) < 1e-12


def test_pole_residue_of_linear_profile():
    h = profiles.product(profiles.polynomial([0, float(mp.e)]), profiles.bump())
    mv = mellin(h, -1)
    assert mv.is_pole and mv.value is None
    assert abs(mv.residue - 1) < 1e-15


def test_odd_function_has_no_pole_at_even_arguments():
    mv = mellin(F, -2)
    assert not mv.is_pole and mp.isfinite(mv.value)


def test_mellin_value_invariant():
    with pytest.raises(ValueError):
        MellinValue(1, value=1, is_pole=True, residue=1)
    with pytest.raises(ValueError):
        MellinValue(1)


def test_mprime_at_one():
    ref = mp.quad(_f, [0, 1])
    assert abs(mellin_prime(F, 1) - ref) < 1e-18


def test_mprime_pole_cancellation_matches_limit():
    v = mellin_prime(F, -1)
    h = mp.mpf("1e-4")
    near = (mellin_prime(F, -1 + h) + mellin_prime(F, -1 - h)) / 2
    assert abs(v - near) < 1e-7 * abs(v)


def test_mprime_finite_on_integers():
    for n in range(-9, 10):
        assert mp.isfinite(mellin_prime(F, n))


def test_mprime_of_monomial_times_rescaled():
    s, k, alpha = 0.4, 2, mp.mpf("0.5")
    h = profiles.product(profiles.polynomial([0, 0, 1]), profiles.rescale(F, s))
    expected = mellin(F, alpha + k).value * mp.mpf(s) ** (alpha + k) / mp.gamma((alpha + 1) / 2)
    assert abs(mellin_prime(h, alpha) / expected - 1) < 1e-15


def test_uncancelled_pole_raises():
    with pytest.raises(PoleError):
        mellin_prime(profiles.bump(), -2)


def test_depth_beyond_declared_order():
    with pytest.raises(PrecisionError):
        mellin(F, -13.5)


def test_mellin_over_gamma_at_poles():
    chi = profiles.bump()
    # residue chi(0) = e^-1 times the slope of 1/Gamma at 0
    assert abs(mellin_over_gamma(chi, 0) - mp.exp(-1)) < 1e-18
    a = mp.mpf("0.3")
    assert abs(mellin_over_gamma(chi, a) - mellin(chi, a).value / mp.gamma(a)) < 1e-18


@given(st.floats(-8, 8).filter(lambda a: abs(a - round(a)) > 1e-3), st.sampled_from([0.5, 0.25]))
def test_scaling_law(alpha, s):
    lhs = mellin(profiles.rescale(F, s), alpha).value
    rhs = mp.mpf(s) ** alpha * mellin(F, alpha).value
    assert abs(lhs / rhs - 1) < 1e-10


@given(st.floats(-7, 7).filter(lambda a: abs(a - round(a)) > 1e-3))
def test_integration_by_parts(alpha):
    deriv = profiles.SmoothProfile(
        lambda t, order: F.taylor(t, order + 1)[1:] * np.arange(1, order + 2, dtype=t.dtype).reshape(
            (-1,) + (1,) * t.ndim), 1.0, 11, "f'")
    lhs = mellin(F, alpha).value
    rhs = -mellin(deriv, alpha + 1).value / alpha
    assert abs(lhs / rhs - 1) < 1e-10


def test_complex_argument_against_quadrature():
    a = mp.mpc(1.5, 2.0)
    ref = mp.quad(lambda t: _f(t) * t ** (a - 1), [0, 1])
    assert abs(mellin(F, a).value - ref) < 1e-17
