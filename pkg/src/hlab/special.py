"""Gamma, reciprocal Gamma and generalized binomial coefficients."""

from fractions import Fraction
from numbers import Rational

from mpmath import mp

from . import precision  # noqa: F401  (sets mp.dps)
from .errors import PoleError


def nonpositive_integer(a):
    """Return ``-k`` as an int if ``a`` is a non-positive integer, else None."""
    if isinstance(a, Rational):
        if a.denominator == 1 and a <= 0:
            return int(a)
        return None
    a = mp.mpmathify(a)
    if isinstance(a, mp.mpc):
        if a.imag != 0:
            return None
        a = a.real
    if a <= 0 and a == mp.floor(a):
        return int(a)
    return None


def as_mp(a):
    if isinstance(a, Fraction):
        return mp.mpf(a.numerator) / a.denominator
    return mp.mpmathify(a)


def gamma(alpha):
    """Gamma function; raises PoleError at 0, -1, -2, ..."""
    if nonpositive_integer(alpha) is not None:
        raise PoleError(f"Gamma has a pole at {alpha}")
    return mp.gamma(as_mp(alpha))


def reciprocal_gamma(alpha):
    """1/Gamma(alpha). Entire; exactly zero at the non-positive integers."""
    if nonpositive_integer(alpha) is not None:
        return mp.zero
    return mp.rgamma(as_mp(alpha))


def reciprocal_gamma_slope(n):
    """Derivative of 1/Gamma at the non-positive integer ``n = -j``: (-1)^j j!."""
    j = -n
    return mp.mpf((-1) ** j * mp.factorial(j))


def generalized_binomial(a, n):
    """a(a-1)...(a-n+1)/n!, exact (Fraction) when ``a`` is rational."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(a, Rational):
        a = Fraction(a)
        num = Fraction(1)
        for j in range(n):
            num *= a - j
        den = 1
        for j in range(2, n + 1):
            den *= j
        return num / den
    a = as_mp(a)
    out = mp.one
    for j in range(n):
        out *= (a - j) / (j + 1)
    return out
