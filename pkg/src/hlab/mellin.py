"""Meromorphically continued Mellin transforms of compactly supported profiles.

``mellin(h, a)`` is the continuation of ``a -> int_0^inf h(t) t^(a-1) dt``.
Left of the line Re a = 0 it is reached by integrating by parts,

    M(h)(a) = -M(h')(a + 1) / a,

which needs nothing beyond the profile's own derivatives. At a = -k the
continuation has a simple pole with residue h^(k)(0)/k! unless that
derivative vanishes, in which case the finite value is M(h^(k))(0)/k!
(a convergent integral because h^(k)(0) = 0).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from mpmath import mp

from . import precision, quadrature
from .errors import PoleError, PrecisionError
from .profiles import OddTestFunction
from .special import as_mp, nonpositive_integer, reciprocal_gamma, reciprocal_gamma_slope

_QUAD_TOL = 1e-24


@dataclass(frozen=True)
class MellinValue:
    argument: object
    value: Optional[object] = None
    is_pole: bool = False
    residue: Optional[object] = None
    error: float = 0.0

    def __post_init__(self):
        if self.is_pole == (self.value is not None):
            raise ValueError("MellinValue holds either a finite value or a pole, not both")
        if self.is_pole and self.residue is None:
            raise ValueError("pole without residue")


def _profile(h):
    h = h.profile if isinstance(h, OddTestFunction) else h
    if not h.compact:
        raise ValueError(f"Mellin transform needs a compactly supported profile, got {h!r}")
    return h


def _derivative_at_zero(h, n):
    zero = np.zeros(1, dtype=precision.real_dtype())
    coeff = h.taylor(zero, n)[n][0]
    return precision.to_mp(coeff) * mp.factorial(n)


def _integral(h, n, beta):
    """int_0^R h^(n)(t) t^(beta - 1) dt by quadrature.

    For 0 < Re beta < 1 the value at 0 is split off analytically,
    g(0) R^beta / beta, so the quadrature only sees (g - g(0)) t^(beta - 1),
    which vanishes like t^beta at the origin.
    """
    fact = math.factorial(n)
    b = precision.to_array_scalar(beta)
    complex_power = np.iscomplexobj(b)
    R = h.support_radius
    g0, head = 0, mp.zero
    if 0 < mp.re(beta) < 1:
        zero = np.zeros(1, dtype=precision.real_dtype())
        g0 = h.taylor(zero, n)[n][0] * fact
        head = precision.to_mp(g0) * as_mp(R) ** beta / beta

    def integrand(t):
        g = h.taylor(t, n)[n] * fact - g0
        if complex_power:
            return g * np.exp((b - 1) * np.log(t))
        return g * np.power(t, b - 1)

    value, err = quadrature.integrate(integrand, 0, R, tol=_QUAD_TOL)
    return head + precision.to_mp(value), err


def _check_depth(h, n):
    if n > h.max_order:
        raise PrecisionError(
            f"continuation needs {n} derivatives of {h.name}, only {h.max_order} declared")


def mellin(h, alpha):
    """Mellin transform of ``h`` at ``alpha`` as a MellinValue."""
    h = _profile(h)
    alpha = as_mp(alpha)
    k = nonpositive_integer(alpha)
    if k is not None:
        n = -k
        _check_depth(h, n + 1 if n else 0)
        d_n = _derivative_at_zero(h, n)
        if d_n != 0:
            return MellinValue(alpha, is_pole=True, residue=d_n / mp.factorial(n))
        # h^(n)(0) = 0 so int h^(n)(t) / t dt converges.
        value, err = _integral(h, n, mp.zero)
        return MellinValue(alpha, value=value / mp.factorial(n), error=err)

    # smallest depth with Re(alpha + depth) > 0
    depth = max(0, math.floor(-float(mp.re(alpha))) + 1)
    _check_depth(h, depth)
    value, err = _integral(h, depth, alpha + depth)
    denom = mp.one
    for j in range(depth):
        denom *= alpha + j
    return MellinValue(alpha, value=(-1) ** depth * value / denom, error=err)


def _over_gamma(mv, gamma_arg, chain):
    """M(h)(a) / Gamma(gamma_arg) where gamma_arg = chain * (a - a0) + ... near a0.

    A simple pole of M meeting a pole of the Gamma factor cancels to the
    residue times the slope of 1/Gamma there.
    """
    j = nonpositive_integer(gamma_arg)
    if j is not None:
        if mv.is_pole:
            return mv.residue * reciprocal_gamma_slope(j) * chain
        return mp.zero
    if mv.is_pole:
        raise PoleError(f"Mellin transform has an uncancelled pole at {mv.argument}")
    return mv.value * reciprocal_gamma(gamma_arg)


def mellin_prime(h, alpha):
    """M(h)(alpha) / Gamma((alpha + 1) / 2), finite wherever the poles cancel."""
    alpha = as_mp(alpha)
    return _over_gamma(mellin(h, alpha), (alpha + 1) / 2, mp.mpf(1) / 2)


def mellin_over_gamma(h, a):
    """The ratio (M(h) / Gamma)(a), finite at the non-positive integers."""
    a = as_mp(a)
    return _over_gamma(mellin(h, a), a, mp.one)
