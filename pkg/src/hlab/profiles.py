"""Smooth one-dimensional profiles with derivatives up to a declared order.

Every profile exposes its Taylor jet, so products, rescalings and odd/even
parts keep exact derivative information without symbolic differentiation.
"""

import math
from functools import lru_cache

import numpy as np

from . import jets, precision

DEFAULT_MAX_ORDER = 12


class SmoothProfile:
    """A smooth function of one real variable.

    ``taylor(t, order)`` must return an array of shape ``(order + 1, *t.shape)``
    with the Taylor coefficients ``h^(j)(t) / j!``. ``support_radius`` is the
    half-width outside of which the function vanishes; ``math.inf`` marks a
    multiplier that is not compactly supported.
    """

    def __init__(self, taylor, support_radius=math.inf, max_order=DEFAULT_MAX_ORDER, name="profile"):
        if not support_radius > 0:
            raise ValueError("support_radius must be positive")
        self._taylor = taylor
        self.support_radius = support_radius
        self.max_order = max_order
        self.name = name

    def __repr__(self):
        return f"SmoothProfile({self.name}, support_radius={self.support_radius})"

    def taylor(self, t, order):
        if order > self.max_order:
            raise ValueError(f"{self.name}: derivative order {order} exceeds declared maximum {self.max_order}")
        t = np.asarray(t, dtype=precision.real_dtype())
        return self._taylor(t, order)

    def __call__(self, t):
        return self.taylor(t, 0)[0]

    evaluator = __call__

    def derivative(self, n, t):
        return jets.derivatives(self.taylor(t, n))[n]

    derivative_evaluator = derivative

    @property
    def compact(self):
        return math.isfinite(self.support_radius)

    def __mul__(self, other):
        return product(self, other)

    def scaled(self, s):
        return rescale(self, s)


class OddTestFunction:
    """A profile asserted to be odd; checked on a grid at construction."""

    def __init__(self, profile, grid_points=41):
        t = np.linspace(0, profile.support_radius, grid_points)
        lhs, rhs = profile(-t), -profile(t)
        if not np.allclose(np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float), rtol=1e-14, atol=1e-300):
            raise ValueError(f"{profile.name} is not odd")
        self.profile = profile

    def __getattr__(self, item):
        return getattr(self.profile, item)

    def __call__(self, t):
        return self.profile(t)


def _as_profile(h):
    return h.profile if isinstance(h, OddTestFunction) else h


def product(*factors):
    factors = [_as_profile(h) for h in factors]
    radius = min(h.support_radius for h in factors)
    max_order = min(h.max_order for h in factors)

    def taylor(t, order):
        out = factors[0].taylor(t, order)
        for h in factors[1:]:
            out = jets.mul(out, h.taylor(t, order))
        return out

    return SmoothProfile(taylor, radius, max_order, "*".join(h.name for h in factors))


def rescale(h, s):
    """The profile ``t -> h(t / s)``."""
    h = _as_profile(h)
    s = precision.real_dtype()(s)

    def taylor(t, order):
        return jets.scale_argument(h.taylor(t / s, order), 1 / s)

    return SmoothProfile(taylor, h.support_radius * float(s), h.max_order, f"{h.name}(./{float(s):.6g})")


def reflect(h):
    """The profile ``t -> h(-t)``."""
    h = _as_profile(h)

    def taylor(t, order):
        return jets.scale_argument(h.taylor(-t, order), -1)

    return SmoothProfile(taylor, h.support_radius, h.max_order, f"{h.name}(-.)")


def _parity_part(h, sign, label):
    h = _as_profile(h)

    def taylor(t, order):
        direct = h.taylor(t, order)
        mirrored = jets.scale_argument(h.taylor(-t, order), -1)
        return (direct + sign * mirrored) / 2

    return SmoothProfile(taylor, h.support_radius, h.max_order, f"({h.name})_{label}")


def odd_part(h):
    return _parity_part(h, -1, "odd")


def even_part(h):
    return _parity_part(h, 1, "even")


def constant(value=1, name=None):
    def taylor(t, order):
        return jets.constant(value, order, t)

    return SmoothProfile(taylor, math.inf, name=name or f"const({value})")


def polynomial(coefficients, name="poly"):
    """Profile of ``sum_j coefficients[j] * t**j`` (not compactly supported)."""
    coefficients = list(coefficients)

    def taylor(t, order):
        var = jets.variable(t, order)
        out = jets.constant(0, order, t)
        power = jets.constant(1, order, t)
        for c in coefficients:
            out = out + c * power
            power = jets.mul(power, var)
        return out

    return SmoothProfile(taylor, math.inf, name=name)


def from_callable_jet(jet_fn, name, support_radius=math.inf):
    """Build a profile from a function that maps a jet of ``t`` to a jet."""

    def taylor(t, order):
        return jet_fn(jets.variable(t, order))

    return SmoothProfile(taylor, support_radius, name=name)


def cosine():
    def taylor(t, order):
        out = np.empty((order + 1,) + t.shape, dtype=t.dtype)
        c, s = np.cos(t), np.sin(t)
        cycle = (c, -s, -c, s)
        fact = 1
        for j in range(order + 1):
            if j:
                fact *= j
            out[j] = cycle[j % 4] / fact
        return out

    return SmoothProfile(taylor, math.inf, name="cos")


# -- the standard bump exp(1/(t^2 - 1)) --------------------------------------

@lru_cache(maxsize=None)
def bump_derivative_polynomials(n_max):
    """Integer polynomials P_n with phi^(n)(t) = P_n(t) phi(t) / (t^2 - 1)^(2n).

    Recurrence: P_{n+1} = P_n' (t^2-1)^2 - 4 n t (t^2-1) P_n - 2 t P_n.
    Coefficients are stored lowest degree first. Evaluating these loses
    digits to cancellation near |t| = 1 at high order, so the bump itself
    uses the Taylor recurrences of exp and 1/x; the polynomials serve as an
    independent check.
    """
    polys = [np.polynomial.Polynomial([1])]
    q = np.polynomial.Polynomial([-1, 0, 1])
    t = np.polynomial.Polynomial([0, 1])
    for n in range(n_max):
        p = polys[-1]
        polys.append(p.deriv() * q * q - 4 * n * t * q * p - 2 * t * p)
    return tuple(tuple(int(round(c)) for c in p.coef) for p in polys)


def bump_derivative(n, t):
    """phi^(n)(t) from the integer polynomial recurrence."""
    t = np.asarray(t, dtype=precision.real_dtype())
    coeffs = bump_derivative_polynomials(n)[n]
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    poly = np.zeros_like(ti)
    for c in reversed(coeffs):
        poly = poly * ti + c
    q = ti * ti - 1
    out[inside] = poly * np.exp(1 / q) / q ** (2 * n)
    return out


def _bump_taylor(t, order):
    out = np.zeros((order + 1,) + t.shape, dtype=t.dtype)
    inside = np.abs(t) < 1
    var = jets.variable(t[inside], order)
    q = jets.mul(var, var)
    q[0] -= 1
    out[:, inside] = jets.exp(jets.reciprocal(q))
    return out


def bump():
    """chi(t) = exp(1/(t^2-1)) on (-1, 1), zero outside."""
    return SmoothProfile(_bump_taylor, 1.0, name="chi")


def odd_bump():
    """f(t) = t exp(1/(t^2-1)) on (-1, 1), zero outside."""

    def taylor(t, order):
        return jets.mul(jets.variable(t, order), _bump_taylor(t, order))

    return OddTestFunction(SmoothProfile(taylor, 1.0, name="f"))
