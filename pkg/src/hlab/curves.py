"""Timelike curves through a basepoint of flat Minkowski space.

A curve supplies jets of its displacement ``w(t) - x`` and the Taylor
coefficients of that displacement at ``t = 0``. From these it derives
``nu(t) = Gamma_x(w(t)) / t^2``, a smooth positive function with a
removable singularity at the origin.
"""

import math

import numpy as np

from . import jets, precision
from .profiles import SmoothProfile

T_CUT = 1e-3
# Jets of nu are taken from its Taylor series at 0 inside this radius;
# dividing jets of Gamma by t^2 amplifies roundoff like (2/t)^order.
SERIES_RADIUS = 1.0
SERIES_DEGREE = 48


def _signs(d):
    s = -np.ones(d)
    s[0] = 1
    return s


class TimelikeCurve:
    dim: int
    orientation = 1

    def __init__(self, basepoint=None, domain=(-math.inf, math.inf)):
        x = np.zeros(self.dim) if basepoint is None else np.asarray(basepoint, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError("basepoint has the wrong dimension")
        self.basepoint = x
        self.domain = domain

    # -- to be provided by subclasses -------------------------------------
    def displacement_taylor(self, t, order):
        """Jets of w(t) - x: array of shape (order + 1, dim, *t.shape)."""
        raise NotImplementedError

    def taylor_at_zero(self, degree):
        """Coefficients D_n of w(t) - x = sum D_n t^n, shape (degree + 1, dim)."""
        raise NotImplementedError

    # -- derived quantities --------------------------------------------------
    def position(self, t):
        t = np.asarray(t, dtype=precision.real_dtype())
        disp = self.displacement_taylor(t, 0)[0]
        return np.moveaxis(disp, 0, -1) + self.basepoint.astype(t.dtype)

    def velocity(self, t):
        t = np.asarray(t, dtype=precision.real_dtype())
        return np.moveaxis(self.displacement_taylor(t, 1)[1], 0, -1)

    def big_gamma(self, t):
        """Gamma_x(w(t))."""
        t = np.asarray(t, dtype=precision.real_dtype())
        disp = self.displacement_taylor(t, 0)[0]
        sig = _signs(self.dim).astype(t.dtype).reshape((self.dim,) + (1,) * t.ndim)
        return np.sum(sig * disp * disp, axis=0)

    def nu_series(self, degree=SERIES_DEGREE):
        """Taylor coefficients of nu at 0 (lowest first)."""
        D = self.taylor_at_zero(degree + 2).astype(precision.real_dtype())
        sig = _signs(self.dim).astype(D.dtype)
        gam = np.zeros(degree + 3, dtype=D.dtype)
        for a in range(1, degree + 2):
            for b in range(1, degree + 3 - a):
                gam[a + b] += np.dot(sig * D[a], D[b])
        return gam[2:]

    def _nu_series_jets(self, order):
        """Coefficient arrays of nu^(j)/j! as polynomials, j = 0..order (cached)."""
        cache = self.__dict__.setdefault("_jet_cache", {})
        if order not in cache:
            c = self.nu_series()
            polys = []
            for j in range(order + 1):
                n = np.arange(j, len(c))
                binom = np.array([math.comb(int(k), j) for k in n], dtype=c.dtype)
                polys.append(c[j:] * binom)
            cache[order] = polys
        return cache[order]

    def nu(self, t):
        t = np.asarray(t, dtype=precision.real_dtype())
        small = np.abs(t) <= T_CUT
        out = np.empty_like(t)
        big = ~small
        out[big] = self.big_gamma(t[big]) / t[big] ** 2
        out[small] = np.polynomial.polynomial.polyval(t[small], self.nu_series(14))
        return out

    def nu_taylor(self, t, order):
        """Jets of nu at the points t."""
        t = np.asarray(t, dtype=precision.real_dtype())
        out = np.empty((order + 1,) + t.shape, dtype=t.dtype)
        near = np.abs(t) <= SERIES_RADIUS
        if np.any(near):
            tn = t[near]
            for j, cj in enumerate(self._nu_series_jets(order)):
                out[j, near] = np.polynomial.polynomial.polyval(tn, cj)
        far = ~near
        if np.any(far):
            tf = t[far]
            disp = self.displacement_taylor(tf, order)
            sig = _signs(self.dim)
            gam = sum(sig[i] * jets.mul(disp[:, i], disp[:, i]) for i in range(self.dim))
            var = jets.variable(tf, order)
            out[:, far] = jets.div(gam, jets.mul(var, var))
        return out

    def nu_power_profile(self, p):
        """The smooth profile t -> nu(t)^p."""
        def taylor(t, order):
            return jets.power(self.nu_taylor(t, order), p)

        return SmoothProfile(taylor, math.inf, name=f"nu^{p}")

    def check_timelike(self, t):
        v = self.velocity(t)
        g = v[..., 0] ** 2 - np.sum(v[..., 1:] ** 2, axis=-1)
        return bool(np.all(g > 0)) and bool(np.all(self.orientation * v[..., 0] > 0))


class StraightLine(TimelikeCurve):
    """w(t) = x + t u for a timelike u (unit speed by default)."""

    def __init__(self, dim, direction=None, basepoint=None):
        self.dim = dim
        super().__init__(basepoint)
        u = np.zeros(dim)
        u[0] = 1
        self.direction = u if direction is None else np.asarray(direction, dtype=float)
        if self.direction[0] ** 2 - np.sum(self.direction[1:] ** 2) <= 0 or self.direction[0] <= 0:
            raise ValueError("direction must be future timelike")

    def displacement_taylor(self, t, order):
        u = self.direction.astype(t.dtype).reshape((self.dim,) + (1,) * t.ndim)
        out = np.zeros((order + 1, self.dim) + t.shape, dtype=t.dtype)
        out[0] = u * t
        if order >= 1:
            out[1] = u * np.ones_like(t)
        return out

    def taylor_at_zero(self, degree):
        D = np.zeros((degree + 1, self.dim))
        if degree >= 1:
            D[1] = self.direction
        return D


class HyperbolicCurve(TimelikeCurve):
    """Uniformly accelerated w(t) = x + (sinh t, cosh t - 1, 0, ...)."""

    def __init__(self, dim, basepoint=None):
        if dim < 2:
            raise ValueError("needs at least one space dimension")
        self.dim = dim
        super().__init__(basepoint)

    def displacement_taylor(self, t, order):
        out = np.zeros((order + 1, self.dim) + t.shape, dtype=t.dtype)
        sh, ch = np.sinh(t), np.cosh(t)
        fact = 1
        for j in range(order + 1):
            fact *= max(j, 1)
            even = j % 2 == 0
            out[j, 0] = (sh if even else ch) / fact
            out[j, 1] = (ch if even else sh) / fact
        out[0, 1] -= 1
        return out

    def taylor_at_zero(self, degree):
        D = np.zeros((degree + 1, self.dim), dtype=precision.real_dtype())
        one = precision.real_dtype()(1)
        for n in range(1, degree + 1):
            D[n, 1 - n % 2] = one / math.factorial(n)
        return D


class LiftedCurve(TimelikeCurve):
    """w_xi(t) = (w(xi t), sqrt(xi^2 - 1) t) in one dimension more."""

    def __init__(self, base, xi):
        if not xi >= 1:
            raise ValueError("xi must be at least 1")
        self.base = base
        self.xi = precision.real_dtype()(xi)
        self.dim = base.dim + 1
        super().__init__(np.append(base.basepoint, 0.0))
        self.orientation = base.orientation
        self._lift = np.sqrt(self.xi * self.xi - 1)

    def displacement_taylor(self, t, order):
        out = np.zeros((order + 1, self.dim) + t.shape, dtype=t.dtype)
        base = self.base.displacement_taylor(self.xi * t, order)
        for j in range(order + 1):
            out[j, :-1] = base[j] * self.xi ** j
        out[0, -1] = self._lift * t
        if order >= 1:
            out[1, -1] = self._lift
        return out

    def taylor_at_zero(self, degree):
        D = np.zeros((degree + 1, self.dim), dtype=precision.real_dtype())
        base = self.base.taylor_at_zero(degree)
        for n in range(degree + 1):
            D[n, :-1] = base[n] * self.xi ** n
        if degree >= 1:
            D[1, -1] = self._lift
        return D


class ReversedCurve(TimelikeCurve):
    """t -> w(-t); past oriented, so curve pairings change sign."""

    def __init__(self, base):
        self.base = base
        self.dim = base.dim
        super().__init__(base.basepoint)
        self.orientation = -base.orientation

    def displacement_taylor(self, t, order):
        return jets.scale_argument(self.base.displacement_taylor(-t, order), -1)

    def taylor_at_zero(self, degree):
        D = np.array(self.base.taylor_at_zero(degree))
        D[1::2] *= -1
        return D
