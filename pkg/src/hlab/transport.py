"""Brute-force Hadamard coefficients for P = box + c on flat Minkowski space.

Conventions: box = d0^2 - d1^2 - ... - d_{d-1}^2 and Gamma_x(y) = gamma(y - x).
Then grad Gamma_x = -2 (y - x) and box Gamma_x = 2d, so along the ray
y(t) = x + t u the operator rho_x acts as -2 t d/dt. The transport
equations (rho_x - 2k) V^k = 2k P V^(k-1) integrate to

    V^k(y) = -int_0^1 k sigma^(k-1) (P V^(k-1))(x + sigma (y - x)) dsigma,

which is regular at y = x by construction. For c = mu constant this gives
V^k = (-mu)^k; the operator box - mu has V^k = mu^k.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite, legendre

from . import precision
from .errors import ResolutionError
from .riesz import MinkowskiSpace

RHO_SLOPE = -2  # rho_x V = RHO_SLOPE * t dV/dt + RHO_CONSTANT * V along rays
RHO_CONSTANT = 0
FD_STEP = 1e-2
QUAD_NODES = 10
_CHUNK = 200_000


class Potential:
    """Scalar potential c(y) with partial derivatives up to order 4."""

    max_derivative = 4

    def __call__(self, Y):
        return self.derivative((), Y)

    def derivative(self, orders, Y):
        """Mixed partial derivative; ``orders`` lists the order per coordinate."""
        raise NotImplementedError

    def box(self, Y):
        d = np.asarray(Y).shape[-1]
        out = self.derivative(_unit(d, 0, 2), Y)
        for i in range(1, d):
            out = out - self.derivative(_unit(d, i, 2), Y)
        return out

    def shifted(self, z):
        return ShiftedPotential(self, z)


def _unit(d, i, n):
    o = [0] * d
    o[i] = n
    return tuple(o)


def _check_orders(orders, max_order=4):
    if sum(orders) > max_order:
        raise ValueError(f"derivative oracle available up to order {max_order}")


class ConstantPotential(Potential):
    def __init__(self, value):
        self.value = value

    def derivative(self, orders, Y):
        _check_orders(orders)
        Y = np.asarray(Y)
        base = np.zeros(Y.shape[:-1], dtype=np.result_type(Y.dtype, np.asarray(self.value)))
        return base + self.value if not any(orders) else base

    def __repr__(self):
        return f"ConstantPotential({self.value})"


class GaussianPotential(Potential):
    """c(y) = A exp(-|y - center|^2 / width^2) with the Euclidean norm."""

    def __init__(self, amplitude=0.5, width=1.0, center=None):
        self.amplitude = amplitude
        self.width = width
        self.center = center

    def derivative(self, orders, Y):
        Y = np.asarray(Y)
        d = Y.shape[-1]
        orders = tuple(orders) + (0,) * (d - len(orders))
        _check_orders(orders)
        c = np.zeros(d) if self.center is None else np.asarray(self.center, dtype=float)
        dt = Y.dtype
        w = dt.type(self.width)
        u = (Y - c.astype(dt)) / w
        out = self.amplitude * np.exp(-np.sum(u * u, axis=-1))
        # d^n/dy^n exp(-(y/w)^2) = (-1/w)^n H_n(y/w) exp(-(y/w)^2)
        for i, n in enumerate(orders):
            if n:
                coef = np.zeros(n + 1)
                coef[n] = 1
                out = out * hermite.hermval(u[..., i], coef) * (-1 / w) ** n
        return out

    def __repr__(self):
        return f"GaussianPotential(A={self.amplitude}, w={self.width}, center={self.center})"


class ShiftedPotential(Potential):
    """c - z, the potential of P - z."""

    def __init__(self, base, z):
        self.base = base
        self.z = z

    def derivative(self, orders, Y):
        out = self.base.derivative(orders, Y)
        return out - self.z if not any(orders) else out

    def __repr__(self):
        return f"{self.base!r} - {self.z}"


@dataclass(frozen=True)
class SpacetimeModel:
    space: MinkowskiSpace
    potential: Potential
    box_center: tuple = None
    box_halfwidth: float = 2.0

    @property
    def d(self):
        return self.space.d

    @classmethod
    def flat(cls, d, potential=None, **kw):
        return cls(MinkowskiSpace(d), potential or ConstantPotential(0.0), **kw)

    def shifted(self, z):
        """The model of P - z."""
        return SpacetimeModel(self.space, self.potential.shifted(z), self.box_center, self.box_halfwidth)

    def check_inside(self, Y):
        center = np.zeros(self.d) if self.box_center is None else np.asarray(self.box_center)
        if np.any(np.abs(np.asarray(Y, dtype=float) - center) > self.box_halfwidth):
            raise ResolutionError("finite-difference stencil leaves the working box")


@dataclass
class HadamardTable:
    base: np.ndarray
    points: np.ndarray
    values: np.ndarray  # shape (max_k + 1, len(points))
    meta: dict = field(default_factory=dict)

    @property
    def max_k(self):
        return self.values.shape[0] - 1

    def value(self, k, y):
        y = np.asarray(y, dtype=float)
        hits = np.nonzero(np.all(np.isclose(np.asarray(self.points, dtype=float), y, rtol=0, atol=1e-14), axis=1))[0]
        if len(hits) == 0:
            raise KeyError(f"point {y} not in table")
        return self.values[k, hits[0]]

    def __getitem__(self, key):
        k, y = key
        return self.value(k, y)


def _stencil(d, h):
    """Offsets and weights of the 4th-order central box operator."""
    offsets, weights = [np.zeros(d)], [0.0]
    w1, w2 = 16 / (12 * h * h), -1 / (12 * h * h)
    centre = -30 / (12 * h * h)
    for i in range(d):
        sign = 1 if i == 0 else -1
        weights[0] += sign * centre
        for step, wt in ((h, w1), (2 * h, w2)):
            for s in (1, -1):
                e = np.zeros(d)
                e[i] = s * step
                offsets.append(e)
                weights.append(sign * wt)
    return np.array(offsets), np.array(weights)


class TransportSolver:
    """Recursive evaluator of V^k_x at arbitrary points of the working box."""

    def __init__(self, model, x, h=FD_STEP, nodes=QUAD_NODES):
        self.model = model
        dt = precision.real_dtype()
        self.x = np.asarray(x, dtype=float).astype(dt)
        self.h = h
        sig, wts = legendre.leggauss(nodes)
        self.sigma = ((sig + 1) / 2).astype(dt)
        self.weights = (wts / 2).astype(dt)
        off, sw = _stencil(model.d, h)
        self.offsets = off.astype(dt)
        self.stencil_weights = sw.astype(dt)

    def V(self, k, Y):
        Y = np.asarray(Y, dtype=precision.real_dtype())
        if k == 0:
            return np.ones(Y.shape[:-1], dtype=Y.dtype)
        if Y.shape[0] > _CHUNK and Y.ndim == 2:
            return np.concatenate([self.V(k, Y[i:i + _CHUNK]) for i in range(0, len(Y), _CHUNK)])
        s = self.sigma.reshape((-1,) + (1,) * (Y.ndim - 1) + (1,))
        pts = self.x + s * (Y - self.x)
        pv = self.PV(k - 1, pts.reshape(-1, Y.shape[-1])).reshape(pts.shape[:-1])
        kern = (k * self.sigma ** (k - 1) * self.weights).reshape((-1,) + (1,) * (Y.ndim - 1))
        return -np.sum(kern * pv, axis=0)

    def box(self, k, Y):
        """4th-order finite-difference box of V^k at the points Y (N, d)."""
        if k == 0:
            return np.zeros(Y.shape[:-1], dtype=Y.dtype)
        pts = Y[None, :, :] + self.offsets[:, None, :]
        self.model.check_inside(pts)
        vals = self.V(k, pts.reshape(-1, Y.shape[-1])).reshape(pts.shape[:-1])
        return np.tensordot(self.stencil_weights, vals, axes=(0, 0))

    def PV(self, k, Y):
        """(box + c) V^k at the points Y."""
        c = self.model.potential(Y)
        if k == 0:
            return c
        return self.box(k, Y) + c * self.V(k, Y)

    def radial_derivative(self, k, Y):
        """(y - x) . grad V^k by a 4th-order central difference along the ray."""
        h = self.h
        u = Y - self.x
        norm = np.sqrt(np.sum(u * u, axis=-1, keepdims=True))
        e = u / np.where(norm == 0, 1, norm)
        vals = [self.V(k, Y + j * h * e) for j in (2, 1, -1, -2)]
        deriv = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h)
        return norm[..., 0] * deriv


def solve_transport(model, x, max_k=3, points=(), h=FD_STEP):
    """Tabulate V^0..V^max_k of P = box + c at the given ray endpoints."""
    if max_k > 4:
        raise ValueError("the derivative budget of the potential allows max_k <= 4")
    solver = TransportSolver(model, x, h)
    Y = np.atleast_2d(np.asarray(points, dtype=float)).astype(precision.real_dtype())
    model.check_inside(Y)
    values = np.stack([solver.V(k, Y) for k in range(max_k + 1)])
    return HadamardTable(np.asarray(x, dtype=float), Y, values,
                         {"model": repr(model.potential), "h": h})


def shift_coefficients(table, z):
    """Coefficients of P - z: V^k(z) = sum_m binom(k, m) z^m V^(k-m)."""
    out = np.zeros_like(table.values, dtype=np.result_type(table.values, np.asarray(z)))
    for k in range(table.max_k + 1):
        for m in range(k + 1):
            out[k] += math.comb(k, m) * z ** m * table.values[k - m]
    return HadamardTable(table.base, table.points, out, dict(table.meta, shift=z))


def rho_apply(model, x, V, Y, h=FD_STEP):
    """rho_x V = grad(Gamma_x) . grad V - (box(Gamma_x)/2 - d) V for a field V.

    ``V`` maps an array of points (..., d) to values; the gradient is taken by
    4th-order central differences.
    """
    dt = precision.real_dtype()
    Y = np.atleast_2d(np.asarray(Y, dtype=float)).astype(dt)
    x = np.asarray(x, dtype=float).astype(dt)
    d = model.d
    # the raised-index gradient of Gamma_x is -2 (y - x), so the contraction
    # with dV is a plain sum over components
    grad_gamma = -2 * (Y - x)
    total = np.zeros(Y.shape[0], dtype=dt)
    for i in range(d):
        e = np.zeros(d, dtype=dt)
        e[i] = h
        di = (-V(Y + 2 * e) + 8 * V(Y + e) - 8 * V(Y - e) + V(Y - 2 * e)) / (12 * h)
        total += grad_gamma[:, i] * di
    box_gamma = 2 * d
    return total - (box_gamma / 2 - d) * V(Y)


def transport_residual(model, x, k, rays, t_cut=1e-3, samples=12, h=FD_STEP):
    """sup over the rays of |(rho_x - 2k) V^k - 2k P V^(k-1)|, skipping t < t_cut."""
    solver = TransportSolver(model, x, h)
    dt = precision.real_dtype()
    x = np.asarray(x, dtype=float).astype(dt)
    ts = np.linspace(t_cut, 1, samples).astype(dt)
    worst = 0.0
    for y in np.atleast_2d(np.asarray(rays, dtype=float)):
        Y = x + ts[:, None] * (y.astype(dt) - x)
        rho = RHO_SLOPE * solver.radial_derivative(k, Y) + RHO_CONSTANT * solver.V(k, Y)
        res = rho - 2 * k * solver.V(k, Y) - 2 * k * solver.PV(k - 1, Y)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst
