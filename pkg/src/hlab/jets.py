"""Truncated Taylor arithmetic on numpy arrays.

A jet of order ``n`` is an array of shape ``(n + 1, ...)`` whose slice ``j``
holds the Taylor coefficient ``h^(j)(t) / j!`` at each point ``t``. All
routines broadcast over the trailing axes and accept real or complex data.
"""

import numpy as np


def variable(t, order):
    """Jet of the identity map evaluated at ``t``."""
    t = np.asarray(t)
    out = np.zeros((order + 1,) + t.shape, dtype=t.dtype)
    out[0] = t
    if order >= 1:
        out[1] = 1
    return out


def constant(c, order, like):
    like = np.asarray(like)
    dtype = np.result_type(like.dtype, np.asarray(c).dtype)
    out = np.zeros((order + 1,) + like.shape, dtype=dtype)
    out[0] = c
    return out


def order_of(a):
    return a.shape[0] - 1


def mul(a, b):
    n = min(order_of(a), order_of(b))
    out = np.zeros((n + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]),
                   dtype=np.result_type(a, b))
    for k in range(n + 1):
        acc = out[k]
        for j in range(k + 1):
            acc = acc + a[j] * b[k - j]
        out[k] = acc
    return out


def reciprocal(a):
    n = order_of(a)
    out = np.zeros_like(a)
    out[0] = 1 / a[0]
    for k in range(1, n + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc = acc + a[j] * out[k - j]
        out[k] = -acc * out[0]
    return out


def div(a, b):
    return mul(a, reciprocal(b))


def exp(a):
    n = order_of(a)
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, n + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc = acc + j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def log(a):
    n = order_of(a)
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, n + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k):
            acc = acc + j * out[j] * a[k - j]
        out[k] = (a[k] - acc / k) / a[0]
    return out


def power(a, p):
    """a**p for a jet with strictly positive constant term."""
    n = order_of(a)
    dtype = np.result_type(a, np.asarray(p))
    out = np.zeros(a.shape, dtype=dtype)
    out[0] = np.power(a[0], p)
    for k in range(1, n + 1):
        acc = np.zeros(a.shape[1:], dtype=dtype)
        for j in range(1, k + 1):
            acc = acc + (p * j - (k - j)) * a[j] * out[k - j]
        out[k] = acc / (k * a[0])
    return out


def scale_argument(a, factor):
    """Jet of ``t -> h(factor * t)`` given the jet of ``h`` at ``factor * t``."""
    n = order_of(a)
    powers = np.asarray([factor ** j for j in range(n + 1)])
    return a * powers.reshape((n + 1,) + (1,) * (a.ndim - 1))


def truncate(a, order):
    return a[: order + 1]


def derivatives(a):
    """Convert Taylor coefficients to plain derivatives h^(j)(t)."""
    n = order_of(a)
    fact = np.ones(n + 1, dtype=a.real.dtype)
    for j in range(2, n + 1):
        fact[j] = fact[j - 1] * j
    return a * fact.reshape((n + 1,) + (1,) * (a.ndim - 1))
