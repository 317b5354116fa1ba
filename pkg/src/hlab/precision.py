"""Working precision for array numerics and mpmath scalars.

Array work (quadrature nodes, Taylor jets, finite differences) runs in numpy
``longdouble`` (80-bit x87 on x86-64) unless ``HLAB_PRECISION=double``.
Scalar bookkeeping and all fits run in mpmath at ``MP_DPS`` digits.
"""

import os

import numpy as np
from mpmath import mp

MP_DPS = 34

_MODES = {
    "extended": (np.longdouble, np.clongdouble),
    "double": (np.float64, np.complex128),
}

mp.dps = MP_DPS

_mode = None


def set_precision(mode):
    global _mode
    if mode not in _MODES:
        raise ValueError(f"unknown precision mode {mode!r}; expected one of {sorted(_MODES)}")
    _mode = mode


def precision_mode():
    if _mode is None:
        set_precision(os.environ.get("HLAB_PRECISION", "extended"))
    return _mode


def real_dtype():
    return _MODES[precision_mode()][0]


def complex_dtype():
    return _MODES[precision_mode()][1]


def eps():
    return float(np.finfo(real_dtype()).eps)


def to_array_scalar(x):
    """Convert an mpmath/Python number to a numpy scalar at working precision.

    Goes through the decimal string so no digits are lost on the way to
    ``longdouble``.
    """
    x = mp.mpmathify(x)
    if isinstance(x, mp.mpc):
        if x.imag == 0:
            return real_dtype()(mp.nstr(x.real, 30))
        re = real_dtype()(mp.nstr(x.real, 30))
        im = real_dtype()(mp.nstr(x.imag, 30))
        return complex_dtype()(re) + complex_dtype()(1j) * im
    return real_dtype()(mp.nstr(x, 30))


def to_mp(x):
    """Convert a numpy scalar (any float/complex width) to an mpmath number."""
    if np.iscomplexobj(x):
        z = complex_dtype()(x)
        re, im = np.real(z), np.imag(z)
        if im == 0:
            return mp.mpf(repr_ld(re))
        return mp.mpc(repr_ld(re), repr_ld(im))
    if isinstance(x, (int, float)):
        return mp.mpf(x)
    return mp.mpf(repr_ld(x))


def repr_ld(x):
    return np.format_float_scientific(x, unique=True)
