import numpy as np
import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from hlab import errors, precision
from hlab.quadrature import integrate


def test_polynomial_and_endpoint_singularity():
    val, err = integrate(lambda t: t ** 3, 0, 2)
    assert abs(float(val) - 4) < 1e-17
    val, _ = integrate(lambda t: t ** np.longdouble(-0.5), 0, 1)
    assert abs(float(val) - 2) < 1e-16


def test_strong_singularity_loses_digits():
    # below beta = 1/2 the truncated node range shows; callers continue past it
    val, _ = integrate(lambda t: t ** np.longdouble(-0.75), 0, 1)
    assert 1e-14 < abs(float(val) - 4) < 1e-8
    val, _ = integrate(lambda t: np.exp(1 / (t * t - 1)), 0, 1)
    ref = mp.quad(lambda t: mp.exp(1 / (t * t - 1)), [0, 1])
    assert abs(precision.to_mp(val) - ref) < 1e-18


def test_empty_interval():
    assert integrate(lambda t: t, 1, 1)[0] == 0


@given(st.floats(0.5, 3.0))
def test_algebraic_weight(beta):
    b = np.longdouble(beta)
    val, _ = integrate(lambda t: t ** (b - 1) * np.cos(t), 0, 1)
    ref = mp.quad(lambda t: t ** (mp.mpf(beta) - 1) * mp.cos(t), [0, 1])
    assert abs(precision.to_mp(val) / ref - 1) < 1e-14


def test_precision_modes():
    precision.set_precision("double")
    assert precision.real_dtype() is np.float64 and precision.eps() == np.finfo(np.float64).eps
    precision.set_precision("extended")
    assert precision.precision_mode() == "extended"
    with pytest.raises(ValueError):
        precision.set_precision("quad")


def test_string_round_trips():
    x = mp.mpf(1) / 3
    y = precision.to_array_scalar(x)
    assert isinstance(y, precision.real_dtype())
    assert abs(precision.to_mp(y) - x) <= precision.eps() * x
    z = precision.to_array_scalar(mp.mpc(0.5, -2))
    assert precision.to_mp(z) == mp.mpc(0.5, -2)
    assert precision.to_mp(1.25) == mp.mpf("1.25")


def test_error_hierarchy():
    for cls in (errors.PoleError, errors.PrecisionError, errors.DomainError, errors.ResolutionError,
                errors.TruncationError, errors.IllConditionedError, errors.NoiseFloorError,
                errors.DegenerateNodesError, errors.SymbolMismatchError, errors.MellinZeroError,
                errors.ConfigError):
        assert issubclass(cls, errors.HlabError)
    assert issubclass(errors.CutoffZeroError, errors.MellinZeroError)
    assert issubclass(errors.DomainError, ValueError)
