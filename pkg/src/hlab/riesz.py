"""Riesz distributions on flat Minkowski space and their pairing along curves."""

import enum
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from . import precision, profiles
from .errors import DomainError
from .mellin import mellin_prime
from .special import as_mp, reciprocal_gamma


class CausalClassification(enum.Enum):
    FUTURE_TIMELIKE = "future_timelike"
    PAST_TIMELIKE = "past_timelike"
    FUTURE_LIGHTLIKE = "future_lightlike"
    PAST_LIGHTLIKE = "past_lightlike"
    SPACELIKE = "spacelike"
    ZERO = "zero"


def gamma_form(v):
    """v0^2 - v1^2 - ... ; positive on timelike vectors."""
    v = np.asarray(v)
    return v[..., 0] ** 2 - np.sum(v[..., 1:] ** 2, axis=-1)


def big_gamma(x, y):
    """Squared Lorentzian distance Gamma_x(y) in the flat model."""
    return gamma_form(np.asarray(y) - np.asarray(x))


def classify(v, tol=0.0):
    v = np.asarray(v)
    if not np.any(v):
        return CausalClassification.ZERO
    g = gamma_form(v)
    if g < -tol:
        return CausalClassification.SPACELIKE
    future = v[0] > 0
    if g > tol:
        return CausalClassification.FUTURE_TIMELIKE if future else CausalClassification.PAST_TIMELIKE
    return CausalClassification.FUTURE_LIGHTLIKE if future else CausalClassification.PAST_LIGHTLIKE


_FUTURE = {CausalClassification.FUTURE_TIMELIKE, CausalClassification.FUTURE_LIGHTLIKE, CausalClassification.ZERO}
_PAST = {CausalClassification.PAST_TIMELIKE, CausalClassification.PAST_LIGHTLIKE, CausalClassification.ZERO}


@dataclass(frozen=True)
class MinkowskiSpace:
    d: int
    time_index: int = 0

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension must be at least 2")
        if self.time_index != 0:
            raise ValueError("only time index 0 is supported")

    gamma_form = staticmethod(gamma_form)
    big_gamma = staticmethod(big_gamma)
    classify = staticmethod(classify)


def c_alpha(alpha, d):
    """Normalization 2^(1-a) pi^((2-d)/2) / (Gamma(a/2) Gamma((a-d+2)/2)); entire in a."""
    alpha = as_mp(alpha)
    return (mp.mpf(2) ** (1 - alpha) * mp.pi ** (mp.mpf(2 - d) / 2)
            * reciprocal_gamma(alpha / 2) * reciprocal_gamma((alpha - d + 2) / 2))


def riesz_eval(alpha, x, y, branch="+"):
    """R_+(alpha, x) or R_-(alpha, x) at y, in the regime where it is a function."""
    alpha = as_mp(alpha)
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    if mp.re(alpha) <= d:
        raise DomainError(f"Riesz distribution is a function only for Re alpha > d = {d}, got {alpha}")
    cone = _FUTURE if branch == "+" else _PAST
    if branch not in "+-":
        raise ValueError("branch must be '+' or '-'")
    v = np.asarray(y, dtype=float) - x
    if classify(v) not in cone:
        return mp.zero
    gam = mp.mpf(float(gamma_form(v)))
    if gam == 0:
        return mp.zero
    return c_alpha(alpha, d) * gam ** ((alpha - d) / 2)


def pairing_prefactor(alpha, d):
    return mp.mpf(2) ** (2 - alpha) * mp.pi ** (mp.mpf(2 - d) / 2) * reciprocal_gamma(alpha / 2)


def paired_integrand(alpha, w, V_profile, g):
    """(nu^((alpha-d)/2) V g)_odd as a smooth profile."""
    p = (as_mp(alpha) - w.dim) / 2
    factors = [V_profile, g]
    if p != 0:
        factors.insert(0, w.nu_power_profile(precision.to_array_scalar(p)))
    return profiles.odd_part(profiles.product(*factors))


def paired_riesz_along_curve(alpha, w, V_profile, g):
    """w^*(V R(alpha, x))[g] for R = R_+ - R_-, defined for every complex alpha."""
    alpha = as_mp(alpha)
    pre = pairing_prefactor(alpha, w.dim)
    if pre == 0:
        return mp.zero
    h = paired_integrand(alpha, w, V_profile, g)
    return w.orientation * pre * mellin_prime(h, alpha - w.dim + 1)
