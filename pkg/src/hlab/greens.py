"""Causal propagators of the Klein-Gordon family box - mu, paired along curves.

For a constant potential the Hadamard series terminates nowhere but is
entire: G_{box - zeta} = sum_k zeta^k R(2k + 2). Pairings are evaluated
term by term, each Riesz term through its curve pairing, with a factorial
bound on the discarded tail.
"""

from dataclasses import dataclass

import numpy as np
from mpmath import mp

from . import precision, profiles
from .errors import DomainError, TruncationError
from .mellin import mellin_over_gamma
from .riesz import c_alpha, gamma_form, paired_riesz_along_curve
from .special import as_mp, reciprocal_gamma
from .transport import ConstantPotential, SpacetimeModel

MAX_TRUNCATION = 60
TAIL_RTOL = 1e-12


@dataclass(frozen=True)
class GreensFamily:
    """The operator box - mu in dimension d (Hadamard coefficients V^k = mu^k).

    ``truncation`` fixes the series order K; None picks the smallest K that
    meets the tail bound.
    """

    d: int
    mu: float = 0.0
    truncation: int = None

    @classmethod
    def klein_gordon(cls, d, mu=0.0, truncation=None):
        return cls(d, mu, truncation)

    def lifted(self):
        """The same operator on M x R."""
        return GreensFamily(self.d + 1, self.mu, self.truncation)

    @property
    def model(self):
        return SpacetimeModel.flat(self.d, ConstantPotential(-self.mu))

    def hadamard_coefficient(self, k, z=0):
        return (as_mp(self.mu) + as_mp(z)) ** k

    def tail_bound(self, zeta, K, gamma_max, g_l1):
        """Bound on |sum_{k > K} zeta^k w^*(R(2k+2))[g]|.

        Beyond k = d/2 - 1 every term is a function, |c_{2k+2}| Gamma^(k+1-d/2),
        so the tail is dominated by a geometric series whose ratio decays like
        |zeta| Gamma_max / (4 k^2).
        """
        d = self.d
        k = K + 1
        if 2 * k + 2 <= d:
            return mp.inf
        zeta = abs(as_mp(zeta))
        gamma_max = as_mp(gamma_max)
        first = zeta ** k * abs(c_alpha(2 * k + 2, d)) * gamma_max ** (k + 1 - mp.mpf(d) / 2) * g_l1
        ratio = zeta * gamma_max / (4 * (k + 1) * (k + 2 - mp.mpf(d) / 2))
        if ratio >= 1:
            return mp.inf
        return first / (1 - ratio)


def _curve_extent(w, g, samples=201):
    R = g.support_radius
    t = np.linspace(-R, R, samples).astype(precision.real_dtype())
    gam = np.max(np.abs(np.asarray(w.big_gamma(t), dtype=float)))
    gvals = np.abs(np.asarray(profiles.odd_part(g)(t), dtype=float))
    l1 = float(np.sum(gvals) * (t[1] - t[0]))
    return mp.mpf(float(gam)), mp.mpf(l1)


def riesz_terms(d, w, g, K):
    """[w^*(R(2k+2))[g] for k = 0..K] in dimension d."""
    if w.dim != d:
        raise ValueError(f"curve lives in dimension {w.dim}, family in {d}")
    one = profiles.constant(1)
    return [paired_riesz_along_curve(2 * k + 2, w, one, g) for k in range(K + 1)]


def truncated_terms(fam, zetas, w, g):
    """Riesz terms up to an order K whose tail bound is below TAIL_RTOL times
    the largest retained term, for every zeta given."""
    if w.dim != fam.d:
        raise ValueError(f"curve lives in dimension {w.dim}, family in {fam.d}")
    gamma_max, l1 = _curve_extent(w, g)
    zmax = max(abs(as_mp(z)) for z in zetas)
    one = profiles.constant(1)
    terms, lead = [], mp.zero
    K_max = fam.truncation if fam.truncation is not None else MAX_TRUNCATION
    for K in range(K_max + 1):
        terms.append(paired_riesz_along_curve(2 * K + 2, w, one, g))
        lead = max(lead, abs(terms[-1]) * max(zmax, 1) ** K)
        if fam.truncation is not None and K < fam.truncation:
            continue
        tail = fam.tail_bound(zmax, K, gamma_max, l1)
        if tail <= TAIL_RTOL * lead:
            return terms, float(tail)
    raise TruncationError(f"tail bound not met with K <= {K_max} for |zeta| = {zmax}")


def pair_greens_many(fam, zs, w, g):
    """pair_greens_along_curve for several z sharing one set of Riesz terms."""
    zetas = [as_mp(fam.mu) + as_mp(z) for z in zs]
    terms, tail = truncated_terms(fam, zetas, w, g)
    out = []
    for zeta in zetas:
        acc = mp.zero
        for t in reversed(terms):
            acc = acc * zeta + t
        out.append(acc)
    return out, {"K": len(terms) - 1, "tail_bound": tail}


def pair_greens_along_curve(fam, z, w, g):
    """w^*(G_{P - z, x})[g] with P = box - mu, i.e. sum_k (mu + z)^k w^*(R(2k+2))[g]."""
    return pair_greens_many(fam, [z], w, g)[0][0]


def product_pair_greens(fam, z, w_xi, g):
    """Pairing of the propagator of the lifted family along a curve in d + 1 dimensions."""
    return pair_greens_along_curve(fam.lifted(), z, w_xi, g)


def offdiag_term(k, d, eps, chi):
    """Closed-form contribution of R(2k+2) on M x R, restricted to the line over y.

    The cutoff is r -> |r| chi((Gamma_x(y) - r^2) / eps); the value is the
    coefficient of V^k_x(y).
    """
    alpha = mp.mpf(2 * k + 2)
    arg = (alpha + 1 - d) / 2
    return (mp.mpf(2) ** (1 - alpha) * mp.pi ** (mp.mpf(1 - d) / 2) * reciprocal_gamma(alpha / 2)
            * mellin_over_gamma(chi, arg) * as_mp(eps) ** arg)


def offdiag_pair_greens(fam, z, x, y, eps, chi, branch=None, K=None):
    """iota_y^*(G^{+/-}) of the lifted family paired with the cutoff at scale eps.

    ``fam`` is the family on the original d-dimensional space; its lift to
    d + 1 supplies the propagator. The branch defaults to the time
    orientation of y - x; the opposite branch vanishes by support.
    """
    v = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    gam = float(gamma_form(v))
    if gam <= 0:
        raise DomainError("y must be timelike related to x")
    if not 0 < eps < gam:
        raise DomainError(f"need 0 < eps < Gamma_x(y) = {gam}, got {eps}")
    own = "+" if v[0] > 0 else "-"
    if branch is None:
        branch = own
    if branch != own:
        return mp.zero
    zeta = as_mp(fam.mu) + as_mp(z)
    if K is None:
        K = fam.truncation if fam.truncation is not None else _offdiag_truncation(fam.d, zeta, eps)
    acc = mp.zero
    for k in range(K, -1, -1):
        acc = acc * zeta + offdiag_term(k, fam.d, eps, chi)
    return acc


def _offdiag_truncation(d, zeta, eps):
    # terms scale like (|zeta| eps / 4)^k / k!^2 times a bounded factor
    x = abs(zeta) * eps / 4
    term = mp.one
    for K in range(MAX_TRUNCATION + 1):
        term = x ** (K + 1) / mp.factorial(K + 1) ** 2
        if term < TAIL_RTOL:
            return max(K, 2)
    raise TruncationError("off-diagonal series did not converge")
