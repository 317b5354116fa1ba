"""End-to-end recovery of Hadamard coefficients from propagator pairings.

Each pipeline samples pairings on fixed grids, applies the coefficient
brackets from ``fitting`` and recombines them with the exact weights from
``combinatorics``. Results come back as an ExtractionReport that also
carries the raw samples for CSV export.
"""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from mpmath import mp

from . import combinatorics, fitting, precision, profiles
from .curves import LiftedCurve, StraightLine
from .errors import CutoffZeroError, MellinZeroError
from .greens import offdiag_pair_greens, pair_greens_many, truncated_terms
from .mellin import mellin_over_gamma, mellin_prime
from .riesz import gamma_form
from .special import as_mp
from .transport import solve_transport

MELLIN_FLOOR = 1e-6
SIGN_CONVENTION = ("box = d_0^2 - sum d_i^2; the family with mass mu is P = box - mu, "
                   "whose coefficients are V^k = mu^k; P - z has V^k(z) = (mu + z)^k")


@dataclass(frozen=True)
class Grids:
    s0: float = 0.4
    s_ratio: float = 0.75
    s_count: int = 24
    z_radius: float = 0.5
    z_count: int = 6
    xi: tuple = tuple(round(1.05 + 0.05 * j, 10) for j in range(10))
    eps_ratio: float = 0.7
    eps_count: int = 16

    def s_values(self):
        return geometric_grid(self.s0, self.s_ratio, self.s_count)

    def z_values(self):
        n = self.z_count
        return [as_mp(self.z_radius) * mp.cos((2 * i + 1) * mp.pi / (2 * n)) for i in range(n)]


def geometric_grid(t0, ratio, count):
    """Working-precision abscissae t0 * ratio^j (computed in mpmath, then rounded once)."""
    t0, ratio = as_mp(str(t0)), as_mp(str(ratio))
    return [precision.to_array_scalar(t0 * ratio ** j) for j in range(count)]


@dataclass
class ExtractionReport:
    pipeline: str
    recovered: dict
    reference: dict
    relative_errors: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)
    sample_columns: tuple = ()

    def __post_init__(self):
        if set(self.recovered) != set(self.reference):
            raise ValueError("recovered and reference must share keys")
        for k in self.recovered:
            self.relative_errors[k] = relative_error(self.recovered[k], self.reference[k])

    def max_error(self):
        return max(self.relative_errors.values())

    def to_dict(self):
        return {
            "pipeline": self.pipeline,
            "recovered": {str(k): _num(v) for k, v in self.recovered.items()},
            "reference": {str(k): _num(v) for k, v in self.reference.items()},
            "relative_errors": {str(k): v for k, v in self.relative_errors.items()},
            "diagnostics": self.diagnostics,
            "config": self.config,
        }


def relative_error(value, reference):
    """|value - ref| / |ref|, or the absolute error when the reference vanishes."""
    value, reference = as_mp(value), as_mp(reference)
    diff = abs(value - reference)
    return float(diff / abs(reference)) if reference != 0 else float(diff)


def _num(x):
    x = as_mp(x)
    if isinstance(x, mp.mpc) and x.imag != 0:
        return [float(x.real), float(x.imag)]
    return float(mp.re(x))


def fmt(x):
    """Deterministic text form used in sample tables."""
    return mp.nstr(as_mp(x), 25)


def checked_mprime(f, a):
    value = mellin_prime(f, a)
    if abs(value) < MELLIN_FLOOR:
        raise MellinZeroError(f"|M'(f)({a})| = {float(abs(value)):.3g} is below {MELLIN_FLOOR}")
    return value


def _reference(fam, k_max, reference, x=None):
    if reference == "closed_form":
        return {k: fam.hadamard_coefficient(k) for k in range(k_max + 1)}
    if reference == "transport":
        x = np.zeros(fam.d) if x is None else np.asarray(x, dtype=float)
        table = solve_transport(fam.model, x, max(k_max, 0), [x])
        return {k: precision.to_mp(table.values[k, 0]) for k in range(k_max + 1)}
    raise ValueError(f"unknown reference source {reference!r}")


# -- diagonal via the z-family ------------------------------------------------

def zfamily_brackets(fam, w, f, k_max, o, grids=Grids()):
    """L_{k, m'} = L[[s^(2k + 2m' + 3 - d)]][[z^m']] for m' = o..o+k_max, k <= k_max."""
    d = fam.d
    # L is a polynomial of degree K in z, so K + 1 nodes pin it down exactly;
    # K must reach z^(2 k_max + o) and meet the tail bound at the largest s
    probe = type(fam)(fam.d, fam.mu, None)
    zetas = [as_mp(fam.mu) + z for z in grids.z_values()]
    K_tail = len(truncated_terms(probe, zetas, w, profiles.rescale(f, grids.s_values()[0]))[0]) - 1
    K = max(grids.z_count - 1, 2 * k_max + o, K_tail)
    if K + 1 > grids.z_count:
        grids = replace(grids, z_count=K + 1)
    fam = type(fam)(fam.d, fam.mu, K)
    zs = grids.z_values()
    zetas = [as_mp(fam.mu) + z for z in zs]
    samples, zcoef = [], []
    tails = []
    for s in grids.s_values():
        fs = profiles.rescale(f, s)
        terms, tail = truncated_terms(fam, zetas, w, fs)
        tails.append(tail)
        row = []
        for z, zeta in zip(zs, zetas):
            val = mp.zero
            for t in reversed(terms):
                val = val * zeta + t
            row.append((z, val))
            samples.append((precision.to_mp(s), z, val))
        zcoef.append((precision.to_mp(s), fitting.fit_polynomial(row, K)))
    brackets, diag = {}, {"truncation_K": K, "z_count": grids.z_count, "max_tail_bound": max(tails), "s_fits": {}}
    for mz in range(o, o + k_max + 1):
        ladder = fitting.ExponentLadder.arithmetic(2 * mz + 3 - d, k_max + 1)
        fit = fitting.fit_ladder([(s, c[mz]) for s, c in zcoef], ladder)
        diag["s_fits"][f"z^{mz}"] = fit.diagnostics()
        for k in range(k_max + 1):
            brackets[(k, mz)] = fit.coefficients[k]
    return brackets, samples, diag


def extract_diagonal_zfamily(fam, w=None, f=None, k_max=2, o=0, grids=Grids(),
                             reference="closed_form", _label="zfamily"):
    """V^k_x(x) = sum_m q(k, m, o) L_{k, m+o} from the propagators of P - z."""
    w = w or StraightLine(fam.d)
    f = f or profiles.odd_bump()
    if abs(float(w.nu(np.zeros(1))[0]) - 1) > 1e-12:
        raise ValueError("the z-family recovery needs a unit-speed geodesic")
    brackets, samples, diag = zfamily_brackets(fam, w, f, k_max, o, grids)
    mprime_cache = {}

    def mprime(a):
        if a not in mprime_cache:
            mprime_cache[a] = checked_mprime(f, a)
        return mprime_cache[a]

    recovered, weights = {}, {}
    for k in range(k_max + 1):
        total = mp.zero
        for m in range(k + 1):
            q = combinatorics.q_coeff(k, m, o, fam.d)
            if q.coeff == 0:
                continue
            qv = q.evaluate(mprime)
            weights[f"{k},{m}"] = float(qv)
            total += qv * brackets[(k, m + o)]
        recovered[k] = total
    diag["q_weights"] = weights
    diag["sign_convention"] = SIGN_CONVENTION
    diag["provenance"] = ("z-coefficients of P - z read as powers of the Green operators"
                          if _label == "powers" else "z-family of P - z")
    config = {"d": fam.d, "mu": fam.mu, "k_max": k_max, "offset": o, "reference": reference,
              "grids": _grid_echo(grids)}
    return ExtractionReport(_label, recovered, _reference(fam, k_max, reference), diagnostics=diag,
                            config=config, samples=[tuple(fmt(v) for v in _split_row(r)) for r in samples],
                            sample_columns=("s", "z_re", "z_im", "value_re", "value_im"))


def extract_diagonal_powers(fam, w=None, f=None, k_max=2, o=0, grids=Grids(), reference="closed_form"):
    """Same numbers, with L_{k,m} read as pairings of (G^+)^(m+1) - (G^-)^(m+1)."""
    return extract_diagonal_zfamily(fam, w, f, k_max, o, grids, reference, _label="powers")


def _split_row(row):
    s, z, v = (as_mp(x) for x in row)
    return (s, mp.re(z), mp.im(z), mp.re(v), mp.im(v))


def _grid_echo(grids):
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in grids.__dict__.items()}


def scalar_curvature_d4(fam, w=None, f=None, grids=Grids()):
    """6 V^1_x(x) via the single-term weight 24 pi / M'(f)(1) at offset 0."""
    if fam.d != 4:
        raise ValueError("scalar curvature extraction is set up for d = 4")
    report = extract_diagonal_zfamily(fam, w, f, k_max=1, o=0, grids=grids)
    return 6 * report.recovered[1], report


# -- diagonal via the product with R ---------------------------------------------

def product_slot_samples(fam, w, f, k_max, xis, grids=Grids()):
    """Per xi: the s-ladder fit of the lifted pairing at exponents 2j + 2 - d."""
    d = fam.d
    lifted = fam.lifted()
    ladder = fitting.ExponentLadder.arithmetic(2 - d, k_max + 1)
    per_xi, samples, fits = {}, [], {}
    s_vals = grids.s_values()
    for xi in xis:
        wx = LiftedCurve(w, xi)
        data = []
        for s in s_vals:
            fs = profiles.rescale(f, s)
            val = pair_greens_many(lifted, [0], wx, fs)[0][0]
            data.append((precision.to_mp(s), val))
            samples.append((as_mp(xi), precision.to_mp(s), val))
        fit = fitting.fit_ladder(data, ladder)
        per_xi[xi] = fit.coefficients
        fits[str(xi)] = fit.diagnostics()
    return per_xi, samples, fits


def extract_diagonal_product(fam, w=None, f=None, k_max=2, grids=Grids(), degree_cap=None,
                             refine=True, reference="closed_form"):
    """V^k_x(x) from the xi^0 coefficient of the lifted pairing's (2k+2-d) slot."""
    d = fam.d
    w = w or StraightLine(d)
    f = f or profiles.odd_bump()
    if abs(float(w.nu(np.zeros(1))[0]) - 1) > 1e-9:
        raise ValueError("the curve must have nu_w(0) = 1")
    xis = list(grids.xi)
    per_xi, samples, fits = product_slot_samples(fam, w, f, k_max, xis, grids)

    def xi0(per, k):
        cap = degree_cap(k) if callable(degree_cap) else (degree_cap if degree_cap is not None else 4 * k)
        return fitting.xi_constant_term([(xi, per[xi][k]) for xi in per], cap)

    recovered, diag = {}, {"s_fits": fits, "xi_fits": {}, "sign_convention": SIGN_CONVENTION}
    for k in range(k_max + 1):
        xf = xi0(per_xi, k)
        a = combinatorics.a_coeff(k, 0, d + 1)
        av = a.evaluate(lambda arg: checked_mprime(f, arg))
        recovered[k] = xf.constant / av
        diag["xi_fits"][str(k)] = {"xi0": float(xf.constant), "residual_norm": xf.residual_norm,
                                   "coefficients": [float(c) for c in xf.coefficients]}
    if refine:
        # refined grid: halve the xi spacing over the same interval
        lo, hi = xis[0], xis[-1]
        n = 2 * len(xis) - 1
        fine = [round(lo + (hi - lo) * j / (n - 1), 12) for j in range(n)]
        extra = [xi for xi in fine if xi not in per_xi]
        more, more_samples, more_fits = product_slot_samples(fam, w, f, k_max, extra, grids)
        merged = {**per_xi, **more}
        shifts = {}
        for k in range(k_max + 1):
            coarse = xi0(per_xi, k).constant
            finer = xi0({xi: merged[xi] for xi in fine}, k).constant
            shifts[str(k)] = relative_error(finer, coarse)
        diag["xi_refinement_shift"] = shifts
    config = {"d": d, "mu": fam.mu, "k_max": k_max, "curve": type(w).__name__, "grids": _grid_echo(grids)}
    rows = [tuple(fmt(v) for v in (xi, s, mp.re(val))) for xi, s, val in samples]
    return ExtractionReport("product", recovered, _reference(fam, k_max, reference), diagnostics=diag,
                            config=config, samples=rows, sample_columns=("xi", "s", "value"))


# -- off-diagonal -----------------------------------------------------------------

def extract_offdiagonal(fam, x=None, y=None, chi=None, k_max=2, count=6, grids=Grids(), branch=None):
    """V^k_x(y) from the cutoff pairings along the line over y in M x R."""
    d = fam.d
    x = np.zeros(d) if x is None else np.asarray(x, dtype=float)
    if y is None:
        y = np.zeros(d)
        y[0], y[1] = 1.0, 0.3
    y = np.asarray(y, dtype=float)
    chi = chi or profiles.bump()
    gam = float(gamma_form(y - x))
    if gam <= 0:
        raise ValueError("y must lie in the open light cone of x")
    eps = geometric_grid(mp.mpf(repr(gam)) / 2, grids.eps_ratio, grids.eps_count)
    data, rows = [], []
    for e in eps:
        val = offdiag_pair_greens(fam, 0, x, y, float(e), chi, branch=branch)
        data.append((precision.to_mp(e), val))
        rows.append(tuple(fmt(v) for v in (precision.to_mp(e), val)))
    first = mp.mpf(3 - d) / 2
    ladder = fitting.ExponentLadder(tuple(first + j for j in range(max(count, k_max + 1))), min_gap=1)
    fit = fitting.fit_ladder(data, ladder)
    recovered = {}
    for k in range(k_max + 1):
        ratio = mellin_over_gamma(chi, k + first)
        if abs(ratio) < MELLIN_FLOOR:
            raise CutoffZeroError(f"(M(chi)/Gamma)({k + first}) = {float(ratio):.3g}")
        recovered[k] = (mp.mpf(2) ** (2 * k + 1) * mp.factorial(k) * mp.pi ** (mp.mpf(d - 1) / 2)
                        / ratio * fit.coefficients[k])
    diag = {"eps_fit": fit.diagnostics(), "branch": branch or ("+" if y[0] > x[0] else "-"),
            "sign_convention": SIGN_CONVENTION}
    config = {"d": d, "mu": fam.mu, "k_max": k_max, "x": list(map(float, x)), "y": list(map(float, y)),
              "count": count, "eps_ratio": grids.eps_ratio, "eps_count": grids.eps_count}
    reference = {k: fam.hadamard_coefficient(k) for k in range(k_max + 1)}
    return ExtractionReport("offdiagonal", recovered, reference, diagnostics=diag, config=config,
                            samples=rows, sample_columns=("eps", "value"))


# -- forward checks ---------------------------------------------------------------

def fd_weights(order, half_width):
    """Exact central finite-difference weights for the order-th derivative."""
    nodes = list(range(-half_width, half_width + 1))
    n = len(nodes)
    A = [[Fraction(x) ** i for x in nodes] for i in range(n)]
    b = [Fraction(math.factorial(order)) if i == order else Fraction(0) for i in range(n)]
    # Gaussian elimination over the rationals
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                fac = M[r][c] / M[c][c]
                M[r] = [a - fac * bb for a, bb in zip(M[r], M[c])]
    return nodes, [M[i][n] / M[i][i] for i in range(n)]


def nu_power_derivative(w, p, order, h=0.05, half_width=6):
    """(nu_w^p)^(order)(0) by a high-order central difference of the closed form."""
    if order == 0:
        return mp.one
    nodes, wts = fd_weights(order, half_width)
    t = np.array(nodes, dtype=precision.real_dtype()) * precision.real_dtype()(h)
    vals = np.power(w.nu(t), precision.to_array_scalar(p))
    acc = sum(precision.to_mp(v) * (mp.mpf(c.numerator) / c.denominator) for v, c in zip(vals, wts))
    return acc / mp.mpf(h) ** order


def intexp_prediction(fam, w, f, slots):
    """Predicted coefficient of s^(2j + 3 - d) in L(s) = w^*(G)[f_s] for j < slots."""
    d = fam.d
    out = []
    for j in range(slots):
        total = mp.zero
        for k in range(j + 1):
            n = j - k
            a = combinatorics.a_coeff(k, n, d).evaluate(lambda arg: mellin_prime(f, arg))
            p = k - mp.mpf(d) / 2 + 1
            total += a * fam.hadamard_coefficient(k) * nu_power_derivative(w, p, 2 * n)
        out.append(total)
    return out


def intexp_forward(fam, w, f=None, slots=3, grids=Grids()):
    """Compare the fitted s-ladder of L(s) with the a(k, n)-weighted derivative formula."""
    d = fam.d
    f = f or profiles.odd_bump()
    data, rows = [], []
    for s in grids.s_values():
        val = pair_greens_many(fam, [0], w, profiles.rescale(f, s))[0][0]
        data.append((precision.to_mp(s), val))
        rows.append((fmt(precision.to_mp(s)), fmt(val)))
    fit = fitting.fit_ladder(data, fitting.ExponentLadder.arithmetic(3 - d, slots))
    predicted = intexp_prediction(fam, w, f, slots)
    recovered = {j: fit.coefficients[j] for j in range(slots)}
    reference = {j: predicted[j] for j in range(slots)}
    config = {"d": d, "mu": fam.mu, "slots": slots, "curve": type(w).__name__}
    return ExtractionReport("intexp_forward", recovered, reference,
                            diagnostics={"s_fit": fit.diagnostics()}, config=config,
                            samples=rows, sample_columns=("s", "value"))


def msexp_check(alpha=1, terms=4, h=None, f=None, grids=Grids()):
    """Expansion of M'((h f_s)_odd)(alpha) in s against msexp_coeff for even h (default cos)."""
    h = h or profiles.cosine()
    f = f or profiles.odd_bump()
    alpha = Fraction(alpha)
    am = mp.mpf(alpha.numerator) / alpha.denominator
    data, rows = [], []
    for s in grids.s_values():
        g = profiles.odd_part(profiles.product(h, profiles.rescale(f, s)))
        val = mellin_prime(g, am)
        data.append((precision.to_mp(s), val))
        rows.append((fmt(precision.to_mp(s)), fmt(val)))
    fit = fitting.fit_ladder(data, fitting.ExponentLadder.arithmetic(am, terms))
    zero = np.zeros(1, dtype=precision.real_dtype())
    recovered, reference = {}, {}
    for k in range(terms):
        h2k = precision.to_mp(h.derivative(2 * k, zero)[0])
        c = combinatorics.msexp_coeff(k, alpha)
        reference[k] = mp.mpf(c.numerator) / c.denominator * h2k * mellin_prime(f, am + 2 * k)
        recovered[k] = fit.coefficients[k]
    return ExtractionReport("msexp", recovered, reference, diagnostics={"s_fit": fit.diagnostics()},
                            config={"alpha": str(alpha), "terms": terms}, samples=rows,
                            sample_columns=("s", "value"))
