"""Coefficient brackets: exponent ladders in s or eps, polynomials in z and xi.

``fit_ladder`` peels an asymptotic expansion sum_i c_i t^(e_i) term by term.
For each slot it divides the residual by t^(e_i) and Richardson-extrapolates
in the known powers: first those of the slots already peeled (whose
estimates leave small multiples behind), then the higher ones; because the samples form a geometric sequence
t_j = t_0 r^j, eliminating t^p from neighbours is (u_{j+1} - r^p u_j)/(1 - r^p).
All arithmetic is carried out in mpmath; a float64 shadow of the linear
weights tracks how sample noise propagates into each coefficient.
"""

from dataclasses import dataclass, field

import numpy as np
from mpmath import mp

from . import precision
from .errors import DegenerateNodesError, IllConditionedError, NoiseFloorError
from .special import as_mp

MAX_CONDITION = 1e8
NOISE_FLOOR_RTOL = 1e-3


@dataclass(frozen=True)
class ExponentLadder:
    exponents: tuple
    min_gap: float = 2.0

    def __post_init__(self):
        e = [as_mp(x) for x in self.exponents]
        if not e:
            raise ValueError("empty ladder")
        for a, b in zip(e, e[1:]):
            if not b > a:
                raise ValueError("ladder exponents must be strictly increasing")
            if b - a < self.min_gap - 1e-12:
                raise ValueError(f"ladder gap {b - a} below the declared minimum {self.min_gap}")
        object.__setattr__(self, "exponents", tuple(e))

    @classmethod
    def arithmetic(cls, first, count, gap=2):
        first = as_mp(first)
        return cls(tuple(first + gap * j for j in range(count)), min_gap=gap)

    @property
    def count(self):
        return len(self.exponents)

    def powers_after(self, i, extra):
        """Exponents to eliminate for slot i, relative to e_i.

        The already peeled slots come first (their estimates leave small
        residual multiples of t^(e_l)), then the higher slots, then the
        ladder continued with the minimum gap.
        """
        e = self.exponents
        out = [x - e[i] for x in e[:i]] + [x - e[i] for x in e[i + 1:]]
        last = e[-1] - e[i]
        for n in range(1, extra + 1):
            out.append(last + self.min_gap * n)
        return out


@dataclass
class AsymptoticFit:
    ladder: ExponentLadder
    coefficients: list
    residual_norm: float
    condition_estimate: float
    errors: list = field(default_factory=list)
    choices: list = field(default_factory=list)

    def coefficient(self, exponent):
        target = as_mp(exponent)
        for e, c in zip(self.ladder.exponents, self.coefficients):
            if abs(e - target) < 1e-12:
                return c
        raise KeyError(f"exponent {exponent} not on the ladder")

    def diagnostics(self):
        return {
            "exponents": [float(e) for e in self.ladder.exponents],
            "residual_norm": self.residual_norm,
            "condition_estimate": self.condition_estimate,
            "error_estimates": [float(x) for x in self.errors],
            "richardson_choice": self.choices,
        }


def _geometric_ratio(t):
    r = t[1] / t[0]
    if not 0 < r < 1:
        raise ValueError("abscissae must decrease")
    for j, tj in enumerate(t):
        if abs(tj / (t[0] * r ** j) - 1) > 1e-12:
            raise ValueError("abscissae must form a geometric sequence")
    return r


def fit_ladder(samples, ladder, noise_rtol=None, max_condition=MAX_CONDITION,
               noise_floor_rtol=NOISE_FLOOR_RTOL):
    """Fit sum_i c_i t^(e_i) to samples [(t_j, v_j)] on a decreasing geometric grid.

    ``noise_rtol`` is the relative noise assumed in each sample; by default a
    few units of the working precision the samples were computed in.
    """
    if noise_rtol is None:
        noise_rtol = 8 * precision.eps()
    t = [as_mp(precision.to_mp(s) if isinstance(s, np.generic) else s) for s, _ in samples]
    v = [as_mp(precision.to_mp(x) if isinstance(x, np.generic) else x) for _, x in samples]
    N, n = len(t), ladder.count
    if N < n + 4:
        raise ValueError(f"need at least {n + 4} samples for {n} coefficients, got {N}")
    r = _geometric_ratio(t)
    vabs = np.array([float(abs(x)) for x in v])
    vmax = float(vabs.max())
    if vmax == 0:
        return AsymptoticFit(ladder, [mp.zero] * n, 0.0, 0.0, [0.0] * n, [None] * n)
    tf = np.array([float(x) for x in t])

    coeffs, weights, errors, choices = [], [], [], []
    resid = list(v)
    resid_w = np.eye(N)
    for i, e in enumerate(ladder.exponents):
        te = [tj ** e for tj in t]
        row = [resid[j] / te[j] for j in range(N)]
        W = resid_w / np.array([float(x) for x in te])[:, None]
        powers = ladder.powers_after(i, N)
        best = None
        level_prev, W_prev = row, W
        for m in range(1, N):
            rp = r ** powers[m - 1]
            rpf = float(rp)
            den = 1 - rp
            level = [(level_prev[j + 1] - rp * level_prev[j]) / den for j in range(N - m)]
            W_level = (W_prev[1:] - rpf * W_prev[:-1]) / float(den)
            noise = noise_rtol * (np.abs(W_level) @ vabs)
            if m < i:
                level_prev, W_prev = level, W_level
                continue
            for j in range(N - m):
                trunc = max(abs(level[j] - level_prev[j]), abs(level[j] - level_prev[j + 1]))
                if j + 1 < N - m:
                    trunc = max(trunc, abs(level[j] - level[j + 1]))
                err = float(trunc) + float(noise[j])
                if best is None or err < best[0]:
                    best = (err, level[j], W_level[j], (m, j))
            level_prev, W_prev = level, W_level
        err, c, w_row, choice = best
        scale = max(float(abs(c)), vmax / float(tf[0]) ** float(e))
        if err > noise_floor_rtol * scale:
            raise NoiseFloorError(
                f"Richardson levels stop contracting for exponent {float(e):g}: "
                f"best error {err:.3g} against scale {scale:.3g}")
        coeffs.append(c)
        weights.append(w_row)
        errors.append(err)
        choices.append(list(choice))
        resid = [resid[j] - c * te[j] for j in range(N)]
        resid_w = resid_w - np.outer(np.array([float(x) for x in te]), w_row)

    cond = 0.0
    for c, w_row, e in zip(coeffs, weights, ladder.exponents):
        denom = max(float(abs(c)), vabs[0] / float(tf[0]) ** float(e))
        cond = max(cond, float(np.abs(w_row) @ vabs) / denom)
    if cond > max_condition:
        raise IllConditionedError(f"condition estimate {cond:.3g} exceeds {max_condition:g}")
    residual = max(float(abs(x)) for x in resid) / vmax
    return AsymptoticFit(ladder, coeffs, residual, cond, errors, choices)


def _check_nodes(nodes):
    scale = max([abs(z) for z in nodes] + [mp.one])
    for a in range(len(nodes)):
        for b in range(a):
            if abs(nodes[a] - nodes[b]) <= 1e-14 * scale:
                raise DegenerateNodesError(f"coincident nodes {nodes[a]} and {nodes[b]}")


def fit_polynomial(samples, degree):
    """Coefficients (lowest first) of the degree-bounded polynomial through the samples.

    With more nodes than unknowns the fit is least squares.
    """
    nodes = [as_mp(z) for z, _ in samples]
    vals = [as_mp(x) for _, x in samples]
    if len(set(map(complex, nodes))) < len(nodes):
        raise DegenerateNodesError("coincident nodes")
    _check_nodes(nodes)
    if len(nodes) < degree + 1:
        raise DegenerateNodesError(f"need {degree + 1} distinct nodes, got {len(nodes)}")
    A = mp.matrix(len(nodes), degree + 1)
    for i, z in enumerate(nodes):
        p = mp.one
        for j in range(degree + 1):
            A[i, j] = p
            p *= z
    b = mp.matrix(vals)
    if len(nodes) == degree + 1:
        sol = mp.lu_solve(A, b)
    else:
        sol = mp.qr_solve(A, b)[0]
    return [sol[j] for j in range(degree + 1)]


def polynomial_residual(samples, coefficients):
    worst = mp.zero
    for z, val in samples:
        z = as_mp(z)
        acc = mp.zero
        for c in reversed(coefficients):
            acc = acc * z + c
        worst = max(worst, abs(acc - as_mp(val)))
    return worst


@dataclass
class XiFit:
    constant: object
    coefficients: list
    residual_norm: float


def xi_constant_term(samples, degree_cap):
    """xi^0 coefficient of an even polynomial in xi of degree at most degree_cap."""
    half = degree_cap // 2
    if len(samples) < half + 1:
        raise DegenerateNodesError(f"need at least {half + 1} xi nodes")
    for xi, _ in samples:
        if not as_mp(xi) > 1:
            raise ValueError("xi nodes must exceed 1")
    sq = [(as_mp(xi) ** 2, val) for xi, val in samples]
    coeffs = fit_polynomial(sq, half)
    scale = max(abs(as_mp(val)) for _, val in samples) or mp.one
    res = float(polynomial_residual(sq, coeffs) / scale)
    return XiFit(coeffs[0], coeffs, res)
