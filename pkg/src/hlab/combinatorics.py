"""Exact coefficients of the diagonal recovery formulas.

Every quantity is a ``Term``: a rational coefficient times pi^(pi_power)
times a product of opaque symbols M'(f)(a)^e. Identities are decided in
exact rational arithmetic once all symbols have cancelled.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from mpmath import mp

from .errors import SymbolMismatchError
from .special import generalized_binomial


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    pi_power: Fraction = Fraction(0)
    mellin: tuple = ()  # sorted pairs (argument, exponent), exponents nonzero

    @staticmethod
    def make(coeff, pi_power=0, mellin=None):
        symbols = {}
        for arg, e in (mellin or {}).items():
            symbols[Fraction(arg)] = symbols.get(Fraction(arg), 0) + e
        return Term(Fraction(coeff), Fraction(pi_power),
                    tuple(sorted((a, e) for a, e in symbols.items() if e)))

    def __mul__(self, other):
        if not isinstance(other, Term):
            return Term(self.coeff * Fraction(other), self.pi_power, self.mellin)
        symbols = dict(self.mellin)
        for a, e in other.mellin:
            symbols[a] = symbols.get(a, 0) + e
        return Term.make(self.coeff * other.coeff, self.pi_power + other.pi_power, symbols)

    __rmul__ = __mul__

    @property
    def is_rational(self):
        return self.pi_power == 0 and not self.mellin

    def rational(self):
        if not self.is_rational:
            raise SymbolMismatchError(f"term still carries pi^{self.pi_power} and M' symbols {self.mellin}")
        return self.coeff

    def evaluate(self, mprime):
        """Numerical value given a callable a -> M'(f)(a)."""
        out = mp.mpf(self.coeff.numerator) / self.coeff.denominator
        out *= mp.pi ** (mp.mpf(self.pi_power.numerator) / self.pi_power.denominator)
        for a, e in self.mellin:
            out *= mprime(a) ** e
        return out

    def __str__(self):
        parts = [str(self.coeff)]
        if self.pi_power:
            parts.append(f"pi^({self.pi_power})")
        parts += [f"M'({a})^{e}" for a, e in self.mellin]
        return " * ".join(parts)


def _half(d):
    return Fraction(d, 2)


def a_coeff(k, n, d):
    """a(k, n) = pi^((2-d)/2) n! / (4^k k! (2n)!) binom(k+n+1-d/2, n) M'(f)(2k+2n+3-d)."""
    if k < 0 or n < 0:
        raise ValueError("k and n must be non-negative")
    rat = Fraction(factorial(n), 4 ** k * factorial(k) * factorial(2 * n))
    rat *= generalized_binomial(k + n + 1 - _half(d), n)
    return Term.make(rat, Fraction(2 - d, 2), {2 * k + 2 * n + 3 - d: 1})


def alpha_matrix(k, m, l, d):
    """alpha(k)_{ml} = binom(l+m, m) a(l+m, k-l)."""
    if not 0 <= l <= k:
        raise ValueError("need 0 <= l <= k")
    return a_coeff(l + m, k - l, d) * generalized_binomial(Fraction(l + m), m)


def q_coeff(k, m, o, d):
    """q(k, m, o): the left-inverse weights for the offset-o block."""
    if not 0 <= m <= k:
        raise ValueError("need 0 <= m <= k")
    rat = Fraction(4 ** (k + m + o) * factorial(m + o) * factorial(k))
    rat *= generalized_binomial(_half(d) - 1 - o - k, m)
    rat *= generalized_binomial(2 * k + o + 1 - _half(d), k - m)
    return Term.make(rat, _half(d) - 1, {2 * k + 2 * m + 2 * o - d + 3: -1})


@dataclass
class LeftInverseCertificate:
    k: int
    o: int
    d: int
    residuals: list = field(default_factory=list)  # exact Fractions, one per l

    @property
    def holds(self):
        return all(r == 0 for r in self.residuals)

    def __bool__(self):
        return self.holds


def verify_left_inverse(k, o, d, q=q_coeff):
    """Check sum_m q(k,m,o) alpha(k)_{m+o, l} = delta_{kl} for l = 0..k exactly."""
    residuals = []
    for l in range(k + 1):
        total = Fraction(0)
        for m in range(k + 1):
            prod = q(k, m, o, d) * alpha_matrix(k, m + o, l, d)
            if not prod.is_rational:
                raise SymbolMismatchError(
                    f"symbols do not cancel at k={k}, m={m}, o={o}, l={l}, d={d}: {prod}")
            total += prod.coeff
        residuals.append(total - (1 if l == k else 0))
    return LeftInverseCertificate(k, o, d, residuals)


def sweep_left_inverse(k_max=6, o_max=4, d_min=2, d_max=8, q=q_coeff):
    return [verify_left_inverse(k, o, d, q) for d in range(d_min, d_max + 1)
            for o in range(o_max + 1) for k in range(k_max + 1)]


def msexp_coeff(k, alpha):
    """k!/(2k)! binom((alpha + 2k - 1)/2, k), exact for rational alpha."""
    alpha = Fraction(alpha)
    return Fraction(factorial(k), factorial(2 * k)) * generalized_binomial((alpha + 2 * k - 1) / 2, k)


def q_even_offset(k, m, d):
    """The o = d/2 - 1 weights written without the offset (d even)."""
    if d % 2:
        raise ValueError("d must be even")
    h = d // 2
    rat = Fraction(4 ** (h - 1) * 4 ** (k + m) * factorial(m + h - 1) * factorial(k))
    rat *= generalized_binomial(Fraction(-k), m) * generalized_binomial(Fraction(2 * k), k - m)
    return Term.make(rat, h - 1, {2 * k + 2 * m + 1: -1})


def q_single_term(k, d):
    """q(k, 0, d/2 - 1 - k) = (4 pi)^(d/2-1) (d/2-1-k)! k! / M'(f)(1) for d even, k <= d/2 - 1."""
    h = d // 2
    if d % 2 or k > h - 1:
        raise ValueError("needs d even and k <= d/2 - 1")
    return Term.make(4 ** (h - 1) * factorial(h - 1 - k) * factorial(k), h - 1, {1: -1})
