"""The classical smooth nonzero caloric function with zero initial trace.

u(t, x) sums g^(k)(t) x^(2k) / (2k)! over k, where g(t) = exp(-1/t^alpha)
for t > 0 and 0 otherwise.  For integer alpha >= 2 every derivative of g
is P_k(1/t) g(t) with P_k an exact-rational polynomial obeying

    P_0 = 1,   P_{k+1}(s) = -s^2 P_k'(s) + alpha s^(alpha+1) P_k(s).

Truncating the series after K terms leaves a heat-equation residual that
telescopes to the single term g^(K+1)(t) x^(2K) / (2K)!.  That residual
is astronomically small (around 1e-22 at K = 30 on moderate regions), so
the independent finite-difference check runs in arbitrary precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import mpmath as mp

OVERFLOW_LIMIT = 1.0e300


class EvaluationOverflow(OverflowError):
    pass


Poly = Tuple[Fraction, ...]  # coefficient of s^i at index i


def _differentiate(p: Poly) -> Poly:
    return tuple(c * i for i, c in enumerate(p))[1:] or (Fraction(0),)


def _shift(p: Poly, k: int) -> Poly:
    return (Fraction(0),) * k + tuple(p)


def _add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    p = tuple(p) + (Fraction(0),) * (n - len(p))
    q = tuple(q) + (Fraction(0),) * (n - len(q))
    return tuple(a + b for a, b in zip(p, q))


def _scale(p: Poly, c: Fraction) -> Poly:
    return tuple(c * a for a in p)


@dataclass
class TychonovSeries:
    """Derivative polynomials of g for one integer alpha >= 2."""

    alpha: int
    poly_table: List[Poly]

    @classmethod
    def build(cls, alpha: int, depth: int) -> "TychonovSeries":
        if not isinstance(alpha, int) or alpha < 2:
            raise ValueError(f"alpha must be an integer >= 2, got {alpha}")
        table: List[Poly] = [(Fraction(1),)]
        for _ in range(depth):
            p = table[-1]
            nxt = _add(
                _scale(_shift(_differentiate(p), 2), Fraction(-1)),
                _scale(_shift(p, alpha + 1), Fraction(alpha)),
            )
            table.append(nxt)
        return cls(alpha=alpha, poly_table=table)

    def ensure_depth(self, depth: int):
        while len(self.poly_table) <= depth:
            p = self.poly_table[-1]
            nxt = _add(
                _scale(_shift(_differentiate(p), 2), Fraction(-1)),
                _scale(_shift(p, self.alpha + 1), Fraction(self.alpha)),
            )
            self.poly_table.append(nxt)

    def poly(self, k: int) -> Poly:
        self.ensure_depth(k)
        return self.poly_table[k]

    def g_derivative(self, k: int, t: float) -> float:
        """d^k/dt^k of g at t (0 for t <= 0)."""
        if t <= 0:
            return 0.0
        s = 1.0 / t
        return _horner_float(self.poly(k), s) * math.exp(-(s**self.alpha))

    def g_derivative_mp(self, k: int, t) -> mp.mpf:
        if t <= 0:
            return mp.mpf(0)
        s = mp.mpf(1) / mp.mpf(t)
        return _horner_mp(self.poly(k), s) * mp.e ** (-(s**self.alpha))


def _horner_float(p: Poly, s: float) -> float:
    acc = 0.0
    for c in reversed(p):
        acc = acc * s + float(c)
    return acc


def _horner_mp(p: Poly, s) -> mp.mpf:
    acc = mp.mpf(0)
    for c in reversed(p):
        acc = acc * s + mp.mpf(c.numerator) / mp.mpf(c.denominator)
    return acc


def tychonov_eval(series: TychonovSeries, t: float, x: float, K: int) -> float:
    """Partial sum u_K(t, x) with compensated summation."""
    if K < 0:
        raise ValueError("K must be >= 0")
    if t <= 0:
        return 0.0
    series.ensure_depth(K + 1)
    total = 0.0
    carry = 0.0
    xx = float(x) * float(x)
    x_pow = 1.0
    fact = 1.0
    for k in range(K + 1):
        if k > 0:
            x_pow *= xx
            fact *= (2 * k - 1) * (2 * k)
        term = series.g_derivative(k, t) * x_pow / fact
        if not math.isfinite(term) or abs(term) > OVERFLOW_LIMIT:
            raise EvaluationOverflow(f"series term {k} exceeded {OVERFLOW_LIMIT:g}")
        # Kahan step
        y = term - carry
        s = total + y
        carry = (s - total) - y
        total = s
    return total


def tychonov_eval_mp(series: TychonovSeries, t, x, K: int) -> mp.mpf:
    """Arbitrary-precision partial sum (precision from the ambient mp context)."""
    if t <= 0:
        return mp.mpf(0)
    series.ensure_depth(K + 1)
    total = mp.mpf(0)
    x = mp.mpf(x)
    for k in range(K + 1):
        total += series.g_derivative_mp(k, t) * x ** (2 * k) / mp.factorial(2 * k)
    return total


def tychonov_residual(series: TychonovSeries, K: int, t_values: Sequence[float], x_values: Sequence[float]) -> float:
    """Max |d_t u_K - d_xx u_K| over the grid, by the telescoping formula."""
    if min(t_values) <= 0:
        raise ValueError("the region must stay away from t = 0")
    series.ensure_depth(K + 1)
    fact = math.factorial(2 * K)
    worst = 0.0
    for t in t_values:
        top = abs(series.g_derivative(K + 1, t))
        for x in x_values:
            r = top * abs(float(x)) ** (2 * K) / fact
            worst = max(worst, r)
    return worst


def fd_heat_residual(series: TychonovSeries, K: int, t, x, delta: str = "1e-25", dps: int = 120) -> mp.mpf:
    """Centered-difference heat residual of u_K at one point.

    Runs in arbitrary precision because the true residual sits far below
    double roundoff; never touches the telescoping formula.
    """
    with mp.workdps(dps):
        d = mp.mpf(delta)
        t = mp.mpf(t)
        x = mp.mpf(x)
        u = lambda tt, xx: tychonov_eval_mp(series, tt, xx, K)
        du_dt = (u(t + d, x) - u(t - d, x)) / (2 * d)
        d2u_dx2 = (u(t, x + d) - 2 * u(t, x) + u(t, x - d)) / (d * d)
        return du_dt - d2u_dx2


def analytic_heat_residual_mp(series: TychonovSeries, K: int, t, x, dps: int = 120) -> mp.mpf:
    """The telescoping residual g^(K+1)(t) x^(2K) / (2K)! in high precision."""
    with mp.workdps(dps):
        t = mp.mpf(t)
        x = mp.mpf(x)
        return series.g_derivative_mp(K + 1, t) * x ** (2 * K) / mp.factorial(2 * K)
