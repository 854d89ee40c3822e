"""Exact integer polynomials in one variable and their numeric roots.

A polynomial is a tuple of ``int`` coefficients, lowest degree first, with no
trailing zeros; the zero polynomial is ``()``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

import mpmath

Poly = tuple[int, ...]

ZERO: Poly = ()
ONE: Poly = (1,)


class RootFindingError(ArithmeticError):
    """The simultaneous root iteration did not converge."""

    def __init__(self, message: str, residuals: list[float]):
        super().__init__(message)
        self.residuals = residuals


def trim(coeffs: Sequence) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def degree(p: Poly) -> int:
    return len(p) - 1  # -1 for the zero polynomial


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, neg(q))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ZERO
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def monomial(coeff: int, exponent: int) -> Poly:
    return trim([0] * exponent + [coeff])


def derivative(p: Poly) -> Poly:
    return trim(i * c for i, c in enumerate(p) if i)


def evaluate(p: Sequence, z):
    acc = 0
    for c in reversed(p):
        acc = acc * z + c
    return acc


def _divmod_rational(p: Sequence[Fraction], q: Sequence[Fraction]):
    p, q = list(p), list(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    rem = [Fraction(c) for c in p]
    lead = Fraction(q[-1])
    for k in range(len(p) - len(q), -1, -1):
        c = rem[k + len(q) - 1] / lead
        quot[k] = c
        if c:
            for j, b in enumerate(q):
                rem[k + j] -= c * b
    return trim(quot), trim(rem[: len(q) - 1])


def exact_div(p: Poly, q: Poly) -> Poly:
    """``p / q`` when ``q`` divides ``p`` over the integers; raises otherwise."""
    quot, rem = _divmod_rational(p, q)
    if rem or any(c.denominator != 1 for c in quot):
        raise ArithmeticError("polynomial division is not exact")
    return tuple(int(c) for c in quot)


def content(p: Sequence) -> int:
    g = 0
    for c in p:
        g = gcd(g, int(c))
    return g


def primitive(p: Sequence[Fraction]) -> Poly:
    """Integer polynomial proportional to ``p`` with content 1 and positive lead."""
    if not p:
        return ZERO
    den = 1
    for c in p:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in p]
    g = content(ints)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return trim(ints)


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Primitive greatest common divisor over the rationals."""
    a = [Fraction(c) for c in p]
    b = [Fraction(c) for c in q]
    while b:
        _, r = _divmod_rational(a, b)
        a, b = b, list(r)
    return primitive(a)


def square_free_factorization(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = c * prod(f_i ** i)`` with ``f_i`` square-free and coprime.

    Returns the nonconstant primitive factors with their multiplicities.
    """
    if degree(p) < 1:
        return []
    dp = derivative(p)
    a = poly_gcd(p, dp)
    b = exact_div_rational(p, a)
    c = exact_div_rational(dp, a)
    d = _sub_rational(c, _derivative_rational(b))
    out = []
    i = 1
    while len(b) > 1:
        a = poly_gcd(b, primitive(d)) if d else primitive(b)
        if len(a) > 1:
            out.append((a, i))
        b_next = exact_div_rational(b, a)
        c = exact_div_rational(d, a) if d else ()
        b = b_next
        d = _sub_rational(c, _derivative_rational(b))
        i += 1
    return out


def exact_div_rational(p, q) -> tuple:
    quot, rem = _divmod_rational(p, q)
    if rem:
        raise ArithmeticError("polynomial division is not exact")
    return quot


def _sub_rational(p, q) -> tuple:
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n))


def _derivative_rational(p) -> tuple:
    return trim(i * c for i, c in enumerate(p) if i)


# --------------------------------------------------------------------------
# determinants over Z[z]

Matrix = list[list[Poly]]


def det_cofactor(m: Matrix) -> Poly:
    """Laplace expansion along rows, memoised on the set of remaining columns."""
    n = len(m)
    if n == 0:
        return ONE

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset) -> Poly:
        if row == n:
            return ONE
        acc = ZERO
        for pos, col in enumerate(sorted(cols)):
            entry = m[row][col]
            if not entry:
                continue
            term = mul(entry, minor(row + 1, cols - {col}))
            acc = sub(acc, term) if pos % 2 else add(acc, term)
        return acc

    return minor(0, frozenset(range(n)))


def det_bareiss(m: Matrix) -> Poly:
    """Fraction-free Gaussian elimination; every division is exact in Z[z]."""
    n = len(m)
    if n == 0:
        return ONE
    a = [list(row) for row in m]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = sub(mul(a[i][j], a[k][k]), mul(a[i][k], a[k][j]))
                a[i][j] = exact_div(num, prev)
            a[i][k] = ZERO
        prev = a[k][k]
    result = a[n - 1][n - 1]
    return neg(result) if sign < 0 else result


# --------------------------------------------------------------------------
# roots

@dataclass(frozen=True)
class Root:
    value: complex
    modulus: float
    multiplicity: int
    residual: float  # relative residual |p(z)| / sum |a_i| |z|^i of its square-free factor


def _aberth(coeffs: Sequence[int], dps: int, max_iter: int) -> list:
    """All roots of a square-free integer polynomial by Aberth-Ehrlich iteration."""
    deg = len(coeffs) - 1
    if deg == 1:
        return [mpmath.mpf(-coeffs[0]) / coeffs[1]]
    with mpmath.workdps(dps):
        a = [mpmath.mpf(c) for c in coeffs]
        da = [i * a[i] for i in range(1, deg + 1)]
        # Cauchy-type radius for the initial circle
        lead = abs(a[-1])
        radius = 1 + max(abs(c) for c in a[:-1]) / lead
        low = min(abs(a[0]) / (abs(a[0]) + max(abs(c) for c in a[1:])), radius) if a[0] else mpmath.mpf(1)
        r0 = (radius + low) / 2
        z = [r0 * mpmath.expj(2 * mpmath.pi * k / deg + mpmath.mpf("0.4")) for k in range(deg)]
        eps = mpmath.mpf(10) ** (-(dps - 8))
        for _ in range(max_iter):
            biggest = mpmath.mpf(0)
            for i in range(deg):
                zi = z[i]
                p = mpmath.polyval(a[::-1], zi)
                dp = mpmath.polyval(da[::-1], zi)
                if p == 0:
                    continue
                ratio = p / dp if dp != 0 else mpmath.mpf(1)
                s = sum(1 / (zi - z[j]) for j in range(deg) if j != i)
                step = ratio / (1 - ratio * s)
                z[i] = zi - step
                biggest = max(biggest, abs(step) / max(abs(z[i]), eps))
            if biggest < eps:
                return z
        raise RootFindingError(
            f"root iteration did not converge in {max_iter} steps",
            [float(relative_residual(coeffs, zi)) for zi in z],
        )


def relative_residual(coeffs: Sequence[int], z) -> mpmath.mpf:
    num = abs(mpmath.polyval([mpmath.mpf(c) for c in reversed(coeffs)], z))
    den = sum(abs(c) * abs(z) ** i for i, c in enumerate(coeffs))
    return num / den if den else num


def all_roots(p: Poly, tolerance: float = 1e-12, dps: int = 60, max_iter: int = 500) -> list[tuple]:
    """Roots of ``p`` as ``(mpc value, multiplicity, residual)`` triples."""
    out = []
    p = trim(p)
    zeros = next((i for i, c in enumerate(p) if c), 0)
    if zeros:
        # exact roots at 0; the relative residual is meaningless there
        out.append((mpmath.mpc(0), zeros, 0.0))
        p = p[zeros:]
    if len(p) <= 1:
        return out
    for factor, mult in square_free_factorization(p):
        for z in _aberth(factor, dps, max_iter):
            with mpmath.workdps(dps):
                res = relative_residual(factor, z)
            if res > tolerance:
                raise RootFindingError(
                    f"root {complex(z)} has residual {float(res):.3g} above tolerance {tolerance}",
                    [float(res)],
                )
            out.append((mpmath.mpc(z), mult, float(res)))
    return out


def bisect_real_root(p: Sequence[int], lo, hi, tolerance: float = 1e-15, dps: int = 60):
    """Root of ``p`` in ``[lo, hi]`` given a sign change there, by bisection."""
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(c) for c in reversed(p)]
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        flo = mpmath.polyval(coeffs, lo)
        fhi = mpmath.polyval(coeffs, hi)
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if (flo > 0) == (fhi > 0):
            raise ValueError("no sign change on the bracket")
        while hi - lo > tolerance * max(abs(hi), 1e-30):
            mid = (lo + hi) / 2
            fm = mpmath.polyval(coeffs, mid)
            if fm == 0:
                return mid
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        return (lo + hi) / 2


def format_poly(p: Poly, var: str = "ζ") -> str:
    if not p:
        return "0"
    parts = []
    for i, c in enumerate(p):
        if not c:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else str(mag)) + var + (f"^{i}" if i > 1 else "")
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text
