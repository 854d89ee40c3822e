import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from tabandwidth.polynomials import (
    RootFindingError,
    all_roots,
    bisect_real_root,
    det_bareiss,
    det_cofactor,
    exact_div,
    format_poly,
    mul,
    poly_gcd,
    square_free_factorization,
    trim,
)

Z = sympy.Symbol("z")


def to_sympy(p):
    return sympy.Poly(list(reversed(p)) or [0], Z)


def from_sympy(e):
    coeffs = sympy.Poly(sympy.expand(e), Z).all_coeffs()
    return trim([int(c) for c in reversed(coeffs)])


small_polys = st.lists(st.integers(-4, 4), min_size=0, max_size=4).map(trim)


def test_square_free_of_a6_characteristic():
    p = (1, -10, 33, -36)  # (1-3z)^2 (1-4z)
    parts = {mult: factor for factor, mult in square_free_factorization(p)}
    assert set(parts) == {1, 2}
    assert to_sympy(parts[2]).monic() == to_sympy((1, -3)).monic()
    assert to_sympy(parts[1]).monic() == to_sympy((1, -4)).monic()


def test_roots_report_multiplicity():
    roots = all_roots((1, -10, 33, -36))
    got = sorted((round(float(abs(z)), 12), m) for z, m, _ in roots)
    assert got == [(0.25, 1), (round(1 / 3, 12), 2)]


def test_roots_at_zero_are_exact():
    roots = all_roots((0, 0, -1, 1))
    assert (mpmath.mpc(0), 2, 0.0) in roots
    assert sum(m for _, m, _ in roots) == 3


def test_bisect_real_root():
    r = bisect_real_root((1, -2), 0, 1)
    assert abs(r - mpmath.mpf(1) / 2) < 1e-14
    with pytest.raises(ValueError):
        bisect_real_root((1, 1), 0, 1)


def test_root_failure_carries_residuals():
    with pytest.raises(RootFindingError) as info:
        all_roots((1, -3, 1, 2, -5, 1), max_iter=1)
    assert info.value.residuals


def test_format_poly():
    assert format_poly((1, 0, -4)) == "1 - 4ζ^2"
    assert format_poly((0, 1), "z") == "z"


@settings(max_examples=300, deadline=None)
@given(small_polys, small_polys)
def test_mul_and_exact_div_against_sympy(p, q):
    prod = mul(p, q)
    if not p or not q:
        assert prod == ()
        return
    assert prod == from_sympy(to_sympy(p).as_expr() * to_sympy(q).as_expr())
    assert exact_div(prod, q) == p


@settings(max_examples=200, deadline=None)
@given(small_polys, small_polys)
def test_gcd_divides_both(p, q):
    if not p or not q:
        return
    g = poly_gcd(p, q)
    ref = sympy.gcd(to_sympy(p), to_sympy(q))
    assert sympy.degree(ref, Z) == len(g) - 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(small_polys.filter(lambda p: len(p) > 1), st.integers(1, 3)), min_size=1, max_size=3))
def test_square_free_factorization_reassembles(parts):
    p = (1,)
    for f, m in parts:
        for _ in range(m):
            p = mul(p, f)
    factors = square_free_factorization(p)
    back = (1,)
    for f, m in factors:
        assert sympy.degree(sympy.gcd(to_sympy(f), to_sympy(f).diff(Z)), Z) == 0
        for _ in range(m):
            back = mul(back, f)
    # equal up to a constant factor
    ratio = sympy.cancel(to_sympy(p).as_expr() / to_sympy(back).as_expr())
    assert ratio.is_number


matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(small_polys, min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_determinants_agree_with_sympy(m):
    ref = sympy.Matrix([[to_sympy(e).as_expr() for e in row] for row in m]).det(method="berkowitz")
    expected = from_sympy(ref) if sympy.expand(ref) != 0 else ()
    assert det_cofactor(m) == expected
    assert det_bareiss(m) == expected


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=7).map(trim).filter(lambda p: len(p) > 1))
def test_roots_against_mpmath_polyroots(p):
    roots = all_roots(p)
    total = sum(m for _, m, _ in roots)
    assert total == len(p) - 1
    ref = mpmath.polyroots(list(reversed(p)), maxsteps=400, extraprec=300)
    mine = sorted(float(abs(z)) for z, m, _ in roots for _ in range(m))
    theirs = sorted(float(abs(z)) for z in ref)
    assert mine == pytest.approx(theirs, rel=1e-6, abs=1e-9)
