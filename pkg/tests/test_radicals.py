from fractions import Fraction

import mpmath
import pytest

from melnikov_kit.poly import ParamPoly
from melnikov_kit.radicals import RadExpr, Ring


@pytest.fixture()
def ring():
    return Ring(("h", "k"))


def test_rational_roots_as_prime_powers(ring):
    r = ring.radical_root(Fraction(1, 2), 2)
    # (1/2)^(1/2) = (1/2) * 2^(1/2)
    assert r * r == RadExpr.from_rational(ring, Fraction(1, 2))
    assert (r * ring.radical_root(2, 2)).as_fraction() == 1 * Fraction(2, 2) + 0  # sqrt2*sqrt(1/2)=1


def test_adjoined_radical_relation(ring):
    h = ring.var("h")
    rho = ring.radical_root(h, 2)
    assert rho * rho == ring.from_poly(h)
    # (rho^2 - h) normalizes to zero
    assert (rho * rho - ring.from_poly(h)).is_zero()


def test_radical_content_dedup(ring):
    h, k = ring.var("h"), ring.var("k")
    base_a = 4 * h - 2 * k  # content 2, primitive 2h - k
    base_b = h - k / 2      # content 1/2, primitive 2h - k
    ra = ring.radical_root(base_a, 4)
    rb = ring.radical_root(base_b, 4)
    assert len(ring.radicals) == 1
    # ra / rb = (4h-2k)^(1/4) / (h-k/2)^(1/4) = 4^(1/4) = 2^(1/2)
    ratio = ra / rb
    assert ratio == ring.radical_root(2, 2)


def test_division_rationalizes_single_term(ring):
    h = ring.var("h")
    rho = ring.radical_root(h, 4)
    one_over = ring.one() / rho
    # 1/rho = rho^3 / h
    assert one_over * rho == ring.one()
    assert one_over.den == h


def test_division_two_term_sqrt(ring):
    # 1 / (1 + sqrt(2)) = sqrt(2) - 1
    s2 = ring.radical_root(2, 2)
    inv = ring.one() / (ring.one() + s2)
    assert inv == s2 - 1


def test_division_two_term_poly_radical(ring):
    h = ring.var("h")
    rho = ring.radical_root(h, 2)
    expr = ring.one() + rho
    inv = expr.inverse()
    assert (expr * inv) == ring.one()


def test_quartic_radical_inverse(ring):
    h = ring.var("h")
    rho = ring.radical_root(h, 4)
    expr = rho + rho * rho  # rho (1 + rho)
    assert (expr * expr.inverse()) == ring.one()


def test_substitution(ring):
    h, k = ring.var("h"), ring.var("k")
    e = ring.from_poly(h * h + k) / ring.from_poly(k)
    out = e.substitute_params({"h": Fraction(2)})
    assert out == (ring.from_poly(4 + k)) / ring.from_poly(k)
    s2 = ring.radical_root(2, 2)
    out2 = ring.from_poly(h).substitute_params({"h": s2})
    assert out2 == s2


def test_substitution_through_radical_base(ring):
    h, k = ring.var("h"), ring.var("k")
    rho = ring.radical_root(h, 2)
    assert rho.substitute_params({"h": Fraction(4)}).as_fraction() == 2
    # non-square value re-roots to a prime power
    assert rho.substitute_params({"h": Fraction(2)}) == ring.radical_root(2, 2)
    # polynomial value adjoins a radical on the substituted base
    quartic = ring.radical_root(k, 4)
    moved = quartic.substitute_params({"k": h + 1})
    assert moved == ring.radical_root(h + 1, 4)


def test_numeric_eval(ring):
    h = ring.var("h")
    rho = ring.radical_root(h, 4)
    e = (ring.one() + rho) / ring.from_poly(h)
    v = e.eval_mpf({"h": Fraction(16)}, digits=30)
    with mpmath.workdps(40):
        assert abs(v - (1 + 2) / mpmath.mpf(16)) < mpmath.mpf(10) ** -25


def test_equality_cross_multiplied(ring):
    h = ring.var("h")
    a = ring.from_poly(h * h - 1) / ring.from_poly(h - 1)
    b = ring.from_poly(h + 1)
    assert a == b


def test_pow_negative(ring):
    s2 = ring.radical_root(2, 2)
    assert s2 ** -2 == RadExpr.from_rational(ring, Fraction(1, 2))


def test_as_param_poly(ring):
    h = ring.var("h")
    e = ring.from_poly(3 * h) / ring.from_poly(ring.const(6))
    assert e.as_param_poly() == h / 2
