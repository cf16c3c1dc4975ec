from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from melnikov_kit.radicals import RadExpr, Ring
from melnikov_kit.series import TruncSeries


@pytest.fixture()
def ring():
    return Ring(("h",))


def S(ring, coeffs, order, var="x"):
    return TruncSeries(ring, var, [Fraction(c) for c in coeffs], order)


def binomial_reciprocal_sqrt_coeffs(n):
    """Independent oracle: coefficients of (1+x)^(-1/2) via the recurrence
    c_k = c_{k-1} * (-1/2 - (k-1)) / k."""
    out = [Fraction(1)]
    for k in range(1, n):
        out.append(out[-1] * (Fraction(-1, 2) - (k - 1)) / k)
    return out


def test_reciprocal_sqrt_of_one_plus_x(ring):
    s = S(ring, [1, 1], 4)
    t = s.reciprocal_sqrt()
    expected = binomial_reciprocal_sqrt_coeffs(4)
    # 1 - x/2 + 3x^2/8 - 5x^3/16
    assert expected == [Fraction(1), Fraction(-1, 2), Fraction(3, 8), Fraction(-5, 16)]
    for k in range(4):
        assert t[k] == RadExpr.from_rational(ring, expected[k])


def test_reciprocal_sqrt_identity_and_constant(ring):
    one = S(ring, [1], 3)
    assert one.reciprocal_sqrt() == one
    half = S(ring, [Fraction(1, 2)], 3)
    t = half.reciprocal_sqrt()
    assert t[0] == ring.radical_root(2, 2)  # 1/sqrt(1/2) = sqrt(2)


def test_reciprocal_sqrt_defect_exact(ring):
    s = S(ring, [1, 2, -3, Fraction(5, 7), 1, -2, 4, 1, 1, -1, 2, 3], 12)
    t = s.reciprocal_sqrt()
    defect = t * t * s - S(ring, [1], 12)
    assert defect.is_zero()


def test_zero_constant_term_rejected(ring):
    s = S(ring, [0, 1], 3)
    with pytest.raises(ValueError, match="not invertible|nonzero constant"):
        s.reciprocal_sqrt()


def test_reversion_examples(ring):
    # s = x + x^2 -> g = u - u^2 + 2u^3 (undetermined-coefficients oracle)
    s = S(ring, [0, 1, 1], 4)
    g = s.reversion()
    assert [g[k].as_fraction() for k in range(4)] == [0, 1, -1, 2]
    # linear scaling
    s2 = S(ring, [0, 2], 3)
    assert [c.as_fraction() for c in s2.reversion().coeffs] == [0, Fraction(1, 2), 0]
    # identity
    ident = TruncSeries.identity(ring, "x", 5)
    assert ident.reversion() == ident


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3), min_size=0, max_size=8),
       st.fractions(min_value=-3, max_value=3).filter(lambda c: c != 0))
def test_reversion_round_trip(tail, lin):
    ring = Ring(())
    coeffs = [Fraction(0), lin] + list(tail)
    s = TruncSeries(ring, "x", coeffs, 10)
    g = s.reversion()
    composed = s.compose(g)
    ident = TruncSeries.identity(ring, "x", 10)
    assert composed == ident


def test_reversion_requires_zero_constant(ring):
    s = S(ring, [1, 1], 3)
    with pytest.raises(ValueError, match="reversion undefined"):
        s.reversion()
    s2 = S(ring, [0, 0, 1], 3)
    with pytest.raises(ValueError, match="reversion undefined"):
        s2.reversion()


def test_fractional_power_perfect_square(ring):
    s = S(ring, [1, 2, 1], 4)
    r = s.fractional_power(1, 2)
    assert [c.as_fraction() for c in r.coeffs] == [1, 1, 0, 0]


def test_fractional_power_symbolic_leading(ring):
    # h + h*x, power 1/4 -> h^(1/4) (1 + x)^(1/4)
    h = ring.var("h")
    s = TruncSeries(ring, "x", [ring.from_poly(h), ring.from_poly(h)], 3)
    r = s.fractional_power(1, 4)
    rho = ring.radical_root(h, 4)
    assert r[0] == rho
    assert r[1] == rho * Fraction(1, 4)
    assert r[2] == rho * Fraction(-3, 32)


def test_fractional_power_identity_case(ring):
    one = S(ring, [1], 5)
    assert one.fractional_power(7, 3) == one


def test_division_and_reciprocal(ring):
    s = S(ring, [2, 1, -1], 6)
    inv = s.reciprocal()
    assert (s * inv) == S(ring, [1], 6)
    t = S(ring, [4, 0, 3], 6)
    assert (t / s) * s == t


def test_compose_requires_zero_constant(ring):
    s = S(ring, [1, 1], 3)
    inner = S(ring, [1, 1], 3)
    with pytest.raises(ValueError, match="zero constant"):
        s.compose(inner)


def test_truncation_min_rule(ring):
    a = S(ring, [1, 2, 3, 4], 4)
    b = S(ring, [1, 1], 2)
    assert (a * b).order == 2
    assert (a + b).order == 2


def test_shift_and_valuation(ring):
    s = S(ring, [0, 0, 5, 7], 6)
    assert s.valuation() == 2
    down = s.shift_down(2)
    assert down.order == 4
    assert down[0].as_fraction() == 5
    with pytest.raises(ValueError):
        s.shift_down(3)
