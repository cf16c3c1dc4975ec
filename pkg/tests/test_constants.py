from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from melnikov_kit.constants import GammaConst, factor_int, rational_prime_powers


def close(a, b, digits=40):
    with mpmath.workdps(digits + 10):
        return abs(a - b) <= mpmath.mpf(10) ** (-digits) * max(1, abs(b))


def test_factor_int():
    assert factor_int(600) == {2: 3, 3: 1, 5: 2}
    assert rational_prime_powers(Fraction(8, 9)) == {2: 3, 3: -2}


def test_gamma_recurrence_reduction():
    # Gamma(3/2) = (1/2) sqrt(pi)
    g = GammaConst.gamma(Fraction(3, 2))
    assert g == GammaConst(mantissa=Fraction(1, 2), pi_exp=Fraction(1, 2))


def test_reflection_quarter():
    # Gamma(1/4) Gamma(3/4) = pi sqrt(2)
    g = GammaConst.gamma(Fraction(1, 4)) * GammaConst.gamma(Fraction(3, 4))
    expected = GammaConst(primes={2: Fraction(1, 2)}, pi_exp=1)
    assert g == expected


def test_gamma_one_is_dropped():
    assert GammaConst.gamma(1) == GammaConst.rational(1)
    assert GammaConst.gamma(3) == GammaConst.rational(2)  # Gamma(3) = 2


def test_beta_function():
    # B(1/2, 1/2) = pi
    assert GammaConst.beta(Fraction(1, 2), Fraction(1, 2)) == GammaConst.pi()
    # B(1, 3/2) = 2/3
    assert GammaConst.beta(1, Fraction(3, 2)) == GammaConst.rational(Fraction(2, 3))


def test_sign_and_inverse():
    g = GammaConst(mantissa=-3, pi_exp=2, gammas={Fraction(1, 4): 1})
    assert g.sign() == -1
    assert (g * g.inverse()) == GammaConst.rational(1)


def test_pow_rational():
    g = GammaConst(mantissa=8)
    r = g.pow_rational(Fraction(1, 3))
    assert r == GammaConst.rational(2)
    h = GammaConst(mantissa=2, pi_exp=1).pow_rational(Fraction(1, 2))
    assert h == GammaConst(primes={2: Fraction(1, 2)}, pi_exp=Fraction(1, 2))


def test_eval_pi_quarter():
    g = GammaConst(mantissa=Fraction(1, 4), pi_exp=1)
    val = g.eval_mpf(30)
    with mpmath.workdps(40):
        assert close(val, mpmath.pi / 4, 25)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(-50, 50).filter(lambda n: n != 0),
    st.integers(1, 30),
    st.sampled_from([Fraction(1, 4), Fraction(3, 4), Fraction(5, 4), Fraction(1, 3),
                     Fraction(2, 3), Fraction(1, 2), Fraction(7, 2), Fraction(5, 6)]),
    st.integers(-2, 2),
)
def test_normalization_preserves_value(num, den, q, gexp):
    g = GammaConst(mantissa=Fraction(num, den), pi_exp=Fraction(1, 2), gammas={q: gexp})
    # rebuild from the normalized parts and compare numerically
    with mpmath.workdps(45):
        direct = mpmath.mpf(num) / den * mpmath.sqrt(mpmath.pi) * mpmath.gamma(
            mpmath.mpf(q.numerator) / q.denominator
        ) ** gexp
        assert close(g.eval_mpf(35), direct, 30)


def test_structural_key_groups_rational_multiples():
    a = GammaConst(mantissa=2, pi_exp=1)
    b = GammaConst(mantissa=Fraction(-7, 3), pi_exp=1)
    assert a.structure_key() == b.structure_key()
    assert a != b


def test_gamma_pole_rejected():
    with pytest.raises(ValueError):
        GammaConst.gamma(0)
