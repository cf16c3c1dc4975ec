import random
from fractions import Fraction

import pytest

from melnikov_kit.poly import ParamPoly
from melnikov_kit.realroots import (
    RatInterval,
    interval_nth_root,
    isolate_real_roots,
    poly_interval_eval,
    refine_root,
    sturm_chain,
    sturm_count,
)


def P(coeffs):
    """Univariate polynomial in r from ascending coefficients."""
    return ParamPoly(("r",), {(k,): Fraction(c) for k, c in enumerate(coeffs) if c})


def test_isolate_sqrt2():
    roots = isolate_real_roots(P([-2, 0, 1]))  # r^2 - 2
    assert len(roots) == 2
    neg, pos = roots
    assert neg.hi < 0 < pos.lo
    assert all(r.multiplicity == 1 for r in roots)
    lo, hi = refine_root([Fraction(-2), Fraction(0), Fraction(1)], pos.lo, pos.hi,
                         Fraction(1, 10 ** 12))
    assert lo <= Fraction(14142135623730951, 10 ** 16) <= hi


def test_isolate_double_root():
    roots = isolate_real_roots(P([1, -2, 1]))  # (r-1)^2
    assert len(roots) == 1
    assert roots[0].multiplicity == 2
    assert roots[0].lo <= 1 <= roots[0].hi


def test_isolate_rational_root_exact():
    roots = isolate_real_roots(P([0, 1]))  # r
    assert len(roots) == 1
    assert roots[0].exact == 0 or (roots[0].lo < 0 < roots[0].hi)


def test_quintic_has_real_root():
    f = P([780900831, -459924741, -2093583104, -1597844992, -108363776, 1381957632])
    roots = isolate_real_roots(f)
    assert len(roots) >= 1  # odd degree
    # all isolating intervals are disjoint
    for a, b in zip(roots, roots[1:]):
        assert a.hi < b.lo or a.exact is not None or b.exact is not None
    # verify each bracket has a sign change
    coeffs = [Fraction(c) for c in (780900831, -459924741, -2093583104,
                                    -1597844992, -108363776, 1381957632)]

    def ev(x):
        t = Fraction(0)
        for c in reversed(coeffs):
            t = t * x + c
        return t

    for r in roots:
        if r.exact is None:
            assert (ev(r.lo) > 0) != (ev(r.hi) > 0)


def test_sturm_count_matches_sampling():
    rng = random.Random(5)
    for _ in range(25):
        deg = rng.randint(1, 8)
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in range(deg)] + [Fraction(rng.randint(1, 9))]
        roots = isolate_real_roots(coeffs)
        # count sign changes of the squarefree part on a fine grid, plus exact roots
        distinct = len(roots)
        chain = sturm_chain(coeffs)
        bound = 1 + max(abs(c) for c in coeffs[:-1]) / abs(coeffs[-1]) if deg else Fraction(1)
        assert sturm_count(chain, -bound, bound) == distinct


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError, match="zero polynomial"):
        isolate_real_roots([0])


def test_interval_arithmetic():
    a = RatInterval(Fraction(1), Fraction(2))
    b = RatInterval(Fraction(-1), Fraction(3))
    assert (a + b).lo == 0 and (a + b).hi == 5
    assert (a * b).lo == -2 and (a * b).hi == 6
    assert (a ** 2).lo == 1 and (a ** 2).hi == 4
    assert (b ** 2).lo == 0  # even powers clamp at zero
    assert a.reciprocal().lo == Fraction(1, 2)
    with pytest.raises(ZeroDivisionError):
        b.reciprocal()
    assert a.sign() == 1 and b.sign() is None


def test_interval_nth_root():
    x = RatInterval(Fraction(2), Fraction(2))
    r = interval_nth_root(x, 2)
    assert r.lo ** 2 <= 2 <= r.hi ** 2
    assert r.width() < Fraction(1, 10 ** 20)
    r4 = interval_nth_root(RatInterval.point(Fraction(16)), 4)
    assert r4.lo <= 2 <= r4.hi


def test_poly_interval_eval():
    p = ParamPoly(("u", "v"), {(2, 0): Fraction(1), (0, 1): Fraction(-3)})
    box = {"u": RatInterval(Fraction(-1), Fraction(2)), "v": RatInterval.point(1)}
    iv = poly_interval_eval(p, box)
    assert iv.lo == -3 and iv.hi == 1
