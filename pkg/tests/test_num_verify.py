import math
from fractions import Fraction

import numpy as np
import pytest

from melnikov_kit.num_verify import (
    NumericSystem,
    TraceError,
    fit_expansion,
    h_ladder,
    melnikov_numeric,
    trace_level_curve,
)
from melnikov_kit.poly import ParamPoly


def circle_system(p_terms=None, q_terms=None):
    names = ("x", "y")
    H = ParamPoly(names, {(2, 0): Fraction(1, 2), (0, 2): Fraction(1, 2)})
    p = ParamPoly(names, p_terms) if p_terms else None
    q = ParamPoly(names, q_terms) if q_terms else None
    return NumericSystem.from_polynomials(H, p, q)


def test_trace_circle():
    sys = circle_system()
    orbit = trace_level_curve(sys, 0.125, tol=1e-9)
    radii = np.hypot(orbit.points[:, 0], orbit.points[:, 1])
    assert abs(radii.max() - 0.5) < 1e-6 and abs(radii.min() - 0.5) < 1e-6
    assert abs(orbit.period - 2 * math.pi) < 1e-5
    assert orbit.energy_drift <= 1e-9


def test_trace_energy_conservation_various_h():
    sys = circle_system()
    for h in (1e-2, 1e-3, 1e-4):
        orbit = trace_level_curve(sys, h, tol=1e-9)
        assert orbit.energy_drift <= 1e-9 * max(1.0, h)


def test_melnikov_circle_divergence_two():
    # p = x, q = y: divergence 2, M = 2 * area = 4 pi h
    sys = circle_system(p_terms={(1, 0): 1}, q_terms={(0, 1): 1})
    val, err = melnikov_numeric(sys, 0.1)
    assert abs(val - 4 * math.pi * 0.1) < 1e-6
    assert err < 1e-6


def test_melnikov_zero_perturbation():
    sys = circle_system()
    val, err = melnikov_numeric(sys, 0.05)
    assert abs(val) < 1e-12
    assert err < 1e-10


def test_melnikov_error_estimate_shrinks():
    sys = circle_system(p_terms={(1, 0): 1, (2, 1): Fraction(1, 3)})
    _, err_coarse = melnikov_numeric(sys, 0.1, steps=1024)
    _, err_fine = melnikov_numeric(sys, 0.1, steps=4096)
    assert err_fine < err_coarse


def test_greens_theorem_consistency():
    # constant divergence d: integral = d * enclosed area (shoelace)
    sys = circle_system(p_terms={(1, 0): Fraction(3, 2)})  # divergence 3/2
    h = 0.02
    orbit = trace_level_curve(sys, h)
    pts = orbit.points
    area = 0.5 * abs(float(np.sum(pts[:-1, 0] * pts[1:, 1] - pts[1:, 0] * pts[:-1, 1])))
    val, _ = melnikov_numeric(sys, h)
    assert abs(val - 1.5 * area) < 1e-6 * max(1.0, area)


def test_quartic_center_oval_symmetry():
    # H = y^2/2 + y^3/2 + 8 x^4 + y^4/8 (A = 0, B = 8): oval symmetric in x
    names = ("x", "y")
    H = ParamPoly(names, {(0, 2): Fraction(1, 2), (0, 3): Fraction(1, 2),
                          (4, 0): 8, (0, 4): Fraction(1, 8)})
    sys = NumericSystem.from_polynomials(H, None, None, p_value=2)
    orbit = trace_level_curve(sys, 1e-3)
    xs = orbit.points[:, 0]
    assert abs(xs.max() + xs.min()) < 1e-4 * xs.max()


def test_beyond_separatrix_fails():
    # H = (x^2+y^2)/2 - x^3/2 has a saddle at x = ... on the x-axis
    names = ("x", "y")
    H = ParamPoly(names, {(2, 0): Fraction(1, 2), (0, 2): Fraction(1, 2),
                          (3, 0): Fraction(-1, 2)})
    sys = NumericSystem.from_polynomials(H, None, None)
    ladder = h_ladder(sys, 3)
    assert ladder[0] < 1.0 / 12  # below the saddle energy
    with pytest.raises(TraceError):
        trace_level_curve(sys, 10.0)


def test_h_ladder_geometric():
    sys = circle_system()
    ladder = h_ladder(sys, 5)
    assert len(ladder) == 5
    for a, b in zip(ladder, ladder[1:]):
        assert abs(a / b - 4.0) < 1e-12


def test_fit_expansion_synthetic():
    hs = [0.1 * 4 ** (-i) for i in range(6)]
    # M = 4 pi h exactly (p = 1 basis starts at h^1)
    samples = [(h, 4 * math.pi * h) for h in hs]
    fit = fit_expansion(samples, p=1, L=2)
    assert abs(fit.coefficients[0] - 4 * math.pi) < 1e-8
    assert abs(fit.coefficients[1]) < 1e-6
    # M = h (1 + h + h^2)
    samples2 = [(h, h * (1 + h + h * h)) for h in hs]
    fit2 = fit_expansion(samples2, p=1, L=2)
    for got, want in zip(fit2.coefficients, (1.0, 1.0, 1.0)):
        assert abs(got - want) < 1e-7


def test_fit_expansion_needs_enough_samples():
    with pytest.raises(ValueError, match="samples"):
        fit_expansion([(0.1, 0.1)], p=1, L=1)


def test_oracle_matches_symbolic_quartic_b0():
    """A = 0, B = 1, divergence c00 = 1: M ~ b0 h^(3/4) with
    b0 = 2 G(5/4) sqrt(2 pi) / G(7/4)."""
    import mpmath

    names = ("x", "y")
    H = ParamPoly(names, {(0, 2): Fraction(1, 2), (0, 3): Fraction(1, 2),
                          (4, 0): 1, (0, 4): Fraction(1, 8)})
    div = ParamPoly(names, {(0, 0): 1})
    sys = NumericSystem.from_divergence(H, div, p_value=2)
    b0 = float(2 * mpmath.gamma(1.25) * mpmath.sqrt(2 * mpmath.pi) / mpmath.gamma(1.75))
    h = 1e-4
    val, err = melnikov_numeric(sys, h)
    assert abs(val - b0 * h ** 0.75) <= 0.01 * abs(b0 * h ** 0.75)
