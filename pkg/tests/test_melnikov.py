from fractions import Fraction

import pytest

from melnikov_kit.constants import GammaConst
from melnikov_kit.melnikov import (
    ClassificationError,
    PipelineError,
    SystemSpec,
    a_series,
    beta_coeff,
    classify_origin,
    divergence_of,
    hstar_decompose,
    melnikov_expansion,
    moment_coeff,
    psi_reversion,
    q_series,
    solve_phi,
)
from melnikov_kit.poly import ParamPoly
from melnikov_kit.series import TruncSeries
from melnikov_kit.symvalue import SymValue


def build(H_text_terms, div_terms, params, kind="auto", positive=(), deltas=()):
    all_params = ("x", "y") + tuple(params)
    H = ParamPoly(all_params, H_text_terms)
    D = ParamPoly(all_params, div_terms)
    pos = [ParamPoly(tuple(params), t) for t in positive]
    return SystemSpec.from_polynomials(H, D, kind=kind, positive=pos, delta_params=tuple(deltas))


def circle_system(div_terms=None):
    # H = (x^2 + y^2)/2, divergence given in the same variables
    return build(
        {(2, 0, 0): Fraction(1, 2), (0, 2, 0): Fraction(1, 2)},
        div_terms or {(0, 0, 1): 1},
        params=("d",),
    )


def test_divergence_of():
    params = ("x", "y")
    p = ParamPoly(params, {(1, 0): 1})  # p = x
    q = ParamPoly(params, {(0, 1): 1})  # q = y
    assert divergence_of(p, q) == ParamPoly(params, {(0, 0): 2})


def test_phi_trivial_for_circle():
    sys = circle_system()
    phi = solve_phi(sys, 8)
    assert phi.is_zero()


def test_phi_simple_nilpotent():
    # H = y^2/2 + x^2 y -> H_y = y + x^2, phi = -x^2
    sys = build({(0, 2, 0): Fraction(1, 2), (2, 1, 0): 1}, {(0, 0, 1): 1}, params=("d",),
                kind="nilpotent")
    phi = solve_phi(sys, 6)
    assert phi[2].as_fraction() == -1
    assert phi[3].is_zero()


def test_phi_general_nilpotent_quadratic_coeff():
    # generic cubic+quartic nilpotent Hamiltonian: e_2 = -h21, e_3 = 2 h12 h21 - h31
    params = ("h21", "h12", "h03", "h40", "h31", "h22", "h13", "h04")
    terms = {
        (0, 2) + (0,) * 8: Fraction(1, 2),
        (2, 1) + (0,) * 8: 0,  # replaced below by parameter coefficients
    }
    all_params = ("x", "y") + params

    def mono(i, j, name=None):
        exps = [i, j] + [0] * len(params)
        if name:
            exps[2 + params.index(name)] = 1
        return tuple(exps)

    H = ParamPoly(all_params, {
        mono(0, 2): Fraction(1, 2),
        mono(2, 1, "h21"): 1, mono(1, 2, "h12"): 1, mono(0, 3, "h03"): 1,
        mono(4, 0, "h40"): 1, mono(3, 1, "h31"): 1, mono(2, 2, "h22"): 1,
        mono(1, 3, "h13"): 1, mono(0, 4, "h04"): 1,
    })
    D = ParamPoly(all_params, {mono(0, 0): 0})
    sys = SystemSpec.from_polynomials(H, D, kind="nilpotent")
    phi = solve_phi(sys, 7)
    ring = sys.ring
    h21 = ring.var("h21")
    h12 = ring.var("h12")
    h31 = ring.var("h31")
    assert phi[2] == ring.from_poly(-h21)
    assert phi[3] == ring.from_poly(2 * h12 * h21 - h31)
    # H*_0 leading terms: h_4 = h40 - h21^2/2, h_5 = h21 (h12 h21 - h31)
    H0, hs = hstar_decompose(sys, phi, 6)
    h40 = ring.var("h40")
    assert H0[3].is_zero()
    assert H0[4] == ring.from_poly(h40 - h21 * h21 / 2)
    assert H0[5] == ring.from_poly(h21 * (h12 * h21 - h31))
    assert hs[0][0].as_fraction() == Fraction(1, 2)


def test_hstar_circle():
    sys = circle_system()
    phi = solve_phi(sys, 6)
    H0, hs = hstar_decompose(sys, phi, 6)
    assert H0[2].as_fraction() == Fraction(1, 2)
    assert all(H0[k].is_zero() for k in (0, 1, 3, 4, 5))
    assert hs[0][0].as_fraction() == Fraction(1, 2)
    assert all(c.is_zero() for c in hs[0].coeffs[1:])


def test_q_series_examples():
    # D = c00 -> q_1 = c00, no higher terms
    sys = build(
        {(2, 0, 0): Fraction(1, 2), (0, 2, 0): Fraction(1, 2)},
        {(0, 0, 1): 1},
        params=("c00",),
    )
    phi = solve_phi(sys, 6)
    qs = q_series(sys, phi, 6)
    assert qs[0][0] == sys.ring.expr_var("c00")
    assert all(c.is_zero() for c in qs[0].coeffs[1:])
    assert len(qs) == 1

    # D = c01 y with phi = 0 -> q_1 = 0, q_2 = c01/2
    sys2 = build(
        {(2, 0, 0): Fraction(1, 2), (0, 2, 0): Fraction(1, 2)},
        {(0, 1, 1): 1},
        params=("c01",),
    )
    qs2 = q_series(sys2, solve_phi(sys2, 6), 6)
    assert qs2[0].is_zero()
    assert qs2[1][0] == sys2.ring.expr_var("c01") * Fraction(1, 2)


def test_a_series_formulas():
    # symbolic check of a_2 and a_3 against the closed forms
    sys = build(
        {(0, 2, 0, 0): Fraction(1, 2), (1, 2, 1, 0): 1, (1, 3, 0, 1): 1,
         (4, 0, 0, 0): 1, (0, 4, 0, 0): Fraction(1, 8)},
        {(0, 0, 0, 1): 0},
        params=("s", "t"),
        kind="nilpotent",
    )
    ring = sys.ring
    phi = solve_phi(sys, 8)
    _, hstar = hstar_decompose(sys, phi, 8)
    V = a_series(hstar, 6, ring)
    H1, H2, H3 = hstar[0], hstar[1], hstar[2]
    a1, a2, a3 = V[1], V[2], V[3]
    # a1^2 H1 = 1
    assert (a1 * a1 * H1) == TruncSeries.const(ring, "x", 1, 8)
    # a2 = -H2 / (2 H1^2)
    assert a2 == -(H2 / (H1 * H1 * 2))
    # a3 = -(4 H1 H3 - 5 H2^2) / (8 H1^(7/2))
    lhs = a3
    denom = (H1 ** 3) * H1.sqrt() * 8
    rhs = -((H1 * H3 * 4 - H2 * H2 * 5) / denom)
    assert lhs == rhs


def test_psi_reversion_examples():
    from melnikov_kit.radicals import Ring

    ring = Ring(())
    # H0 = x^4 + x^5, p = 2: psi = x (1 + x/4 - ...), psi_inv = u - u^2/4 + ...
    H0 = TruncSeries(ring, "x", [0, 0, 0, 0, 1, 1], 8)
    psi, psi_inv, psi_prime = psi_reversion(H0, 2, 6, ring)
    assert psi[1].as_fraction() == 1
    assert psi[2].as_fraction() == Fraction(1, 4)
    assert psi_inv[1].as_fraction() == 1
    assert psi_inv[2].as_fraction() == Fraction(-1, 4)
    assert psi_prime[0].as_fraction() == 1

    # wrong p fails
    with pytest.raises(PipelineError, match="inconsistent p"):
        psi_reversion(H0, 1, 6, ring)


def test_beta_and_moment_values():
    # beta_00 = pi/4 for every p
    for p in (1, 2, 3):
        assert beta_coeff(0, 0, p) == GammaConst(mantissa=Fraction(1, 4), pi_exp=1)
    # beta_10 for p=2 is 1/3, for p=1 it is pi/16
    assert beta_coeff(1, 0, 2) == GammaConst.rational(Fraction(1, 3))
    assert beta_coeff(1, 0, 1) == GammaConst(mantissa=Fraction(1, 16), pi_exp=1)
    # conventions agree at p=1
    for (i, j) in [(0, 0), (1, 0), (0, 1), (2, 1)]:
        assert beta_coeff(i, j, 1) == moment_coeff(i, j, 1)
    # all moments lie strictly inside (0, 1) numerically
    for p in (1, 2, 3, 4):
        for i in range(4):
            for j in range(4):
                v = float(moment_coeff(i, j, p).eval_mpf(30))
                assert 0 < v < 1
                w = float(beta_coeff(i, j, p).eval_mpf(30))
                assert 0 < w < 1


def test_classify_elementary_and_cusp():
    sys = circle_system()
    cls = classify_origin(sys)
    assert cls.kind == "elementary-center" and cls.p == 1

    cusp = build({(0, 2, 0): Fraction(1, 2), (3, 0, 0): 1}, {(0, 0, 1): 0}, params=("d",))
    c = classify_origin(cusp)
    assert c.kind == "cusp" and c.k == 3 and c.order == 1


def test_classify_needs_values_for_symbolic_sign():
    sys = build(
        {(0, 2, 0): Fraction(1, 2), (4, 0, 1): 1},
        {(0, 0, 0): 0},
        params=("B",),
    )
    with pytest.raises(ClassificationError, match="parameter values"):
        classify_origin(sys)
    cls = classify_origin(sys, numeric_params={"B": 2})
    assert cls.kind == "nilpotent-center" and cls.p == 2 and cls.order == 1
    cls2 = classify_origin(sys, numeric_params={"B": -2})
    assert cls2.kind == "nilpotent-saddle"


def test_expansion_constant_divergence_circle():
    # H = (x^2+y^2)/2 with divergence 2: M = 2 * area = 4 pi h
    sys = build(
        {(2, 0): Fraction(1, 2), (0, 2): Fraction(1, 2)},
        {(0, 0): 2},
        params=(),
    )
    exp = melnikov_expansion(sys, 3)
    four_pi = SymValue.of(GammaConst(mantissa=4, pi_exp=1), exp.ring)
    assert exp.p == 1
    assert exp.coefficients[0] == four_pi
    for l in (1, 2, 3):
        assert exp.coefficients[l].is_zero()


def test_expansion_rejects_non_center():
    cusp = build({(0, 2, 0): Fraction(1, 2), (3, 0, 0): 1}, {(0, 0, 1): 1}, params=("d",))
    with pytest.raises(PipelineError, match="no period annulus"):
        melnikov_expansion(cusp, 1)


def _nilpotent_AB_system():
    # H = y^2/2 + 2A x^2 y + y^3/2 + B x^4 + A x^2 y^2 + y^4/8
    params = ("A", "B", "c00", "c10", "c01", "c20", "c11", "c02")
    all_params = ("x", "y") + params

    def mono(i, j, name=None):
        exps = [i, j] + [0] * len(params)
        if name:
            exps[2 + params.index(name)] = 1
        return tuple(exps)

    H = ParamPoly(all_params, {
        mono(0, 2): Fraction(1, 2), mono(2, 1, "A"): 2, mono(0, 3): Fraction(1, 2),
        mono(4, 0, "B"): 1, mono(2, 2, "A"): 1, mono(0, 4): Fraction(1, 8),
    })
    D = ParamPoly(all_params, {
        mono(0, 0, "c00"): 1, mono(1, 0, "c10"): 1, mono(0, 1, "c01"): 1,
        mono(2, 0, "c20"): 1, mono(1, 1, "c11"): 1, mono(0, 2, "c02"): 1,
    })
    B_minus_2A2 = ParamPoly(params, {
        (0, 1, 0, 0, 0, 0, 0, 0): 1, (2, 0, 0, 0, 0, 0, 0, 0): -2,
    })
    return SystemSpec.from_polynomials(
        H, D, kind="nilpotent", positive=[B_minus_2A2],
        delta_params=("c00", "c10", "c01", "c20", "c11", "c02"),
    )


def test_expansion_quartic_center_gamma_forms():
    """b_0 and b_1 for the symmetric quartic center match the closed forms
    2 G(5/4) sqrt(2 pi) / (G(7/4) (B-2A^2)^(1/4)) c00  and
    G(3/4) sqrt(pi/2) / (G(9/4) (B-2A^2)^(3/4)) (c20 - 2 A c01)."""
    sys = _nilpotent_AB_system()
    exp = melnikov_expansion(sys, 1)
    ring = exp.ring
    assert exp.p == 2

    base = ring.poly({(0, 1) + (0,) * 6: Fraction(1), (2, 0) + (0,) * 6: Fraction(-2)})
    rho = ring.radical_root(base, 4)

    c00 = ring.expr_var("c00")
    const0 = (
        GammaConst(mantissa=2, primes={2: Fraction(1, 2)}, pi_exp=Fraction(1, 2),
                   gammas={Fraction(5, 4): 1, Fraction(7, 4): -1})
    )
    expected0 = SymValue(ring, [(const0, c00 / rho)])
    assert exp.coefficients[0] == expected0

    b1_at_b0_zero = exp.coefficients[1].substitute_params({"c00": Fraction(0)})
    c20 = ring.expr_var("c20")
    c01 = ring.expr_var("c01")
    A = ring.expr_var("A")
    const1 = GammaConst(primes={2: Fraction(-1, 2)}, pi_exp=Fraction(1, 2),
                        gammas={Fraction(3, 4): 1, Fraction(9, 4): -1})
    expected1 = SymValue(ring, [(const1, (c20 - A * c01 * 2) / rho ** 3)])
    assert b1_at_b0_zero == expected1


def test_expansion_simplified_convention_quartic():
    """With the simplified moment convention the same system reproduces the
    tabulated forms 2 pi c00 / (4B-8A^2)^(1/4) and the rational b_1."""
    sys = _nilpotent_AB_system()
    exp = melnikov_expansion(sys, 1, convention="simplified")
    ring = exp.ring
    base = ring.poly({(0, 1) + (0,) * 6: Fraction(1), (2, 0) + (0,) * 6: Fraction(-2)})
    rho = ring.radical_root(base, 4)  # (B - 2A^2)^(1/4)
    c00 = ring.expr_var("c00")
    # 2 pi / (4(B-2A^2))^(1/4) = 2 pi / (sqrt(2) rho) = sqrt(2) pi / rho
    const0 = GammaConst(primes={2: Fraction(1, 2)}, pi_exp=1)
    assert exp.coefficients[0] == SymValue(ring, [(const0, c00 / rho)])
    # b_1 = (16/3) (c20 - 2A c01) / (4(B-2A^2))^(3/4) under c00 = 0
    b1 = exp.coefficients[1].substitute_params({"c00": Fraction(0)})
    c20, c01, A = ring.expr_var("c20"), ring.expr_var("c01"), ring.expr_var("A")
    bracket = c20 - A * c01 * 2
    expected = SymValue.of(bracket * Fraction(16, 3), ring) / (
        ring.radical_root(ring.const(4), 4) ** 3 * rho ** 3
    )
    assert b1 == expected


def test_expansion_linear_in_divergence_and_zero():
    sys = _nilpotent_AB_system()
    exp = melnikov_expansion(sys, 1)
    for b in exp.coefficients:
        # zero perturbation kills every coefficient
        zeroed = b.substitute_params({c: Fraction(0) for c in sys.delta_params})
        assert zeroed.is_zero()
        # additivity in a single delta direction
        lam = Fraction(3, 2)
        scaled = b.substitute_params({"c00": lam})
        base = b.substitute_params({"c00": Fraction(1)})
        rest = b.substitute_params({"c00": Fraction(0)})
        assert scaled == rest + (base - rest) * lam


def test_expansion_order_margin_stability():
    sys = _nilpotent_AB_system()
    a = melnikov_expansion(sys, 1)
    b = melnikov_expansion(sys, 1, order_margin=2)
    for x, y in zip(a.coefficients, b.coefficients):
        assert x == y
