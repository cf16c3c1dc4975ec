import json
from fractions import Fraction

import pytest

from melnikov_kit.cyclicity import (
    ChainStep,
    CyclicityError,
    LinearCoeffSystem,
    certify_cycles,
    factor_family,
    factor_L_Delta,
    sequential_eliminate,
    substitute_delta,
)
from melnikov_kit.constants import GammaConst
from melnikov_kit.melnikov import SystemSpec, melnikov_expansion
from melnikov_kit.poly import ParamPoly
from melnikov_kit.radicals import Ring
from melnikov_kit.symvalue import SymValue


def _simple_system(ring, deltas, rows):
    """rows: list of dicts delta -> ParamPoly/rational coefficient."""
    coeffs = []
    for row in rows:
        total = SymValue.zero(ring)
        for name, val in row.items():
            total = total + SymValue.of(ring.expr_var(name), ring) * val
        coeffs.append(total)
    return LinearCoeffSystem(ring, deltas, coeffs)


def test_single_equation_elimination():
    ring = Ring(("s", "c00", "c01"))
    sys = _simple_system(ring, ("c00", "c01"), [{"c00": Fraction(1)}, {"c01": ring.var("s")}])
    branch, residuals, pivots = sequential_eliminate(sys, ["c00"])
    assert branch["c00"].is_zero()
    assert len(residuals) == 1
    assert residuals[0] == SymValue.of(ring.expr_var("c01"), ring) * ring.var("s")


def test_elimination_back_substitution_zeroes_coefficients():
    ring = Ring(("s", "a", "b", "c"))
    s = ring.var("s")
    sys = _simple_system(
        ring, ("a", "b", "c"),
        [{"a": Fraction(2), "b": Fraction(1)},
         {"b": s, "c": Fraction(1)},
         {"a": Fraction(1), "c": s}],
    )
    branch, residuals, _ = sequential_eliminate(sys, ["a", "b"])
    for t in range(2):
        value = sys.coefficients[t]
        for name, sol in branch.items():
            value = substitute_delta(value, name, sol)
        assert value.is_zero()
    assert len(residuals) == 1


def test_invalid_pivot_rejected():
    ring = Ring(("a", "b"))
    sys = _simple_system(ring, ("a", "b"), [{"a": Fraction(1)}])
    with pytest.raises(CyclicityError, match="elimination order invalid"):
        sequential_eliminate(sys, ["b"])


def test_factor_trivial_example():
    # residual = c01 (s^2 + 1) -> L = c01, Delta = s^2 + 1
    ring = Ring(("s", "c01"))
    s = ring.var("s")
    residual = SymValue.of(ring.expr_var("c01"), ring) * (s * s + 1)
    f = factor_L_Delta(residual, ["c01"])
    assert f.ok
    assert f.delta_name == "c01"
    assert f.delta_poly == s * s + 1
    assert f.L == SymValue.of(ring.expr_var("c01"), ring)
    # product reassembles the residual
    assert f.L * SymValue.of(ring.from_poly(f.delta_poly), ring) == residual


def test_factor_family_extracts_common_factor():
    ring = Ring(("s", "c01"))
    s = ring.var("s")
    c01 = SymValue.of(ring.expr_var("c01"), ring)
    shared = s + 2
    r0 = c01 * (shared * (s * s - 3))
    r1 = c01 * (shared * (s + 5))
    f0, f1 = factor_family([r0, r1], ["c01"])
    assert f0.delta_poly == s * s - 3
    assert f1.delta_poly == s + 5
    assert f0.L * SymValue.of(ring.from_poly(f0.delta_poly), ring) == r0
    assert f1.L * SymValue.of(ring.from_poly(f1.delta_poly), ring) == r1


def test_factor_diagnostic_for_multi_delta():
    ring = Ring(("s", "a", "b"))
    val = SymValue.of(ring.expr_var("a"), ring) + SymValue.of(ring.expr_var("b"), ring) * ring.var("s")
    f = factor_L_Delta(val, ["a", "b"])
    assert not f.ok and "several parameters" in f.diagnostic


def _quartic_system():
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
    pos = ParamPoly(params, {(0, 1) + (0,) * 6: 1, (2, 0) + (0,) * 6: -2})
    return SystemSpec.from_polynomials(
        H, D, kind="nilpotent", positive=[pos],
        delta_params=("c00", "c10", "c01", "c20", "c11", "c02"),
    )


def test_quartic_center_four_cycles_certificate():
    """k = 3 eliminations plus one Delta-chain step certify 4 cycles."""
    sys = _quartic_system()
    exp = melnikov_expansion(sys, 4)
    system = LinearCoeffSystem.from_expansion(exp, sys.delta_params)
    cert = certify_cycles(
        system,
        eliminate=["c00", "c20", "c02"],
        steps=[ChainStep("fix", "B", value=1),
               ChainStep("solve-linear", "A", residual=0)],
        free_delta={"c01": 1},
    )
    assert cert.established, cert.failing_condition
    assert cert.cycles == 4 and cert.k == 3 and cert.n == 1
    assert cert.path == "chain"
    assert cert.sigma_witness["A"] == "0"
    # the eliminated-parameter solutions reproduce the closed forms
    # c20 = 2 A c01 and c02 = (5A^2-3B)/(2(A^2-B)) c01 at the generic level
    ring = exp.ring
    A = ring.expr_var("A")
    c01 = ring.expr_var("c01")
    assert system is not None
    branch, _, _ = sequential_eliminate(system, ["c00", "c20", "c02"])
    assert branch["c00"].is_zero()
    assert branch["c20"] == SymValue.of(A * c01 * 2, ring)
    B = ring.expr_var("B")
    expected_c02 = SymValue.of(
        (A * A * 5 - B * 3) * c01 / ((A * A - B) * 2), ring
    )
    assert branch["c02"] == expected_c02
    payload = json.loads(cert.to_json())
    assert payload["certified_cycles"] == 4


def test_direct_path_certificate():
    """Theorem-3 style: zero b_0 only, nonzero b_1 at the witness."""
    names = ("x", "y", "c00", "c20")
    H = ParamPoly(names, {(2, 0, 0, 0): Fraction(1, 2), (0, 2, 0, 0): Fraction(1, 2)})
    D = ParamPoly(names, {(0, 0, 1, 0): 1, (2, 0, 0, 1): 1})
    sys = SystemSpec.from_polynomials(H, D, delta_params=("c00", "c20"))
    exp = melnikov_expansion(sys, 1)
    system = LinearCoeffSystem.from_expansion(exp, sys.delta_params)
    cert = certify_cycles(system, eliminate=["c00"], steps=[], free_delta={"c20": 1})
    assert cert.established
    assert cert.cycles == 1 and cert.path == "direct"


def test_unestablished_when_free_delta_zero():
    names = ("x", "y", "c00", "c20")
    H = ParamPoly(names, {(2, 0, 0, 0): Fraction(1, 2), (0, 2, 0, 0): Fraction(1, 2)})
    D = ParamPoly(names, {(0, 0, 1, 0): 1, (2, 0, 0, 1): 1})
    sys = SystemSpec.from_polynomials(H, D, delta_params=("c00", "c20"))
    exp = melnikov_expansion(sys, 1)
    system = LinearCoeffSystem.from_expansion(exp, sys.delta_params)
    cert = certify_cycles(system, eliminate=["c00"], steps=[], free_delta={"c20": 0})
    assert not cert.established
    assert cert.cycles == 0
    assert cert.failing_condition is not None


def test_nonhomogeneous_rejected():
    ring = Ring(("a",))
    bad = SymValue.of(Fraction(1), ring)
    with pytest.raises(CyclicityError, match="homogeneous"):
        LinearCoeffSystem(ring, ("a",), [bad])
