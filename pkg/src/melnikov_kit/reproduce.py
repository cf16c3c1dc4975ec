"""Named reference scenarios with bundled golden coefficient tables.

Each case rebuilds its system from the normal-form machinery, runs the exact
expansion and the certificate pipeline, and diffs every computed object
against the golden forms stored under ``golden/``.  Items whose published
form is a documented misprint (see each file's ``corrections`` block) count
as reproduced only when the recomputed value matches the corrected form; the
report lists both readings.  Informational items never affect the outcome.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Mapping, Sequence

from .cyclicity import (
    ChainStep,
    CyclicityCertificate,
    LinearCoeffSystem,
    certify_cycles,
    factor_family,
    sequential_eliminate,
    substitute_delta,
)
from .melnikov import SystemSpec, melnikov_expansion
from .normal_form import (
    SymmetricSystem,
    elementary_normal_form,
    nilpotent_normal_form,
    preset_change,
    transport_divergence,
)
from .parsing import parse_poly, parse_symvalue
from .poly import ParamPoly
from .radicals import RadExpr, Ring
from .symvalue import SymValue

__all__ = ["CASES", "ReproduceItem", "ReproduceReport", "run_reproduce"]

C6 = ("c00", "c10", "c01", "c20", "c11", "c02")
C4 = ("c00", "c02", "c11", "c20")


@dataclass
class ReproduceItem:
    name: str
    status: str         # match | corrected | mismatch | info
    detail: str = ""
    computed: str | None = None
    published: str | None = None

    def counts(self) -> bool:
        return self.status in ("match", "corrected", "mismatch")


@dataclass
class ReproduceReport:
    case: str
    ok: bool
    items: list[ReproduceItem]
    certificate: CyclicityCertificate | None = None
    expected_cycles: int | None = None

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "ok": self.ok,
            "expected_cycles": self.expected_cycles,
            "certified_cycles": self.certificate.cycles if self.certificate else None,
            "items": [
                {
                    "name": i.name, "status": i.status, "detail": i.detail,
                    "computed": i.computed, "published": i.published,
                }
                for i in self.items
            ],
            "certificate": json.loads(self.certificate.to_json()) if self.certificate else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"case {self.case}: {'ok' if self.ok else 'FAILED'}"]
        for i in self.items:
            lines.append(f"  [{i.status:9s}] {i.name}" + (f" -- {i.detail}" if i.detail else ""))
            if i.status == "mismatch":
                lines.append(f"      computed:  {i.computed}")
                lines.append(f"      published: {i.published}")
        if self.certificate is not None:
            lines.append(
                f"  certificate: {self.certificate.cycles} cycles "
                f"({'established' if self.certificate.established else 'NOT established'}, "
                f"expected {self.expected_cycles})"
            )
        return "\n".join(lines)


def _load_golden(case: str) -> dict:
    text = resources.files("melnikov_kit.golden").joinpath(f"{case}.json").read_text()
    return json.loads(text)


class _Comparer:
    """Bundles the ring, parameter list, golden data and numeric sample."""

    def __init__(self, ring: Ring, params: Sequence[str], golden: dict,
                 sample: Mapping[str, Fraction]):
        self.ring = ring
        self.params = tuple(params)
        self.golden = golden
        self.sample = dict(sample)
        self.items: list[ReproduceItem] = []

    def parse(self, text: str) -> SymValue:
        return parse_symvalue(text, self.ring, self.params)

    def _equal(self, a: SymValue, b: SymValue) -> tuple[bool, str]:
        if a == b:
            return True, "exact"
        if a.numerically_equal(b, self.sample, digits=60, rel_tol_exp=40):
            return True, "numeric@50"
        return False, ""

    def check(self, name: str, computed: SymValue, published_text: str,
              required: bool = True) -> None:
        published = self.parse(published_text)
        ok, how = self._equal(computed, published)
        corrections = self.golden.get("corrections", {})
        if ok:
            self.items.append(ReproduceItem(name, "match" if required else "info",
                                            detail=how))
            return
        if name in corrections:
            corrected = self.parse(corrections[name]["value"])
            ok2, how2 = self._equal(computed, corrected)
            if ok2:
                self.items.append(ReproduceItem(
                    name, "corrected",
                    detail=f"published form is a documented misprint "
                           f"({corrections[name]['note']}); corrected form matched ({how2})",
                    computed=computed.to_text(), published=published_text,
                ))
                return
        self.items.append(ReproduceItem(
            name, "mismatch" if required else "info",
            detail="published form differs from the recomputed value" if required
            else "informational comparison differs (recomputed value is authoritative)",
            computed=computed.to_text(), published=published_text,
        ))

    def info(self, name: str, detail: str, computed: str | None = None,
             published: str | None = None) -> None:
        self.items.append(ReproduceItem(name, "info", detail, computed, published))

    def ok(self) -> bool:
        return all(i.status in ("match", "corrected", "info") for i in self.items)


def _cubic_divergence(params: Sequence[str], names: Sequence[str] = C6) -> ParamPoly:
    full = ("x", "y") + tuple(params)
    table = {"c00": (0, 0), "c10": (1, 0), "c01": (0, 1),
             "c20": (2, 0), "c11": (1, 1), "c02": (0, 2)}
    out = ParamPoly.zero(full)
    for cname in names:
        i, j = table[cname]
        exps = [i, j] + [0] * len(params)
        exps[2 + list(params).index(cname)] = 1
        out = out + ParamPoly(full, {tuple(exps): Fraction(1)})
    return out


def _symmetric_divergence(params: Sequence[str]) -> ParamPoly:
    full = ("x", "y") + tuple(params)
    table = {"c00": (0, 0), "c20": (2, 0), "c11": (1, 1), "c02": (0, 2)}
    out = ParamPoly.zero(full)
    for cname, (i, j) in table.items():
        exps = [i, j] + [0] * len(params)
        exps[2 + list(params).index(cname)] = 1
        out = out + ParamPoly(full, {tuple(exps): Fraction(1)})
    return out


def _under_zeroing(exp_coeffs, zeroing: Mapping[str, str], ring: Ring):
    subs = {}
    for name, text in zeroing.items():
        value = parse_symvalue(text, ring, ring.params)
        if value.is_zero():
            subs[name] = Fraction(0)
        else:
            if len(value.terms) != 1:
                raise ValueError("zeroing substitution must be a simple expression")
            _, expr = value.terms[0]
            subs[name] = expr * value.terms[0][0].mantissa
    return [c.substitute_params(subs) for c in exp_coeffs]


def _poly_proportional(computed: ParamPoly, published: ParamPoly) -> tuple[bool, Fraction | None]:
    if computed.is_zero() or published.is_zero():
        return computed.is_zero() and published.is_zero(), None
    _, lead_c = computed.leading()
    _, lead_p = published.leading()
    ratio = lead_p / lead_c
    return (computed * ratio == published), ratio


def _step_solutions(system: LinearCoeffSystem, order: Sequence[str]) -> dict[str, SymValue]:
    """Per-step elimination solutions (before closing the branch)."""
    current = list(system.coefficients)
    out: dict[str, SymValue] = {}
    for t, name in enumerate(order):
        bt = current[t]
        pivot = bt.coefficient_of(name)
        rest = bt.substitute_params({name: Fraction(0)})
        sol = -(rest / pivot)
        out[name] = sol
        current = [c if i <= t else substitute_delta(c, name, sol)
                   for i, c in enumerate(current)]
    return out


# ------------------------------------------------------------------- cases

def _run_thm7() -> ReproduceReport:
    golden = _load_golden("thm7")
    params = ("r",) + C6
    r = ParamPoly.var(params, "r")
    sym = SymmetricSystem.from_values(
        {"h20": Fraction(1, 2), "h11": 0, "h02": Fraction(-1, 4),
         "h40": r, "h31": 1, "h22": 0},
        params=params,
    )
    H1, _, _ = elementary_normal_form(sym)
    div = _cubic_divergence(params)
    sysspec = SystemSpec.from_polynomials(H1, div, kind="elementary", delta_params=C6)
    exp = melnikov_expansion(sysspec, 6)
    ring = exp.ring
    sample = {"r": Fraction(2, 7), "c00": Fraction(1, 3), "c10": Fraction(1, 5),
              "c01": Fraction(2, 7), "c20": Fraction(3, 11), "c11": Fraction(5, 13),
              "c02": Fraction(7, 17)}
    cmp = _Comparer(ring, ring.params, golden, sample)

    cmp.check("b0", exp.coefficients[0], golden["b0"])
    reduced = _under_zeroing(exp.coefficients, golden["b_zeroing"], ring)
    for l_str, text in golden["b_under_b0_zero"].items():
        cmp.check(f"b_under_b0_zero.{l_str}", reduced[int(l_str)], text)
    cvars = ("c10", "c01", "c20", "c11", "c02")

    def combo(table: dict, l: int) -> str:
        return "+".join(f"({table[f'{l}{j}']})*{cvars[j - 1]}" for j in range(1, 6))

    for l_str, l_text in golden["l_factors"].items():
        l = int(l_str)
        name = f"l_factors.{l_str}"
        corr = golden.get("corrections", {}).get(name)
        if corr is not None and "value" not in corr:
            table = {**golden["delta_table"], **corr.get("table_overrides", {})}
            corr["value"] = f"({corr.get('l_value', l_text)})*({combo(table, l)})"
        cmp.check(name, reduced[l], f"({l_text})*({combo(golden['delta_table'], l)})")
    # the delta tables enter through the products above; record them as covered
    cmp.info("delta_table", "verified through the l_i * sum(delta_ij c) products")

    system = LinearCoeffSystem.from_expansion(exp, C6)
    order = ["c00", "c02", "c11", "c10", "c20"]
    steps_sol = _step_solutions(system, order)
    for name in ("c02", "c11", "c10", "c20"):
        cmp.check(f"eliminations.{name}", steps_sol[name], golden["eliminations"][name])

    _, res3, _ = sequential_eliminate(system, ["c00", "c02", "c11"])
    cmp.check("residual_after_three.3", res3[0], golden["residual_after_three"]["3"])
    for i, l_i in ((4, golden["l_factors"]["4"]), (5, golden["l_factors"]["5"]),
                   (6, golden["l_factors"]["6"])):
        combo = "+".join(
            f"({golden['delta_prime_table'][f'{i}{j}']})*{c}"
            for j, c in ((1, 'c10'), (2, 'c01'), (3, 'c20'))
        )
        name = f"delta_prime.{i}"
        if i == 6:
            # reuse the documented l6 correction
            cmp.golden.setdefault("corrections", {})[name] = {
                "value": f"(33*pi/8192)/2*({combo})",
                "note": golden["corrections"]["l_factors.6"]["note"],
            }
        cmp.check(name, res3[i - 3], f"({l_i})/2*({combo})")

    _, residuals, _ = sequential_eliminate(system, order)
    cmp.check("residual.b5_product", residuals[0],
              f"({golden['L']})*({golden['Delta0']})")
    cmp.check("residual.b6_product", residuals[1],
              f"({golden['L']})*({golden['Delta1']})")

    factored = factor_family(residuals, [d for d in C6 if d not in order])
    f_poly = parse_poly(golden["f"], ("r",))
    prop, ratio = _poly_proportional(_restrict_poly(factored[0].delta_poly, ("r",)), f_poly)
    if prop:
        cmp.info("f", f"recovered Delta_0 proportional to the published quintic (ratio {ratio})")
    else:
        cmp.items.append(ReproduceItem("f", "mismatch", "Delta_0 is not the published quintic",
                                       factored[0].delta_poly.to_text(), golden["f"]))

    cert = None
    n_roots = len(_isolate_f(factored[0].delta_poly))
    for root_index in range(n_roots):
        cert = certify_cycles(
            system, order,
            steps=[ChainStep("isolate", "r", residual=0, root_index=root_index)],
            free_delta={"c01": 1},
        )
        if cert.established:
            break
    expected = golden["expected_cycles"]
    ok = cmp.ok() and cert is not None and cert.established and cert.cycles == expected
    return ReproduceReport("thm7", ok, cmp.items, cert, expected)


def _isolate_f(poly: ParamPoly):
    from .realroots import isolate_real_roots

    return isolate_real_roots(_restrict_poly(poly, ("r",)), "r")


def _restrict_poly(p: ParamPoly, params: tuple[str, ...]) -> ParamPoly:
    used = p.variables_present()
    if not used <= set(params):
        raise ValueError(f"polynomial uses {sorted(used - set(params))}")
    out = {}
    keep = [p.params.index(n) for n in params]
    for exps, c in p.terms.items():
        out[tuple(exps[k] for k in keep)] = c
    return ParamPoly(params, out)


def _run_thm8() -> ReproduceReport:
    golden = _load_golden("thm8")
    params = ("A", "B") + C6
    full = ("x", "y") + params

    def mono(i, j, name=None):
        exps = [i, j] + [0] * len(params)
        if name:
            exps[2 + params.index(name)] = 1
        return tuple(exps)

    H = ParamPoly(full, {
        mono(0, 2): Fraction(1, 2), mono(2, 1, "A"): 2, mono(0, 3): Fraction(1, 2),
        mono(4, 0, "B"): 1, mono(2, 2, "A"): 1, mono(0, 4): Fraction(1, 8),
    })
    div = _cubic_divergence(params)
    positive = ParamPoly(params, {(0, 1) + (0,) * 6: 1, (2, 0) + (0,) * 6: -2})
    sysspec = SystemSpec.from_polynomials(H, div, kind="nilpotent",
                                          positive=[positive], delta_params=C6)
    exp = melnikov_expansion(sysspec, 4)
    ring = exp.ring
    sample = {"A": Fraction(1, 5), "B": Fraction(1), "c00": Fraction(1, 3),
              "c10": Fraction(1, 5), "c01": Fraction(2, 7), "c20": Fraction(3, 11),
              "c11": Fraction(5, 13), "c02": Fraction(7, 17)}
    cmp = _Comparer(ring, ring.params, golden, sample)

    cmp.check("b0", exp.coefficients[0], golden["b0"])
    reduced = _under_zeroing(exp.coefficients, golden["b_zeroing"], ring)
    for l_str, text in golden["b_under_b0_zero"].items():
        cmp.check(f"b_under_b0_zero.{l_str}", reduced[int(l_str)], text)

    system = LinearCoeffSystem.from_expansion(exp, C6)
    order = ["c00", "c20", "c02"]
    steps_sol = _step_solutions(system, order)
    for name in ("c20", "c02"):
        cmp.check(f"eliminations.{name}", steps_sol[name], golden["eliminations"][name])

    _, res2, _ = sequential_eliminate(system, ["c00", "c20"])
    for l_str, text in golden["after_c20"].items():
        cmp.check(f"after_c20.{l_str}", res2[int(l_str) - 2], text)

    _, residuals, _ = sequential_eliminate(system, order)
    for l_str, text in golden["residuals_final"].items():
        cmp.check(f"residuals_final.{l_str}", residuals[int(l_str) - 3], text)
    at_A0 = residuals[1].substitute_params({"A": Fraction(0)})
    cmp.check("b4_at_A_zero", at_A0, golden["b4_at_A_zero"])

    cert = certify_cycles(
        system, order,
        steps=[ChainStep("fix", "B", value=1),
               ChainStep("solve-linear", "A", residual=0)],
        free_delta={"c01": 1},
    )
    expected = golden["expected_cycles"]
    ok = cmp.ok() and cert.established and cert.cycles == expected
    return ReproduceReport("thm8", ok, cmp.items, cert, expected)


def _run_thm9() -> ReproduceReport:
    golden = _load_golden("thm9")
    params = ("h22", "h31", "h40") + C4
    h22 = ParamPoly.var(params, "h22")
    sym = SymmetricSystem.from_values(
        {"h20": Fraction(1, 2) - h22, "h11": 0,
         "h02": Fraction(-1, 4), "h40": ParamPoly.var(params, "h40"),
         "h31": ParamPoly.var(params, "h31"), "h22": h22},
        params=params,
    )
    div = _symmetric_divergence(params)
    H1, div1, _ = elementary_normal_form(sym, div)
    sysspec = SystemSpec.from_polynomials(H1, div1, kind="elementary", delta_params=C4)
    exp = melnikov_expansion(sysspec, 5)
    ring = exp.ring
    sample = {"h22": Fraction(1, 7), "h31": Fraction(2, 5), "h40": Fraction(-1, 2),
              "c00": Fraction(1, 3), "c02": Fraction(2, 7), "c11": Fraction(5, 13),
              "c20": Fraction(3, 11)}
    cmp = _Comparer(ring, ring.params, golden, sample)

    # the transported Hamiltonian and divergence tables
    parsed_H1 = parse_poly(golden["H1"], H1.params)
    cmp.items.append(ReproduceItem(
        "H1", "match" if parsed_H1 == H1 else "mismatch", "exact polynomial identity",
        H1.to_text() if parsed_H1 != H1 else None, golden["H1"] if parsed_H1 != H1 else None,
    ))
    table = {"00": (0, 0), "10": (1, 0), "01": (0, 1), "20": (2, 0), "11": (1, 1),
             "02": (0, 2)}
    for key, (i, j) in table.items():
        entry = div1.coefficient_of("x", i).coefficient_of("y", j)
        cmp.check(f"chat1.{key}",
                  SymValue.of(ring.from_poly(_restrict_poly(entry, ring.params)), ring),
                  golden["chat1"][key])

    cmp.check("b0", exp.coefficients[0], golden["b0"])
    reduced = _under_zeroing(exp.coefficients, golden["b_zeroing"], ring)
    for l_str, text in golden["b_under_b0_zero"].items():
        cmp.check(f"b_under_b0_zero.{l_str}", reduced[int(l_str)], text)

    system = LinearCoeffSystem.from_expansion(exp, C4)
    order = ["c00", "c20", "c02"]
    steps_sol = _step_solutions(system, order)
    for name in ("c20", "c02"):
        cmp.check(f"eliminations.{name}", steps_sol[name], golden["eliminations"][name])

    _, res_after_two, _ = sequential_eliminate(system, ["c00", "c20"])
    cmp.check("b2_after_c20", res_after_two[0], golden["b2_after_c20"])

    _, residuals, _ = sequential_eliminate(system, order)
    for i, key in enumerate(("Delta0", "Delta1", "Delta2")):
        cmp.check(f"residual_product.{i}", residuals[i],
                  f"({golden['L']})*({golden[key]})")

    factored = factor_family(residuals, [d for d in C4 if d not in order])

    # closed-form chain: solve Delta_0 for h40, reduce Delta_1, solve for h22
    sigma_ring = Ring(("h22", "h31", "h40"))
    delta0 = _restrict_poly(factored[0].delta_poly, ("h22", "h31", "h40"))
    h40_sol = _solve_linear_poly(delta0, "h40", sigma_ring)
    cmp.check("h40_solution", SymValue.of(_lift(h40_sol, ring), ring), golden["h40_solution"])

    delta1 = _restrict_poly(factored[1].delta_poly, ("h22", "h31", "h40"))
    delta1_red = _substitute_poly(delta1, {"h40": h40_sol}, sigma_ring)
    red_sym = SymValue.of(_lift_expr(delta1_red, ring), ring)
    prop_ok = _proportional_symvalue(red_sym, cmp.parse(golden["Delta1_reduced"]))
    if prop_ok:
        cmp.info("Delta1_reduced", "reduced second chain polynomial matches up to a constant")
    else:
        cmp.items.append(ReproduceItem("Delta1_reduced", "mismatch",
                                       "reduced chain polynomial differs",
                                       red_sym.to_text(), golden["Delta1_reduced"]))

    roots = _solve_quadratic_sym(delta1_red, "h22", ring)
    branch_texts = [golden["f_branches"]["1"], golden["f_branches"]["2"]]
    matched = _match_roots(cmp, roots, branch_texts, ring)

    # the chain polynomials agree with the published ones up to a rational
    # normalization constant (ours are content-primitive with positive
    # leading coefficient); record the ratios and rescale the branch values
    sigma_names = ("h22", "h31", "h40")
    ratios = {}
    for idx, key in enumerate(("Delta0", "Delta1", "Delta2")):
        mine = _restrict_poly(factored[idx].delta_poly, sigma_names)
        published = parse_poly(golden[key], sigma_names)
        prop, ratio = _poly_proportional(mine, published)
        ratios[idx] = ratio
        if prop:
            cmp.info(f"{key}.proportional", f"published = ({ratio}) * recomputed")
        else:
            cmp.items.append(ReproduceItem(f"{key}.proportional", "mismatch",
                                           "chain polynomial differs beyond a constant",
                                           mine.to_text(), golden[key]))

    delta2 = _restrict_poly(factored[2].delta_poly, sigma_names)
    for branch_idx, root in matched:
        d2 = SymValue.of(_lift_expr(delta2, ring), ring) * ratios[2]
        d2 = d2.substitute_params({"h40": _lift_expr_rad(h40_sol, ring)})
        d2 = d2.substitute_params({"h22": root})
        cmp.check(f"Delta2_at_branches.{branch_idx}", d2,
                  golden["Delta2_at_branches"][str(branch_idx)])

    cert = None
    for root_index in (0, 1):
        cert = certify_cycles(
            system, order,
            steps=[ChainStep("fix", "h31", value=1),
                   ChainStep("solve-linear", "h40", residual=0),
                   ChainStep("solve-quadratic", "h22", residual=1, root_index=root_index)],
            free_delta={"c11": 1},
        )
        if cert.established:
            break
    expected = golden["expected_cycles"]
    ok = cmp.ok() and cert is not None and cert.established and cert.cycles == expected
    return ReproduceReport("thm9", ok, cmp.items, cert, expected)


def _lift(poly_or_expr, ring: Ring):
    if isinstance(poly_or_expr, ParamPoly):
        return ring.from_poly(poly_or_expr.extend_params(ring.params))
    return poly_or_expr


def _lift_expr(p: ParamPoly, ring: Ring) -> RadExpr:
    return ring.from_poly(p.extend_params(ring.params))


def _lift_expr_rad(value, ring: Ring):
    if isinstance(value, ParamPoly):
        return _lift_expr(value, ring)
    # RadExpr over a sigma-only ring: rebuild in the big ring
    out = ring.zero()
    for (primes, rads), coeff in value.num.items():
        if any(rads):
            raise ValueError("unexpected radical symbol in a witness expression")
        term = RadExpr._from_prime_powers(ring, dict(primes))
        out = out + term * _lift_expr(coeff, ring)
    return out / _lift_expr(value.den, ring)


def _solve_linear_poly(p: ParamPoly, name: str, ring: Ring) -> ParamPoly:
    if p.degree_in(name) != 1:
        raise ValueError(f"not linear in {name}")
    c1 = p.coefficient_of(name, 1)
    c0 = p.coefficient_of(name, 0)
    if not c1.is_constant():
        raise ValueError(f"leading coefficient in {name} is not constant")
    return c0 * (Fraction(-1) / c1.constant_value())


def _substitute_poly(p: ParamPoly, subs: Mapping[str, ParamPoly], ring: Ring) -> ParamPoly:
    return p.substitute({k: v if isinstance(v, ParamPoly) else ParamPoly.const(p.params, v)
                         for k, v in subs.items()})


def _solve_quadratic_sym(p: ParamPoly, name: str, ring: Ring) -> list[RadExpr]:
    from .cyclicity import _poly_sqrt_radexpr

    c2 = p.coefficient_of(name, 2).extend_params(ring.params)
    c1 = p.coefficient_of(name, 1).extend_params(ring.params)
    c0 = p.coefficient_of(name, 0).extend_params(ring.params)
    disc = c1 * c1 - c2 * c0 * 4
    root = _poly_sqrt_radexpr(disc, ring)
    a2 = ring.from_poly(c2)
    return [(-(ring.from_poly(c1)) + root) / (a2 * 2),
            (-(ring.from_poly(c1)) - root) / (a2 * 2)]


def _proportional_symvalue(a: SymValue, b: SymValue) -> bool:
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    if len(a.terms) != 1 or len(b.terms) != 1:
        return a == b
    (_, ea), (_, eb) = a.terms[0], b.terms[0]
    # single radical-free polynomials: compare up to a rational ratio
    try:
        pa = ea.as_param_poly()
        pb = eb.as_param_poly()
    except ValueError:
        return a == b
    ok, _ = _poly_proportional(pa, pb)
    return ok


def _match_roots(cmp: _Comparer, roots: list[RadExpr], branch_texts: list[str],
                 ring: Ring) -> list[tuple[int, RadExpr]]:
    parsed = [cmp.parse(t) for t in branch_texts]
    matched = []
    used = set()
    for root in roots:
        rv = SymValue.of(root, ring)
        hit = None
        for idx, target in enumerate(parsed):
            if idx in used:
                continue
            if rv == target:
                hit = idx
                break
        if hit is None:
            cmp.items.append(ReproduceItem("f_branches", "mismatch",
                                           "quadratic branch not among the published forms",
                                           rv.to_text(), "; ".join(branch_texts)))
            continue
        used.add(hit)
        cmp.items.append(ReproduceItem(f"f_branches.{hit + 1}", "match", "exact"))
        matched.append((hit + 1, root))
    return matched


def _run_thm10() -> ReproduceReport:
    golden = _load_golden("thm10")
    params = ("h11", "h20", "h40") + C4
    h11 = ParamPoly.var(params, "h11")
    h20 = ParamPoly.var(params, "h20")
    sym = SymmetricSystem.from_values(
        {"h20": h20, "h11": h11, "h02": Fraction(1, 2),
         "h40": ParamPoly.var(params, "h40"),
         "h31": -2 * h11 * h20, "h22": -(h11 * h11) - h20},
        params=params,
    )
    div = _symmetric_divergence(params)
    H2, div2, A, B, _ = nilpotent_normal_form(sym, div)
    positive = -(h20 * h20) - ParamPoly.var(params, "h40")
    sysspec = SystemSpec.from_polynomials(H2, div2, kind="nilpotent",
                                          positive=[positive], delta_params=C4)
    exp = melnikov_expansion(sysspec, 3)
    ring = exp.ring
    sample = {"h11": Fraction(1, 3), "h20": Fraction(1, 4), "h40": Fraction(-1, 2),
              "c00": Fraction(1, 3), "c02": Fraction(2, 7), "c11": Fraction(5, 13),
              "c20": Fraction(3, 11)}
    cmp = _Comparer(ring, ring.params, golden, sample)

    table = {"00": (0, 0), "10": (1, 0), "01": (0, 1), "20": (2, 0), "11": (1, 1),
             "02": (0, 2)}
    for key, (i, j) in table.items():
        entry = div2.coefficient_of("x", i).coefficient_of("y", j)
        cmp.check(f"chat2.{key}",
                  SymValue.of(ring.from_poly(_restrict_poly(entry, ring.params)), ring),
                  golden["chat2"][key])

    cmp.check("b0", exp.coefficients[0], golden["b0"])
    reduced = _under_zeroing(exp.coefficients, golden["b_zeroing"], ring)
    cmp.check("b_under_b0_zero.1", reduced[1], golden["b_under_b0_zero"]["1"])
    for l_str in ("2", "3"):
        cmp.check(f"b_under_b0_zero.{l_str}", reduced[int(l_str)],
                  golden["b_under_b0_zero"][l_str], required=False)

    system = LinearCoeffSystem.from_expansion(exp, C4)
    order = ["c00", "c20"]
    steps_sol = _step_solutions(system, order)
    cmp.check("eliminations.c20", steps_sol["c20"], golden["eliminations"]["c20"])

    _, residuals, _ = sequential_eliminate(system, order)
    cmp.check("residuals_final.2", residuals[0], golden["residuals_final"]["2"])
    cmp.check("residuals_final.3", residuals[1], golden["residuals_final"]["3"])

    cert = certify_cycles(
        system, order,
        steps=[ChainStep("fix", "h11", value=0), ChainStep("fix", "h20", value=0),
               ChainStep("fix", "h40", value=-1)],
        free_delta={"c02": 1},
    )
    expected = golden["expected_cycles"]
    ok = cmp.ok() and cert.established and cert.cycles == expected
    return ReproduceReport("thm10", ok, cmp.items, cert, expected)


def _run_thm9p() -> ReproduceReport:
    golden = _load_golden("thm9p")
    params = ("h22", "h31", "h40") + C4
    h22 = ParamPoly.var(params, "h22")
    sym = SymmetricSystem.from_values(
        {"h20": Fraction(1, 2) - h22, "h11": 1,
         "h02": Fraction(-5, 4), "h40": ParamPoly.var(params, "h40"),
         "h31": ParamPoly.var(params, "h31"), "h22": h22},
        params=params,
    )
    div = _symmetric_divergence(params)
    H1, div1, _ = elementary_normal_form(sym, div)
    sysspec = SystemSpec.from_polynomials(H1, div1, kind="elementary", delta_params=C4)
    exp = melnikov_expansion(sysspec, 5)
    ring = exp.ring
    sample = {"h22": Fraction(1, 7), "h31": Fraction(2, 5), "h40": Fraction(-1, 2),
              "c00": Fraction(1, 3), "c02": Fraction(2, 7), "c11": Fraction(5, 13),
              "c20": Fraction(3, 11)}
    cmp = _Comparer(ring, ring.params, golden, sample)

    table = {"00": (0, 0), "10": (1, 0), "01": (0, 1), "20": (2, 0), "11": (1, 1),
             "02": (0, 2)}
    for key, (i, j) in table.items():
        entry = div1.coefficient_of("x", i).coefficient_of("y", j)
        cmp.check(f"chat1.{key}",
                  SymValue.of(ring.from_poly(_restrict_poly(entry, ring.params)), ring),
                  golden["chat1"][key])
    cmp.check("b0", exp.coefficients[0], golden["b0"])

    system = LinearCoeffSystem.from_expansion(exp, C4)
    order = ["c00", "c20", "c11"]
    steps_sol = _step_solutions(system, order)
    cmp.check("published_c20", steps_sol["c20"], golden["published_c20"], required=False)
    cmp.info("recomputed.c20", "recomputed elimination solution",
             computed=steps_sol["c20"].to_text())
    cmp.info("recomputed.c11", "recomputed elimination solution",
             computed=steps_sol["c11"].to_text())
    for line in golden["published_witness_text"]:
        cmp.info("published_witness", line)

    _, residuals, _ = sequential_eliminate(system, order)
    factored = factor_family(residuals, [d for d in C4 if d not in order])
    for i, f in enumerate(factored[:3]):
        if f.ok:
            cmp.info(f"recomputed.Delta{i}", "recomputed chain polynomial",
                     computed=f.delta_poly.to_text())

    cert = None
    h22_fix = Fraction(0)
    for root_index in range(6):
        try:
            cert = certify_cycles(
                system, order,
                steps=[ChainStep("fix", "h22", value=h22_fix),
                       ChainStep("solve-linear", "h40", residual=0),
                       ChainStep("isolate", "h31", residual=1, root_index=root_index)],
                free_delta={"c02": 1},
            )
        except Exception as exc:  # root index exhausted or shape mismatch
            cmp.info("certificate.attempt", f"root {root_index}: {exc}")
            break
        if cert.established:
            break
    expected = golden["expected_cycles"]
    ok = cert is not None and cert.established and cert.cycles == expected and cmp.ok()
    return ReproduceReport("thm9p", ok, cmp.items, cert, expected)


def _run_appendix_p2() -> ReproduceReport:
    golden = _load_golden("appendix-p2")
    hs = ("h21", "h12", "h03", "h40", "h31", "h22", "h13", "h04")
    params = hs + C6
    full = ("x", "y") + params

    def mono(i, j, name=None):
        exps = [i, j] + [0] * len(params)
        if name:
            exps[2 + params.index(name)] = 1
        return tuple(exps)

    H = ParamPoly(full, {
        mono(0, 2): Fraction(1, 2),
        mono(2, 1, "h21"): 1, mono(1, 2, "h12"): 1, mono(0, 3, "h03"): 1,
        mono(4, 0, "h40"): 1, mono(3, 1, "h31"): 1, mono(2, 2, "h22"): 1,
        mono(1, 3, "h13"): 1, mono(0, 4, "h04"): 1,
    })
    div = _cubic_divergence(params)
    positive = ParamPoly(params, {
        tuple([0] * 3 + [1] + [0] * 10): 2,               # 2*h40
        tuple([2] + [0] * 13): -1,                        # - h21^2
    })
    sysspec = SystemSpec.from_polynomials(H, div, kind="nilpotent",
                                          positive=[positive], delta_params=C6)
    exp = melnikov_expansion(sysspec, 1, convention=golden["convention"])
    ring = exp.ring
    sample = {"h21": Fraction(1, 3), "h12": Fraction(1, 5), "h03": Fraction(1, 7),
              "h40": Fraction(1), "h31": Fraction(2, 7), "h22": Fraction(1, 2),
              "h13": Fraction(1, 11), "h04": Fraction(1, 8),
              "c00": Fraction(1, 3), "c10": Fraction(1, 5), "c01": Fraction(2, 7),
              "c20": Fraction(3, 11), "c11": Fraction(5, 13), "c02": Fraction(7, 17)}
    cmp = _Comparer(ring, ring.params, golden, sample)
    cmp.check("b0", exp.coefficients[0], golden["b0"])
    reduced = _under_zeroing(exp.coefficients, golden["b_zeroing"], ring)
    cmp.check("b_under_b0_zero.1", reduced[1], golden["b_under_b0_zero"]["1"])
    return ReproduceReport("appendix-p2", cmp.ok(), cmp.items, None, None)


CASES: dict[str, Callable[[], ReproduceReport]] = {
    "thm7": _run_thm7,
    "thm8": _run_thm8,
    "thm9": _run_thm9,
    "thm9p": _run_thm9p,
    "thm10": _run_thm10,
    "appendix-p2": _run_appendix_p2,
}


def run_reproduce(case: str) -> ReproduceReport:
    """Run a named reference case; raises KeyError for unknown ids."""
    if case not in CASES:
        raise KeyError(f"unknown case {case!r}; available: {sorted(CASES)}")
    return CASES[case]()
