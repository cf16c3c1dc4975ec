"""Limit-cycle lower bounds from vanishing Melnikov coefficients.

Given coefficients b_0..b_L linear in perturbation parameters, this module
eliminates k parameters to zero b_0..b_{k-1}, factors the substituted
residuals into a parameter-linear part L times a polynomial Delta in the
remaining system parameters, pins a witness point on the Delta zero chain,
and verifies the nonvanishing side conditions (pivots, Jacobians, L, the
last Delta) by exact or interval evaluation.  The result is a certificate
for k (direct path) or k+n (chain path) small limit cycles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import mpmath

from .constants import GammaConst
from .melnikov import MelnikovExpansion
from .poly import ParamPoly, poly_gcd
from .radicals import RadExpr, Ring
from .realroots import (
    RatInterval,
    interval_nth_root,
    isolate_real_roots,
    poly_interval_eval,
    refine_root,
)
from .symvalue import SymValue

Rat = Union[int, Fraction]

__all__ = [
    "ChainStep",
    "CyclicityCertificate",
    "CyclicityError",
    "FactoredResidual",
    "LinearCoeffSystem",
    "certify_cycles",
    "factor_L_Delta",
    "factor_family",
    "sequential_eliminate",
    "substitute_delta",
]

MAX_REFINEMENTS = 64


class CyclicityError(ValueError):
    pass


# ---------------------------------------------------------- linear system

@dataclass
class LinearCoeffSystem:
    """Coefficients b_l, each homogeneous linear in the delta parameters."""

    ring: Ring
    deltas: tuple[str, ...]
    coefficients: list[SymValue]

    def __post_init__(self):
        for l, b in enumerate(self.coefficients):
            zeroed = b.substitute_params({d: Fraction(0) for d in self.deltas})
            if not zeroed.is_zero():
                raise CyclicityError(f"b_{l} is not homogeneous in the perturbation parameters")
            for d in self.deltas:
                try:
                    b.coefficient_of(d)
                except ValueError as exc:
                    raise CyclicityError(f"b_{l} is not linear in {d}: {exc}") from exc

    @classmethod
    def from_expansion(cls, exp: MelnikovExpansion, deltas: Sequence[str]) -> "LinearCoeffSystem":
        return cls(exp.ring, tuple(deltas), list(exp.coefficients))


def substitute_delta(value: SymValue, name: str, replacement: SymValue) -> SymValue:
    """Replace a linearly-occurring parameter by a SymValue expression."""
    coeff = value.coefficient_of(name)
    rest = value.substitute_params({name: Fraction(0)})
    if coeff.is_zero():
        return rest
    return rest + coeff * replacement


def sequential_eliminate(system: LinearCoeffSystem, order: Sequence[str]
                         ) -> tuple[dict[str, SymValue], list[SymValue], list[SymValue]]:
    """Solve b_0 = ... = b_{k-1} = 0 for the named parameters, in order.

    Returns (branch, residuals, pivots): the branch maps each eliminated
    parameter to its closed-form solution in the free parameters; residuals
    are b_k.. after substitution; pivots are the divisor coefficients whose
    nonvanishing the elimination assumes.
    """
    order = list(order)
    k = len(order)
    if k > len(system.coefficients):
        raise CyclicityError("more eliminations requested than coefficients available")
    current = list(system.coefficients)
    solutions: dict[str, SymValue] = {}
    pivots: list[SymValue] = []
    for t, name in enumerate(order):
        if name not in system.deltas:
            raise CyclicityError(f"{name!r} is not a perturbation parameter")
        bt = current[t]
        pivot = bt.coefficient_of(name)
        if pivot.is_zero():
            raise CyclicityError(
                f"elimination order invalid: coefficient of {name} vanishes in b_{t}"
            )
        rest = bt.substitute_params({name: Fraction(0)})
        solution = -(rest / pivot)
        pivots.append(pivot)
        solutions[name] = solution
        current = [
            c if i <= t else substitute_delta(c, name, solution)
            for i, c in enumerate(current)
        ]
    # close the branch: later solutions feed into earlier ones
    for i in range(k - 2, -1, -1):
        for j in range(i + 1, k):
            solutions[order[i]] = substitute_delta(
                solutions[order[i]], order[j], solutions[order[j]]
            )
    return solutions, current[k:], pivots


# ---------------------------------------------------------------- factoring

@dataclass
class FactoredResidual:
    ok: bool
    L: SymValue | None
    delta_poly: ParamPoly | None     # primitive, positive leading coefficient
    delta_name: str | None
    diagnostic: str = ""
    residual: SymValue | None = None


def factor_L_Delta(residual: SymValue, deltas: Sequence[str]) -> FactoredResidual:
    """Split a substituted residual as L * Delta.

    L carries the (linear) perturbation-parameter dependence, numeric
    prefactors, radicals and denominators; Delta is a content-primitive
    polynomial in the remaining system parameters.  Residuals not of this
    shape are returned unfactored with a diagnostic.
    """
    try:
        present = [d for d in deltas if not residual.coefficient_of(d).is_zero()]
    except ValueError as exc:
        return FactoredResidual(False, None, None, None, str(exc), residual)
    if not present:
        return FactoredResidual(False, None, None, None,
                                "residual has no perturbation-parameter part", residual)
    name = present[0]
    coeff = residual.coefficient_of(name)
    if len(present) > 1:
        return FactoredResidual(False, None, None, None,
                                f"residual involves several parameters: {present}", residual)
    if len(coeff.terms) != 1:
        return FactoredResidual(False, None, None, None,
                                "coefficient mixes inequivalent constant structures", residual)
    const, expr = coeff.terms[0]
    if len(expr.num) != 1:
        return FactoredResidual(False, None, None, None,
                                "coefficient mixes radical monomials", residual)
    (mono, npoly), = expr.num.items()
    den = expr.den
    if not den.is_constant():
        g = poly_gcd(npoly, den)
        if not g.is_constant():
            npoly = npoly.exact_divide(g)
            den = den.exact_divide(g)
    content, prim = npoly.primitive_part()
    ring = residual.ring
    L_expr = RadExpr(ring, {mono: ring.const(content)}, den)
    L = SymValue(ring, [(const, L_expr)]) * ring.expr_var(name)
    return FactoredResidual(True, L, prim, name, "", residual)


def factor_family(residuals: Sequence[SymValue], deltas: Sequence[str]
                  ) -> list[FactoredResidual]:
    """Factor each residual, then move any common Delta factor into L.

    The common polynomial factor across all Delta parts (for instance a
    shared bracket) belongs to the parameter-linear side; extracting it makes
    the zero chain of the remaining Deltas meaningful.
    """
    base = [factor_L_Delta(r, deltas) for r in residuals]
    good = [f for f in base if f.ok]
    if len(good) < 2:
        return base
    g = good[0].delta_poly
    for f in good[1:]:
        g = poly_gcd(g, f.delta_poly)
        if g.is_constant():
            return base
    out = []
    for f in base:
        if not f.ok:
            out.append(f)
            continue
        reduced = f.delta_poly.exact_divide(g)
        if reduced is None:
            out.append(f)
            continue
        content, prim = reduced.primitive_part()
        out.append(FactoredResidual(
            True,
            f.L * SymValue.of(f.L.ring.from_poly(g) * content, f.L.ring),
            prim, f.delta_name, "", f.residual,
        ))
    return out


# --------------------------------------------------------------- witnesses

@dataclass
class ChainStep:
    """One step of the witness construction.

    kind = "fix":             pin param to a rational value
    kind = "solve-linear":    solve Delta_t = 0 for param (Delta_t linear in it)
    kind = "solve-quadratic": solve Delta_t = 0 for param, picking branch root_index
    kind = "isolate":         isolate the real roots of Delta_t in param, pick root_index
    """

    kind: str
    param: str
    residual: int | None = None
    value: Rat | None = None
    root_index: int = 0


@dataclass
class RootEnclosure:
    poly: list[Fraction]  # squarefree, rational coefficients, ascending
    lo: Fraction
    hi: Fraction
    guard: ParamPoly | None = None  # denominator that must stay nonzero

    def interval(self) -> RatInterval:
        return RatInterval(self.lo, self.hi)

    def refine(self) -> None:
        if self.lo == self.hi:
            return
        lo, hi = refine_root(self.poly, self.lo, self.hi, (self.hi - self.lo) / 4)
        self.lo, self.hi = lo, hi


@dataclass
class CyclicityCertificate:
    established: bool
    cycles: int
    k: int
    n: int
    path: str                                  # "direct" (k) or "chain" (k+n)
    branch: dict[str, str]
    pivots: list[str]
    deltas_eliminated: list[str]
    free_delta: dict[str, str]
    sigma_witness: dict[str, str]
    jacobian_delta: str
    jacobian_delta_interval: tuple[str, str] | None
    jacobian_sigma: str | None
    jacobian_sigma_interval: tuple[str, str] | None
    conditions: list[dict]
    failing_condition: str | None = None
    assumptions: list[str] = field(default_factory=list)

    def to_json(self, indent: int = 2) -> str:
        payload = {
            "established": self.established,
            "certified_cycles": self.cycles,
            "k": self.k,
            "n": self.n,
            "path": self.path,
            "eliminated": self.deltas_eliminated,
            "branch": dict(sorted(self.branch.items())),
            "pivots": self.pivots,
            "free_delta": dict(sorted(self.free_delta.items())),
            "sigma_witness": dict(sorted(self.sigma_witness.items())),
            "jacobian_delta": self.jacobian_delta,
            "jacobian_delta_interval": self.jacobian_delta_interval,
            "jacobian_sigma": self.jacobian_sigma,
            "jacobian_sigma_interval": self.jacobian_sigma_interval,
            "conditions": self.conditions,
            "failing_condition": self.failing_condition,
            "assumptions": self.assumptions,
        }
        return json.dumps(payload, indent=indent, sort_keys=True)


# ----------------------------------------------------- interval evaluation

def gamma_const_interval(const: GammaConst, digits: int = 40) -> RatInterval:
    """Enclosure of an exact constant; mpmath value padded by precision slack."""
    if const.is_zero():
        return RatInterval.point(0)
    if not const.primes and not const.pi_exp and not const.gammas:
        return RatInterval.point(const.mantissa)
    val = const.eval_mpf(digits)
    with mpmath.workdps(digits + 10):
        frac = Fraction(mpmath.nstr(val, digits + 5, strip_zeros=False))
    pad = abs(frac) * Fraction(1, 10 ** (digits - 2)) + Fraction(1, 10 ** (2 * digits))
    return RatInterval(frac - pad, frac + pad)


def radexpr_interval(expr: RadExpr, box: Mapping[str, RatInterval],
                     root_width: Fraction = Fraction(1, 10 ** 30)) -> RatInterval:
    """Rigorous rational enclosure of a radical expression over a box."""
    ring = expr.ring
    rad_vals: dict[int, RatInterval] = {}
    total = RatInterval.point(0)
    for (primes, rads), coeff in expr.num.items():
        term = poly_interval_eval(coeff, box)
        for p, e in primes:
            root = interval_nth_root(RatInterval.point(p), e.denominator, root_width)
            term = term * (root ** e.numerator)
        for i, e in enumerate(rads):
            if not e:
                continue
            if i not in rad_vals:
                base_iv = poly_interval_eval(ring.radicals[i].base, box)
                rad_vals[i] = interval_nth_root(base_iv, ring.radicals[i].index, root_width)
            term = term * (rad_vals[i] ** e)
        total = total + term
    den = poly_interval_eval(expr.den, box)
    return total / den


def symvalue_interval(value: SymValue, box: Mapping[str, RatInterval],
                      digits: int = 40) -> RatInterval:
    total = RatInterval.point(0)
    for const, expr in value.terms:
        total = total + gamma_const_interval(const, digits) * radexpr_interval(expr, box)
    return total


# ------------------------------------------------------------- certechecks

def _det_symvalue(rows: list[list[SymValue]], ring: Ring) -> SymValue:
    n = len(rows)
    if n == 0:
        return SymValue.of(Fraction(1), ring)
    if n == 1:
        return rows[0][0]
    total = SymValue.zero(ring)
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_symvalue(minor, ring)
        total = total + (term if j % 2 == 0 else -term)
    return total


def _det_poly(rows: list[list[ParamPoly]]) -> ParamPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_poly(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def certify_cycles(
    system: LinearCoeffSystem,
    eliminate: Sequence[str],
    steps: Sequence[ChainStep] = (),
    free_delta: Mapping[str, Rat] | None = None,
    digits: int = 40,
) -> CyclicityCertificate:
    """Build and check a limit-cycle certificate.

    ``eliminate`` fixes the k parameters zeroing b_0..b_{k-1}; ``steps``
    construct the witness in the remaining system parameters, consuming the
    substituted residuals Delta_0, Delta_1, ... in order; ``free_delta``
    gives values for the non-eliminated perturbation parameters (the first
    one appearing in the residuals must be nonzero).  Every nonvanishing
    hypothesis is discharged by exact or interval evaluation, with interval
    witnesses refined up to 64 times before giving up.
    """
    ring = system.ring
    free_delta = {k: Fraction(v) for k, v in (free_delta or {}).items()}
    branch, residuals, pivots = sequential_eliminate(system, eliminate)
    k = len(eliminate)

    factored = factor_family(residuals, [d for d in system.deltas if d not in eliminate])

    # ---- witness construction
    exact: dict[str, RadExpr] = {}
    enclosures: dict[str, RootEnclosure] = {}
    consumed_by: dict[int, ChainStep] = {}
    conditions: list[dict] = []
    n = 0
    for step in steps:
        if step.kind == "fix":
            exact[step.param] = RadExpr.from_rational(ring, Fraction(step.value))
            conditions.append({"kind": "fix", "param": step.param, "value": str(step.value)})
            continue
        idx = step.residual if step.residual is not None else n
        if idx >= len(factored) or not factored[idx].ok:
            raise CyclicityError(f"no factored residual at chain position {idx}")
        delta_poly = factored[idx].delta_poly
        reduced = _substitute_exact_poly(delta_poly, exact, ring)
        if step.kind == "solve-linear":
            exact[step.param] = _solve_linear(reduced, step.param, ring)
            conditions.append({"kind": "solve-linear", "param": step.param,
                               "delta_index": idx})
        elif step.kind == "solve-quadratic":
            exact[step.param] = _solve_quadratic(reduced, step.param, ring, step.root_index)
            conditions.append({"kind": "solve-quadratic", "param": step.param,
                               "delta_index": idx, "root_index": step.root_index})
        elif step.kind == "isolate":
            enclosure = _isolate_step(reduced, step, ring)
            enclosures[step.param] = enclosure
            conditions.append({
                "kind": "isolate", "param": step.param, "delta_index": idx,
                "poly": [str(c) for c in enclosure.poly],
                "interval": [str(enclosure.lo), str(enclosure.hi)],
                "root_index": step.root_index,
            })
        else:
            raise CyclicityError(f"unknown chain step kind {step.kind!r}")
        consumed_by[idx] = step
        n += 1

    solved_params = [s.param for s in steps if s.kind != "fix"]
    _close_witness(exact)

    # ---- zero checks for the consumed chain positions
    for t in range(n):
        if not factored[t].ok:
            return _failed_certificate(system, eliminate, branch, pivots, free_delta,
                                       exact, enclosures, conditions,
                                       f"residual {t} not factorable: {factored[t].diagnostic}")
        step = consumed_by.get(t)
        if step is not None and step.kind == "isolate":
            # the enclosed root is a zero of this Delta by construction
            conditions.append({"kind": "zero", "delta_index": t, "by": "isolated-root"})
            continue
        reduced = _substitute_exact_poly(factored[t].delta_poly, exact, ring)
        if not reduced.is_zero():
            return _failed_certificate(
                system, eliminate, branch, pivots, free_delta, exact, enclosures,
                conditions, f"Delta_{t} does not vanish at the exact witness")
        conditions.append({"kind": "zero", "delta_index": t, "by": "exact-substitution"})

    # ---- nonvanishing checks with refinement
    def boxes() -> dict[str, RatInterval]:
        out = {}
        for name, val in exact.items():
            out[name] = _radexpr_point_interval(val)
        for name, enc in enclosures.items():
            out[name] = enc.interval()
        for name, val in free_delta.items():
            out[name] = RatInterval.point(val)
        return out

    def check_nonzero(value: SymValue, label: str) -> tuple[bool, RatInterval | None]:
        for attempt in range(MAX_REFINEMENTS):
            box = boxes()
            missing = value.used_params() - set(box)
            for name in missing:
                box[name] = RatInterval.point(0)  # unused free deltas default to 0
            try:
                iv = symvalue_interval(value, box, digits + 4 * attempt)
            except ZeroDivisionError:
                iv = None
            if iv is not None and not iv.contains_zero():
                conditions.append({"kind": "nonzero", "label": label,
                                   "interval": [str(iv.lo), str(iv.hi)]})
                return True, iv
            if not enclosures:
                break
            for enc in enclosures.values():
                enc.refine()
        conditions.append({"kind": "nonzero", "label": label, "interval": None,
                           "status": "undecided"})
        return False, None

    failing = None

    # denominators guarding isolated roots stay nonzero over the enclosure
    for name, enc in enclosures.items():
        if enc.guard is not None:
            ok, _ = check_nonzero(SymValue.of(ring.from_poly(enc.guard), ring),
                                  f"denominator guard for {name}")
            if not ok:
                failing = f"denominator guard for {name} undecided or zero"
                break

    # pivots recorded by the elimination
    for t, pivot in enumerate(pivots):
        if failing is not None:
            break
        ok, _ = check_nonzero(pivot, f"pivot b_{t} / d({eliminate[t]})")
        if not ok:
            failing = f"pivot for {eliminate[t]} undecided or zero"
            break

    # Jacobian of (b_0..b_{k-1}) in the eliminated parameters
    jac_delta_iv = None
    jac_delta_txt = ""
    if failing is None:
        rows = [[system.coefficients[t].coefficient_of(d) for d in eliminate]
                for t in range(k)]
        det = _det_symvalue(rows, ring)
        jac_delta_txt = det.to_text()
        ok, jac_delta_iv = check_nonzero(det, "jacobian in eliminated parameters")
        if not ok:
            failing = "delta-Jacobian undecided or zero"

    # L factors and the final Delta
    if failing is None:
        for t in range(min(n + 1, len(factored))):
            f = factored[t]
            if not f.ok:
                failing = f"residual {t} unfactorable: {f.diagnostic}"
                break
            ok, _ = check_nonzero(f.L, f"L factor of residual {t}")
            if not ok:
                failing = f"L factor of residual {t} undecided or zero"
                break
    if failing is None and n < len(factored):
        delta_n = factored[n].delta_poly
        ok, _ = check_nonzero(SymValue.of(ring.from_poly(delta_n), ring), f"Delta_{n}")
        if not ok:
            failing = f"Delta_{n} undecided or zero at the witness"
    elif failing is None and n >= len(factored):
        failing = "no residual left to play the nonvanishing Delta_n"

    # sigma-Jacobian for the chain path
    jac_sigma_txt = None
    jac_sigma_iv = None
    if failing is None and n >= 1:
        rows = []
        for t in range(n):
            rows.append([factored[t].delta_poly.derivative(p) for p in solved_params])
        det = _det_poly(rows)
        jac_sigma_txt = det.to_text()
        ok, jac_sigma_iv = check_nonzero(SymValue.of(ring.from_poly(det), ring),
                                         "jacobian of the Delta chain")
        if not ok:
            failing = "sigma-Jacobian undecided or zero"

    cycles = k + n if failing is None else 0
    path = "chain" if n >= 1 else "direct"
    cert = CyclicityCertificate(
        established=failing is None,
        cycles=cycles if failing is None else 0,
        k=k,
        n=n,
        path=path,
        branch={name: sol.to_text() for name, sol in branch.items()},
        pivots=[p.to_text() for p in pivots],
        deltas_eliminated=list(eliminate),
        free_delta={name: str(v) for name, v in free_delta.items()},
        sigma_witness=_witness_description(exact, enclosures),
        jacobian_delta=jac_delta_txt,
        jacobian_delta_interval=_iv_str(jac_delta_iv),
        jacobian_sigma=jac_sigma_txt,
        jacobian_sigma_interval=_iv_str(jac_sigma_iv),
        conditions=conditions,
        failing_condition=failing,
    )
    return cert


def _iv_str(iv: RatInterval | None):
    if iv is None:
        return None
    return (str(iv.lo), str(iv.hi))


def _witness_description(exact, enclosures) -> dict[str, str]:
    out = {}
    for name, val in exact.items():
        out[name] = val.to_text()
    for name, enc in enclosures.items():
        out[name] = f"root of {enc.poly} in [{enc.lo}, {enc.hi}]"
    return out


def _failed_certificate(system, eliminate, branch, pivots, free_delta, exact,
                        enclosures, conditions, reason) -> CyclicityCertificate:
    return CyclicityCertificate(
        established=False, cycles=0, k=len(eliminate), n=0, path="none",
        branch={name: sol.to_text() for name, sol in branch.items()},
        pivots=[p.to_text() for p in pivots],
        deltas_eliminated=list(eliminate),
        free_delta={name: str(v) for name, v in free_delta.items()},
        sigma_witness=_witness_description(exact, enclosures),
        jacobian_delta="", jacobian_delta_interval=None,
        jacobian_sigma=None, jacobian_sigma_interval=None,
        conditions=conditions, failing_condition=reason,
    )


def _radexpr_point_interval(val: RadExpr) -> RatInterval:
    if val.is_rational():
        return RatInterval.point(val.as_fraction())
    return radexpr_interval(val, {})


def _close_witness(exact: dict[str, "RadExpr"]) -> None:
    """Resolve cross-references among exact witness values (no cycles)."""
    for _ in range(len(exact) + 1):
        changed = False
        for name in list(exact):
            val = exact[name]
            used = set()
            for coeff in val.num.values():
                used |= coeff.variables_present()
            used |= val.den.variables_present()
            refs = {u: exact[u] for u in used if u in exact and u != name}
            if refs:
                exact[name] = val.substitute_params(refs)
                changed = True
        if not changed:
            return
    raise CyclicityError("circular dependencies among exact witness values")


def _substitute_exact_poly(p: ParamPoly, exact: Mapping[str, RadExpr], ring: Ring):
    """Polynomial with exact witness values substituted; SymValue result."""
    relevant = {k: v for k, v in exact.items() if k in p.variables_present()}
    value = SymValue.of(ring.from_poly(p), ring)
    if relevant:
        value = value.substitute_params(relevant)
    return value


def _solve_linear(reduced: SymValue, param: str, ring: Ring) -> RadExpr:
    lead = reduced.coefficient_of(param)
    rest = reduced.substitute_params({param: Fraction(0)})
    if lead.is_zero():
        raise CyclicityError(f"Delta is not linear in {param}")
    solution = -(rest / lead)
    return _symvalue_to_radexpr(solution)


def _solve_quadratic(reduced: SymValue, param: str, ring: Ring, root_index: int) -> RadExpr:
    if len(reduced.terms) != 1:
        raise CyclicityError("quadratic solve needs a single-structure value")
    const, expr = reduced.terms[0]
    if const != GammaConst.rational(const.mantissa):
        raise CyclicityError("quadratic solve needs a rational prefactor")
    poly = expr.as_param_poly()
    if poly.degree_in(param) != 2:
        raise CyclicityError(f"Delta is not quadratic in {param}")
    c2 = poly.coefficient_of(param, 2)
    c1 = poly.coefficient_of(param, 1)
    c0 = poly.coefficient_of(param, 0)
    disc = c1 * c1 - c2 * c0 * 4
    root = _poly_sqrt_radexpr(disc, ring)
    a2 = ring.from_poly(c2)
    sols = [
        (-(ring.from_poly(c1)) + root) / (a2 * 2),
        (-(ring.from_poly(c1)) - root) / (a2 * 2),
    ]
    return sols[root_index]


def _poly_sqrt_radexpr(p: ParamPoly, ring: Ring) -> RadExpr:
    """Exact square root of a polynomial as monomial * sqrt(content * rest)."""
    from .poly import poly_sqrt

    direct = poly_sqrt(p)
    if direct is not None:
        return ring.from_poly(direct)
    mono = p.monomial_content()
    half = tuple(e // 2 for e in mono)
    even = tuple(2 * (e // 2) for e in mono)
    body = p.divide_monomial(even)
    left = ParamPoly(p.params, {half: Fraction(1)})
    return ring.from_poly(left) * ring.radical_root(body, 2)


def _symvalue_to_radexpr(value: SymValue) -> RadExpr:
    if value.is_zero():
        return value.ring.zero()
    total = value.ring.zero()
    for const, expr in value.terms:
        if const.gammas or const.pi_exp:
            raise CyclicityError("witness value involves transcendental constants")
        factor = RadExpr._from_prime_powers(value.ring, const.primes) * const.mantissa
        total = total + factor * expr
    return total


def _isolate_step(reduced: SymValue, step: ChainStep, ring: Ring) -> RootEnclosure:
    expr = _symvalue_to_radexpr(reduced)
    if not expr.is_radical_free():
        raise CyclicityError("isolation requires rational coefficients after substitution")
    if expr.is_zero():
        raise CyclicityError("chain polynomial vanished identically before isolation")
    # roots of a rational function are roots of its numerator; the denominator
    # becomes a guard that must not vanish over the enclosure
    numerator = expr.num[next(iter(expr.num))]
    guard = None if expr.den.is_constant() else expr.den
    used = numerator.variables_present()
    if used - {step.param}:
        raise CyclicityError(
            f"Delta still involves {sorted(used - {step.param})}; fix them first"
        )
    records = isolate_real_roots(numerator, step.param)
    if not records:
        raise CyclicityError("no real root to isolate")
    if step.root_index >= len(records):
        raise CyclicityError(f"root index {step.root_index} out of range ({len(records)} roots)")
    rec = records[step.root_index]
    from .realroots import from_param_poly
    sqfree = _squarefree(from_param_poly(numerator, step.param))
    if rec.exact is not None:
        return RootEnclosure(sqfree, rec.exact, rec.exact, guard)
    return RootEnclosure(sqfree, rec.lo, rec.hi, guard)


def _squarefree(coeffs: list[Fraction]) -> list[Fraction]:
    from .poly import univariate_gcd
    from .realroots import poly_derivative, poly_divmod, strip

    f = strip(list(coeffs))
    g = univariate_gcd(f, strip(poly_derivative(f)))
    if len(g) <= 1:
        return f
    q, _ = poly_divmod(f, g)
    return q
