"""Expansion of the first-order Melnikov function near a planar center.

For a polynomial Hamiltonian in normal form (elementary: quadratic part
``(w/2)(x^2+y^2)``; nilpotent: ``(w/2) y^2``) perturbed with divergence
``D(x, y)`` linear in parameters, the Melnikov integral over the closed level
ovals expands as ``M(h) = h^{(p+1)/(2p)} * sum_l b_l h^{l/p}``.  This module
computes the ``b_l`` exactly:

1. the curve ``y = phi(x)`` of vertical tangencies (``H_y = 0``),
2. the shifted Hamiltonian ``H(x, v + phi(x)) = H0(x) + sum H_j(x) v^{j+1}``,
3. the branch series ``v1(x, w) = sum a_j(x) w^j`` solving ``H - H0 = w^2``,
4. odd projections ``qbar_j`` of the divergence antiderivative,
5. the flattening substitution ``u = psi(x) = x (H0/x^{2p})^{1/(2p)}`` and its
   reversion,
6. even moments ``r_ij`` and exact Beta-type moment constants.

All arithmetic is exact; radicals such as the ``2p``-th root of the leading
``H0`` coefficient are adjoined formally and positivity assumptions are
recorded on the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .constants import GammaConst
from .poly import ParamPoly
from .radicals import RadExpr, Ring
from .series import TruncSeries
from .symvalue import SymValue

Rat = Union[int, Fraction]
BivarPoly = dict[tuple[int, int], ParamPoly]

__all__ = [
    "CenterClassification",
    "ClassificationError",
    "MelnikovExpansion",
    "PipelineError",
    "SystemSpec",
    "a_series",
    "beta_coeff",
    "classify_origin",
    "divergence_of",
    "hstar_decompose",
    "melnikov_expansion",
    "moment_coeff",
    "psi_reversion",
    "q_series",
    "qbar_odd_part",
    "r_coeffs",
    "solve_phi",
]


class PipelineError(ValueError):
    pass


class ClassificationError(PipelineError):
    pass


# --------------------------------------------------------------- system spec

@dataclass
class SystemSpec:
    """Hamiltonian + perturbation divergence in center normal form.

    ``hamiltonian`` and ``divergence`` map (x-degree, y-degree) to coefficient
    polynomials over ``ring.params``.  ``positive`` lists polynomials the
    caller asserts to be positive (used for symbolic sign decisions).
    """

    ring: Ring
    hamiltonian: BivarPoly
    divergence: BivarPoly
    omega: Fraction
    kind: str = "auto"  # elementary | nilpotent | auto
    delta_params: tuple[str, ...] = ()
    positive: tuple[ParamPoly, ...] = ()

    @classmethod
    def from_polynomials(
        cls,
        H: ParamPoly,
        divergence: ParamPoly,
        x: str = "x",
        y: str = "y",
        kind: str = "auto",
        delta_params: Sequence[str] = (),
        positive: Sequence[ParamPoly] = (),
    ) -> "SystemSpec":
        names = tuple(n for n in H.params if n not in (x, y))
        ring = Ring(names)
        ham = _split_bivar(H, x, y, names)
        div = _split_bivar(divergence.extend_params(H.params), x, y, names)
        for (i, j) in ((0, 0), (1, 0), (0, 1)):
            if (i, j) in ham:
                raise PipelineError("Hamiltonian must have no constant or linear terms")
        kind, omega = _normal_form_kind(ham, kind)
        return cls(
            ring=ring,
            hamiltonian=ham,
            divergence=div,
            omega=omega,
            kind=kind,
            delta_params=tuple(delta_params),
            positive=tuple(p.extend_params(names) if p.params != names else p
                           for p in positive),
        )

    def max_y_degree(self) -> int:
        return max((j for (_, j) in self.hamiltonian), default=0)

    def divergence_y_degree(self) -> int:
        return max((j for (_, j) in self.divergence), default=0)

    def decide_sign(self, poly: ParamPoly,
                    numeric_params: Mapping[str, Rat] | None = None) -> int | None:
        """Sign of a coefficient polynomial, if decidable.

        Constants decide themselves; otherwise numeric parameter values or a
        positivity assertion (matching up to a rational multiple) is used.
        """
        if poly.is_zero():
            return 0
        if numeric_params:
            val = poly.evaluate(numeric_params)
            return 0 if val == 0 else (1 if val > 0 else -1)
        if poly.is_constant():
            c = poly.constant_value()
            return 1 if c > 0 else -1
        for assumed in self.positive:
            q = poly.exact_divide(assumed)
            if q is not None and q.is_constant():
                c = q.constant_value()
                if c != 0:
                    return 1 if c > 0 else -1
        return None


def _split_bivar(p: ParamPoly, x: str, y: str, names: tuple[str, ...]) -> BivarPoly:
    ix = p.params.index(x)
    iy = p.params.index(y)
    keep = [k for k, n in enumerate(p.params) if n not in (x, y)]
    out: BivarPoly = {}
    for exps, c in p.terms.items():
        key = (exps[ix], exps[iy])
        inner = tuple(exps[k] for k in keep)
        poly = out.get(key)
        add = ParamPoly(names, {inner: c})
        out[key] = add if poly is None else poly + add
    return {k: v for k, v in out.items() if not v.is_zero()}


def _normal_form_kind(ham: BivarPoly, kind: str) -> tuple[str, Fraction]:
    c20 = ham.get((2, 0))
    c02 = ham.get((0, 2))
    c11 = ham.get((1, 1))
    if c11 is not None and not c11.is_zero():
        raise PipelineError("quadratic part has a cross term; not in a recognized normal form")
    if c02 is None or c02.is_zero() or not c02.is_constant():
        raise PipelineError("quadratic part must contain a constant positive y^2 term")
    half_omega = c02.constant_value()
    if half_omega <= 0:
        raise PipelineError("y^2 coefficient must be positive")
    has_x2 = c20 is not None and not c20.is_zero()
    if has_x2:
        if not (c20.is_constant() and c20.constant_value() == half_omega):
            raise PipelineError("x^2 and y^2 coefficients must match for an elementary center")
        detected = "elementary"
    else:
        detected = "nilpotent"
    if kind == "auto":
        kind = detected
    elif kind != detected:
        raise PipelineError(f"declared kind {kind!r} but quadratic part looks {detected!r}")
    return kind, 2 * half_omega


def divergence_of(p: ParamPoly, q: ParamPoly, x: str = "x", y: str = "y") -> ParamPoly:
    """p_x + q_y for a perturbation given as a vector field."""
    return p.derivative(x) + q.extend_params(p.params).derivative(y)


# ----------------------------------------------------------- classification

@dataclass
class CenterClassification:
    kind: str           # elementary-center | cusp | nilpotent-saddle |
                        # nilpotent-center | degenerate-line
    k: int | None       # first nonvanishing order of H0
    h_k: ParamPoly | None
    p: int | None       # k = 2p for centers
    order: int | None   # cusp: k = 2m+1; center/saddle: k = 2m+2

    def is_center(self) -> bool:
        return self.kind in ("elementary-center", "nilpotent-center")


def classify_origin(
    sys: SystemSpec,
    numeric_params: Mapping[str, Rat] | None = None,
    max_order: int | None = None,
) -> CenterClassification:
    """Classify the origin per the sign of the first nonzero H0 coefficient.

    Odd first index k gives a cusp of order (k-1)/2; even k gives a center or
    saddle of order (k-2)/2 according to the sign of h_k.  Symbolically
    undecidable signs raise :class:`ClassificationError` unless numeric
    values or positivity assertions settle them.
    """
    if sys.kind == "elementary":
        return CenterClassification("elementary-center", 2, sys.ring.const(sys.omega / 2), 1, None)
    bound = max_order or (4 * max(i + j for (i, j) in sys.hamiltonian) + 4)
    for k in range(3, bound + 1):
        phi = solve_phi(sys, k + 1)
        H0 = _eval_bivar(sys.ring, sys.hamiltonian, phi, k + 1)
        coeff = _series_coeff_poly(H0, k)
        if coeff.is_zero():
            continue
        sign = sys.decide_sign(coeff, numeric_params)
        if sign is None:
            raise ClassificationError(
                f"classification needs parameter values: sign of x^{k} coefficient "
                f"({coeff.to_text()}) is undecidable"
            )
        if sign == 0:
            continue
        if k % 2 == 1:
            return CenterClassification("cusp", k, coeff, None, (k - 1) // 2)
        if sign > 0:
            return CenterClassification("nilpotent-center", k, coeff, k // 2, (k - 2) // 2)
        return CenterClassification("nilpotent-saddle", k, coeff, None, (k - 2) // 2)
    return CenterClassification("degenerate-line", None, None, None, None)


def _series_coeff_poly(series: TruncSeries, k: int) -> ParamPoly:
    c = series[k]
    if not c.is_radical_free():
        raise PipelineError("unexpected radical in a Hamiltonian series coefficient")
    return c.as_param_poly()


# ------------------------------------------------------------ the pipeline

def _eval_bivar(ring: Ring, table: BivarPoly, yser: TruncSeries, order: int,
                x_power_shift: bool = True) -> TruncSeries:
    """sum_{ij} c_ij x^i yser(x)^j truncated at x^order."""
    zero = TruncSeries.zero(ring, yser.var, order)
    powers: dict[int, TruncSeries] = {0: TruncSeries.const(ring, yser.var, 1, order)}
    max_j = max((j for (_, j) in table), default=0)
    for j in range(1, max_j + 1):
        powers[j] = powers[j - 1] * yser.truncate(order)
    total = zero
    for (i, j), c in sorted(table.items()):
        term = powers[j] * c
        if i:
            term = term.truncate(max(order - i, 1)).shift_up(i).truncate(order)
        total = total + term
    return total


def solve_phi(sys: SystemSpec, order: int) -> TruncSeries:
    """Series phi with H_y(x, phi(x)) = O(x^order); phi = O(x^2)."""
    ring = sys.ring
    Hy: BivarPoly = {}
    for (i, j), c in sys.hamiltonian.items():
        if j >= 1:
            key = (i, j - 1)
            add = c * j
            Hy[key] = Hy.get(key, ring.poly()) + add
    omega = RadExpr.from_rational(ring, sys.omega)
    inv_omega = omega.inverse()
    coeffs = [ring.zero(), ring.zero()]
    for m in range(2, order):
        phi_partial = TruncSeries(ring, "x", coeffs, m + 1)
        F = _eval_bivar(ring, Hy, phi_partial, m + 1)
        coeffs.append(-(F[m] * inv_omega))
    return TruncSeries(ring, "x", coeffs, order)


def hstar_decompose(sys: SystemSpec, phi: TruncSeries, order: int
                    ) -> tuple[TruncSeries, list[TruncSeries]]:
    """H(x, v + phi(x)) = H0(x) + sum_{j>=1} H_j(x) v^{j+1}.

    Returns (H0, [H_1, H_2, ...]); the v^1 coefficient vanishes identically
    (checked) because phi solves H_y = 0.
    """
    ring = sys.ring
    deg_y = sys.max_y_degree()
    layers: list[TruncSeries] = []
    for k in range(deg_y + 1):
        table: BivarPoly = {}
        for (i, j), c in sys.hamiltonian.items():
            if j >= k:
                key = (i, j - k)
                add = c * _binom(j, k)
                table[key] = table.get(key, ring.poly()) + add
        layers.append(_eval_bivar(ring, table, phi, order))
    if not layers[1].truncate(order).is_zero():
        raise PipelineError("internal consistency failure: H_y(x, phi) did not vanish")
    H0 = layers[0]
    hj = layers[2:]
    if hj and hj[0][0] != RadExpr.from_rational(ring, sys.omega / 2):
        raise PipelineError("internal consistency failure: H_1(0) != omega/2")
    return H0, hj


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def q_series(sys: SystemSpec, phi: TruncSeries, order: int) -> list[TruncSeries]:
    """q_{j+1}(x) = (1/(j+1)!) d^j/dy^j (divergence) at (x, phi(x))."""
    ring = sys.ring
    deg = sys.divergence_y_degree()
    out = []
    for j in range(deg + 1):
        table: BivarPoly = {}
        for (i, k), c in sys.divergence.items():
            if k >= j:
                # d^j/dy^j y^k = k!/(k-j)! y^(k-j); divided by (j+1)!
                factor = Fraction(1)
                for t in range(j):
                    factor *= (k - t)
                factor /= _factorial(j + 1)
                key = (i, k - j)
                add = c * factor
                table[key] = table.get(key, ring.poly()) + add
        out.append(_eval_bivar(ring, table, phi, order))
    return out


def _factorial(n: int) -> int:
    from math import factorial

    return factorial(n)


# w-polynomials: dense lists of x-series, index = power of w
WPoly = list


def _wmul(a: WPoly, b: WPoly, n: int, ring: Ring, x_order: int) -> WPoly:
    zero = TruncSeries.zero(ring, "x", x_order)
    out = [zero] * n
    for i, ai in enumerate(a[:n]):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b[: n - i]):
            if bj.is_zero():
                continue
            out[i + j] = out[i + j] + ai * bj
    return out


def a_series(hstar: Sequence[TruncSeries], w_order: int, ring: Ring) -> WPoly:
    """Coefficients a_j(x) of v1(x,w) = sum_j a_j w^j with sum H_j v1^{j+1} = w^2.

    Returns the dense w-polynomial [0, a_1, ..., a_{w_order-1}]; a_1 is the
    positive branch 1/sqrt(H_1).
    """
    if not hstar:
        raise PipelineError("need at least H_1 to build the branch series")
    H1 = hstar[0]
    x_order = H1.order
    a1 = H1.reciprocal_sqrt()
    zero = TruncSeries.zero(ring, "x", x_order)
    V: WPoly = [zero, a1]
    R = a1 * Fraction(1, 2)  # 1/(2 sqrt(H_1)) = a_1/2, the Newton divisor
    for m in range(2, w_order):
        n = m + 2
        powers = _wmul(V, V, n, ring, x_order)
        total = [c * hstar[0] for c in powers]
        current = powers
        for j in range(1, len(hstar)):
            current = _wmul(current, V, n, ring, x_order)
            if hstar[j].is_zero():
                continue
            for k in range(len(current)):
                total[k] = total[k] + current[k] * hstar[j]
        defect = total[m + 1] if m + 1 < len(total) else zero
        V.append(-(defect * R))
    return V


def check_branch_defect(hstar: Sequence[TruncSeries], V: WPoly, w_order: int,
                        ring: Ring) -> None:
    """Assert sum_j H_j V^{j+1} - w^2 = O(w^{w_order}) exactly."""
    if not hstar:
        return
    x_order = hstar[0].order
    current = _wmul(V, V, w_order, ring, x_order)
    total = [c * hstar[0] for c in current]
    for j in range(1, len(hstar)):
        current = _wmul(current, V, w_order, ring, x_order)
        for k in range(len(current)):
            total[k] = total[k] + current[k] * hstar[j]
    for k, coeff in enumerate(total):
        target_zero = coeff if k != 2 else coeff - 1
        if not target_zero.is_zero():
            raise PipelineError(f"branch series defect at w^{k}")


def qbar_odd_part(q_list: Sequence[TruncSeries], V: WPoly, j_max: int,
                  ring: Ring) -> list[TruncSeries]:
    """Odd-in-w projections qbar_j(x) of Q(w) - Q(-w), Q = sum q_k v1^k.

    The even part of the difference must vanish identically; a nonzero even
    coefficient signals an upstream bug and raises.
    """
    if not q_list:
        return []
    x_order = q_list[0].order
    n = 2 * j_max + 2
    zero = TruncSeries.zero(ring, "x", x_order)

    def accumulate(branch: WPoly) -> WPoly:
        acc: WPoly = [zero] * n
        current: WPoly = [TruncSeries.const(ring, "x", 1, x_order)]
        for qk in q_list:
            current = _wmul(current, branch, n, ring, x_order)
            if qk.is_zero():
                continue
            for t in range(len(current)):
                acc[t] = acc[t] + current[t] * qk
        return acc

    # v2(x, w) = v1(x, -w): negate the odd branch coefficients
    V2 = [(-c if k % 2 else c) for k, c in enumerate(V)]
    Q1 = accumulate(V)
    Q2 = accumulate(V2)
    diff = [a - b for a, b in zip(Q1, Q2)]
    for t in range(0, n, 2):
        if not diff[t].is_zero():
            raise PipelineError(
                "internal consistency failure: even part of the odd projection survived"
            )
    return [diff[2 * j + 1] if 2 * j + 1 < n else zero for j in range(j_max + 1)]


def psi_reversion(H0: TruncSeries, p: int, u_order: int,
                  ring: Ring) -> tuple[TruncSeries, TruncSeries, TruncSeries]:
    """Flattening map psi(x) = x (H0/x^{2p})^{1/(2p)}, its reversion and psi'.

    Factoring x^{2p} first realizes the odd square-root branch on both sides
    of 0 in a single series; psi'(0) is the 2p-th root of the leading H0
    coefficient (a radical adjoined under a positivity assumption).
    """
    if H0.valuation() != 2 * p:
        raise PipelineError(
            f"inconsistent p: H0 starts at x^{H0.valuation()}, expected x^{2 * p}"
        )
    S = H0.shift_down(2 * p)
    T = S.fractional_power(1, 2 * p)
    psi = T.truncate(u_order).shift_up(1).truncate(u_order + 1)
    psi_prime = psi.derivative()
    psi_inv = psi.truncate(u_order).reversion().rename("u")
    return psi, psi_inv, psi_prime


def r_coeffs(qbar: Sequence[TruncSeries], psi_prime: TruncSeries,
             psi_inv: TruncSeries, i_max: int) -> dict[tuple[int, int], RadExpr]:
    """Even moments r_ij: qtilde_j(u) + qtilde_j(-u) = sum_i r_ij u^{2i}."""
    out: dict[tuple[int, int], RadExpr] = {}
    for j, qb in enumerate(qbar):
        n = min(2 * i_max + 1, psi_inv.order)
        integrand = (qb / psi_prime).truncate(n)
        qt = integrand.compose(psi_inv.truncate(n))
        for i in range(i_max + 1):
            if 2 * i < qt.order:
                out[(i, j)] = qt[2 * i] * 2
    return out


# -------------------------------------------------------- moment constants

def beta_coeff(i: int, j: int, p: int) -> GammaConst:
    """Moment integral over the unit interval, literal-integrand convention:

        int_0^1 v^(2i/p) (1-v^2)^(j+1/2) dv  =  (1/2) B(i/p + 1/2, j + 3/2).

    This matches the simplified tabulated convention; it coincides with
    :func:`moment_coeff` exactly when p = 1.
    """
    if i < 0 or j < 0 or p < 1:
        raise ValueError("need i, j >= 0 and p >= 1")
    return GammaConst.rational(Fraction(1, 2)) * GammaConst.beta(
        Fraction(i, p) + Fraction(1, 2), Fraction(j) + Fraction(3, 2)
    )


def moment_coeff(i: int, j: int, p: int) -> GammaConst:
    """Exact scaled moment of the level-set integral:

        int_0^{h^{1/(2p)}} u^{2i} (h - u^{2p})^{j+1/2} du
            = moment_coeff(i,j,p) * h^{(p+1)/(2p) + (i+pj)/p},

    equal to (1/(2p)) B((2i+1)/(2p), j + 3/2).  The value lies in (0, 1).
    """
    if i < 0 or j < 0 or p < 1:
        raise ValueError("need i, j >= 0 and p >= 1")
    return GammaConst.rational(Fraction(1, 2 * p)) * GammaConst.beta(
        Fraction(2 * i + 1, 2 * p), Fraction(j) + Fraction(3, 2)
    )


# ------------------------------------------------------------ entry point

@dataclass
class MelnikovExpansion:
    """Coefficients b_0..b_L of M(h) = h^{(p+1)/(2p)} sum b_l h^{l/p}."""

    p: int
    coefficients: list[SymValue]
    ring: Ring
    convention: str = "exact"
    assumptions: list[str] = field(default_factory=list)

    @property
    def L(self) -> int:
        return len(self.coefficients) - 1

    def exponent(self, l: int) -> Fraction:
        return Fraction(self.p + 1, 2 * self.p) + Fraction(l, self.p)


def melnikov_expansion(
    sys: SystemSpec,
    L: int,
    convention: str = "exact",
    numeric_params: Mapping[str, Rat] | None = None,
    order_margin: int = 0,
) -> MelnikovExpansion:
    """Exact b_0..b_L for a system with a center at the origin.

    ``convention`` selects the moment constants: "exact" uses the true
    change-of-variables value (:func:`moment_coeff`); "simplified" uses the
    literal-integrand convention (:func:`beta_coeff`).  The two agree for
    p = 1.  Raises :class:`PipelineError` when the origin is not a center.
    """
    if L < 0:
        raise ValueError("L must be non-negative")
    if convention not in ("exact", "simplified"):
        raise ValueError(f"unknown moment convention {convention!r}")
    cls = classify_origin(sys, numeric_params)
    if not cls.is_center():
        raise PipelineError(f"no period annulus at origin: classified as {cls.kind}")
    p = cls.p
    ring = sys.ring

    x_order = 2 * p * (L + 2) + order_margin
    w_order = 2 * L + 3 + order_margin
    u_order = 2 * L + 3 + order_margin

    phi = solve_phi(sys, x_order)
    H0, hstar = hstar_decompose(sys, phi, x_order)
    q_list = q_series(sys, phi, x_order)
    V = a_series(hstar, w_order, ring)
    check_branch_defect(hstar, V, w_order, ring)
    j_max = L // p
    qbar = qbar_odd_part(q_list, V, j_max, ring)
    _psi, psi_inv, psi_prime = psi_reversion(H0, p, u_order, ring)
    r = r_coeffs(qbar, psi_prime, psi_inv.truncate(u_order), L)

    moments = beta_coeff if convention == "simplified" else moment_coeff
    coeffs: list[SymValue] = []
    for l in range(L + 1):
        total = SymValue.zero(ring)
        for j in range(l // p + 1):
            i = l - p * j
            rij = r.get((i, j))
            if rij is None or rij.is_zero():
                continue
            total = total + SymValue(ring, [(moments(i, j, p), rij)])
        coeffs.append(total)

    assumptions = [f"omega = {sys.omega} > 0"]
    lead = _series_coeff_poly(H0, 2 * p)
    if not (lead.is_constant() and lead.constant_value() > 0):
        assumptions.append(f"leading level coefficient assumed positive: {lead.to_text()} > 0")
    for pos in sys.positive:
        assumptions.append(f"assumed positive: {pos.to_text()} > 0")
    return MelnikovExpansion(p, coeffs, ring, convention, assumptions)
