"""Symmetric quadratic+quartic Hamiltonians and affine transport.

The symmetric family has ``H = sum_{i+j=2,4} h_ij x^i y^j`` with singular
points pinned at (0, +-1), which forces ``h04 = -h02/2`` and ``h13 = -h11``.
This module classifies the point (0, 1), produces the elementary and
nilpotent normal forms there (explicit coefficient tables), and transports
perturbation divergences and Melnikov expansions through affine changes of
variables with time rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .melnikov import MelnikovExpansion, PipelineError
from .poly import ParamPoly
from .radicals import Ring
from .symvalue import SymValue

Rat = Union[int, Fraction]

__all__ = [
    "AffineChange",
    "NormalFormError",
    "SymmetricSystem",
    "classify_symmetric_nilpotent",
    "elementary_change",
    "elementary_normal_form",
    "nilpotent_change",
    "nilpotent_normal_form",
    "preset_change",
    "symmetric_det_A",
    "transport_divergence",
    "transport_hamiltonian",
    "transport_melnikov",
]


class NormalFormError(ValueError):
    pass


@dataclass
class SymmetricSystem:
    """Coefficients of the symmetric family; h04 and h13 are derived."""

    params: tuple[str, ...]
    h20: ParamPoly
    h11: ParamPoly
    h02: ParamPoly
    h40: ParamPoly
    h31: ParamPoly
    h22: ParamPoly

    @classmethod
    def from_values(cls, values: Mapping[str, "ParamPoly | Rat"],
                    params: Sequence[str] = ()) -> "SymmetricSystem":
        params = tuple(params)
        out = {}
        for name in ("h20", "h11", "h02", "h40", "h31", "h22"):
            v = values.get(name, 0)
            if isinstance(v, (int, Fraction)):
                v = ParamPoly.const(params, v)
            elif v.params != params:
                v = v.extend_params(params)
            out[name] = v
        return cls(params=params, **out)

    @property
    def h04(self) -> ParamPoly:
        return self.h02 * Fraction(-1, 2)

    @property
    def h13(self) -> ParamPoly:
        return -self.h11

    def hamiltonian(self, x: str = "x", y: str = "y") -> ParamPoly:
        """Flat polynomial in (x, y) and the declared parameters."""
        names = (x, y) + self.params
        table = {
            (2, 0): self.h20, (1, 1): self.h11, (0, 2): self.h02,
            (4, 0): self.h40, (3, 1): self.h31, (2, 2): self.h22,
            (1, 3): self.h13, (0, 4): self.h04,
        }
        total = ParamPoly.zero(names)
        for (i, j), coeff in table.items():
            for exps, c in coeff.terms.items():
                total = total + ParamPoly(names, {(i, j) + exps: c})
        return total

    def translated_hamiltonian(self, x: str = "x", y: str = "y") -> ParamPoly:
        """H(x, y+1) with the constant term dropped (center moved to origin)."""
        names = (x, y) + self.params
        H = self.hamiltonian(x, y)
        y_shift = ParamPoly.var(names, y) + 1
        out = H.substitute({y: y_shift})
        const = out.coefficient_of(x, 0).coefficient_of(y, 0)
        return out - const


def symmetric_det_A(sys: SymmetricSystem) -> ParamPoly:
    """det of the linearization at the translated singular point:
    -4 h11^2 - 8 h02 (h20 + h22)."""
    return sys.h11 * sys.h11 * Fraction(-4) + sys.h02 * (sys.h20 + sys.h22) * Fraction(-8)


# ------------------------------------------------------------ affine change

@dataclass
class AffineChange:
    """u = a(x-x0) + b(y-y0), v = c(x-x0) + d(y-y0), new time = k * t.

    Entries may be rationals or coefficient polynomials; the determinant and
    the rescale k must be nonzero rationals for exact transport.
    """

    params: tuple[str, ...]
    a: ParamPoly
    b: ParamPoly
    c: ParamPoly
    d: ParamPoly
    x0: ParamPoly
    y0: ParamPoly
    k: Fraction = Fraction(1)

    @classmethod
    def build(cls, params: Sequence[str], a, b, c, d, x0=0, y0=0, k=1) -> "AffineChange":
        params = tuple(params)

        def coerce(v):
            if isinstance(v, (int, Fraction)):
                return ParamPoly.const(params, v)
            if v.params != params:
                return v.extend_params(params)
            return v

        k = Fraction(k)
        if k == 0:
            raise NormalFormError("time rescale k must be nonzero")
        return cls(params, coerce(a), coerce(b), coerce(c), coerce(d),
                   coerce(x0), coerce(y0), k)

    @property
    def det(self) -> ParamPoly:
        return self.a * self.d - self.b * self.c

    def det_fraction(self) -> Fraction:
        D = self.det
        if not D.is_constant():
            raise NormalFormError(
                f"change determinant must be a nonzero rational, got {D.to_text()}"
            )
        val = D.constant_value()
        if val == 0:
            raise NormalFormError("change of variables is singular (D = 0)")
        return val

    def point_map_inverse(self, u: ParamPoly, v: ParamPoly) -> tuple[ParamPoly, ParamPoly]:
        """(x, y) as polynomials in the new coordinates (u, v share a tuple)."""
        D = self.det_fraction()
        names = u.params

        def up(p: ParamPoly) -> ParamPoly:
            return p if p.params == names else p.extend_params(names)

        x = up(self.x0) + (up(self.d) * u - up(self.b) * v) / D
        y = up(self.y0) + (-up(self.c) * u + up(self.a) * v) / D
        return x, y

    def inverse(self) -> "AffineChange":
        D = self.det_fraction()
        lin = dict(a=self.d / D, b=-self.b / D, c=-self.c / D, d=self.a / D)
        # input offset of the inverse: -(original linear map applied to (x0, y0))
        u0 = -(self.a * self.x0 + self.b * self.y0)
        v0 = -(self.c * self.x0 + self.d * self.y0)
        return AffineChange(self.params, lin["a"], lin["b"], lin["c"], lin["d"],
                            u0, v0, 1 / self.k)


def transport_hamiltonian(H: ParamPoly, ch: AffineChange, x: str = "x", y: str = "y",
                          drop_constant: bool = True) -> ParamPoly:
    """(D/k) [H(x(u,v), y(u,v)) - H(x0, y0)] in the new coordinates (named x, y)."""
    names = H.params
    u = ParamPoly.var(names, x)
    v = ParamPoly.var(names, y)
    xs, ys = ch.point_map_inverse(u, v)
    out = H.substitute({x: xs, y: ys}) * (ch.det_fraction() / ch.k)
    if drop_constant:
        const = out.coefficient_of(x, 0).coefficient_of(y, 0)
        out = out - const
    return out


def transport_divergence(div: ParamPoly, ch: AffineChange, x: str = "x", y: str = "y",
                         max_degree: int | None = 2) -> ParamPoly:
    """(1/k) div(x(u,v), y(u,v)): the divergence of the transported field.

    The chain rule makes the transported divergence exactly the substituted
    divergence scaled by 1/k, independent of how the field splits into p, q.
    """
    if max_degree is not None:
        deg = max(
            (sum(exps[div.params.index(n)] for n in (x, y) if n in div.params)
             for exps in div.terms),
            default=0,
        )
        if deg > max_degree:
            raise NormalFormError(f"divergence degree {deg} exceeds {max_degree}")
    names = div.params
    u = ParamPoly.var(names, x)
    v = ParamPoly.var(names, y)
    xs, ys = ch.point_map_inverse(u, v)
    return div.substitute({x: xs, y: ys}) / ch.k


def transport_melnikov(exp: MelnikovExpansion, ch: AffineChange) -> MelnikovExpansion:
    """Rescale b_j by sgn(k) (k/D)^((1+2j-p)/(2p)) for the moved expansion.

    For p = 1 the exponent is the integer j; for p > 1 the ratio k/D must be
    positive (its fractional powers are taken as exact prime powers).
    """
    k = ch.k
    D = ch.det_fraction()
    ratio = k / D
    p = exp.p
    sgn = 1 if k > 0 else -1
    ring = exp.ring
    out = []
    for j, b in enumerate(exp.coefficients):
        e = Fraction(1 + 2 * j - p, 2 * p)
        if e.denominator == 1:
            factor = ring.from_rational(ratio ** e.numerator)
        else:
            if ratio < 0:
                raise NormalFormError(
                    "k/D sign undecidable exponent: negative ratio with fractional power"
                )
            factor = ring.radical_root(ratio, e.denominator) ** e.numerator
        out.append(b * factor * Fraction(sgn))
    return MelnikovExpansion(p, out, ring, exp.convention,
                             exp.assumptions + [f"transport: k={k}, D={D}"])


# ------------------------------------------------- the two preset changes

def elementary_change(params: Sequence[str], h11: "ParamPoly | Rat",
                      translated: bool = False) -> AffineChange:
    """u = -(y-1), v = x - 2 h11 (y-1)   (y0 = 0 for the pre-translated form)."""
    params = tuple(params)
    h11p = h11 if isinstance(h11, ParamPoly) else ParamPoly.const(params, h11)
    if h11p.params != params:
        h11p = h11p.extend_params(params)
    y0 = 0 if translated else 1
    return AffineChange.build(params, a=0, b=-1, c=1, d=h11p * -2, x0=0, y0=y0, k=1)


def nilpotent_change(params: Sequence[str], h11: "ParamPoly | Rat",
                     translated: bool = False) -> AffineChange:
    """u = -x/2, v = h11 x + (y-1)   (y0 = 0 for the pre-translated form)."""
    params = tuple(params)
    h11p = h11 if isinstance(h11, ParamPoly) else ParamPoly.const(params, h11)
    if h11p.params != params:
        h11p = h11p.extend_params(params)
    y0 = 0 if translated else 1
    return AffineChange.build(params, a=Fraction(-1, 2), b=0, c=h11p, d=1,
                              x0=0, y0=y0, k=1)


_PRESETS = {
    "elementary-(0,1)": (elementary_change, False),
    "elementary-origin": (elementary_change, True),
    "nilpotent-(0,1)": (nilpotent_change, False),
    "nilpotent-origin": (nilpotent_change, True),
}


def preset_change(name: str, params: Sequence[str], h11) -> AffineChange:
    try:
        builder, translated = _PRESETS[name]
    except KeyError:
        raise NormalFormError(
            f"unknown preset {name!r}; available: {sorted(_PRESETS)}"
        ) from None
    return builder(params, h11, translated)


# --------------------------------------------------------- normal forms

def _require_identity(actual: ParamPoly, expected: ParamPoly, what: str) -> None:
    if actual != expected:
        raise NormalFormError(
            f"normalization not applied: expected {what}, got {actual.to_text()}"
        )


def elementary_normal_form(sys: SymmetricSystem, divergence: ParamPoly | None = None,
                           x: str = "x", y: str = "y"
                           ) -> tuple[ParamPoly, ParamPoly | None, AffineChange]:
    """Normal form at (0,1) in the elementary-center branch.

    Requires the normalization h20 + h22 = 1/2 and h02 = -h11^2 - 1/4 (the
    rescaled det(A) = 1 slice).  Returns the transported Hamiltonian with
    quadratic part (x^2+y^2)/2, the transported divergence (when given), and
    the change used.
    """
    params = sys.params
    _require_identity(sys.h20 + sys.h22, ParamPoly.const(params, Fraction(1, 2)),
                      "h20 + h22 = 1/2")
    _require_identity(sys.h02, -(sys.h11 * sys.h11) - Fraction(1, 4),
                      "h02 = -h11^2 - 1/4")
    ch = elementary_change(params, sys.h11)
    H1 = transport_hamiltonian(sys.hamiltonian(x, y), ch, x, y)
    div1 = transport_divergence(divergence, ch, x, y) if divergence is not None else None
    return H1, div1, ch


def nilpotent_normal_form(sys: SymmetricSystem, divergence: ParamPoly | None = None,
                          x: str = "x", y: str = "y"
                          ) -> tuple[ParamPoly, ParamPoly | None, ParamPoly, ParamPoly, AffineChange]:
    """Normal form at (0,1) in the nilpotent branch (det(A) = 0).

    Requires h02 = 1/2 and h22 = -h11^2 - h20; h02 = 0 would make the whole
    line of singular points collapse, which is rejected.  Returns
    (H2, div2, A, B, change) with A = 2 h20 - h11^2 and
    B = 2 h11^4 - 8 h11^2 h20 - 8 h40.
    """
    params = sys.params
    if sys.h02.is_zero():
        raise NormalFormError("non-isolated singularity: h02 = 0")
    _require_identity(sys.h02, ParamPoly.const(params, Fraction(1, 2)), "h02 = 1/2")
    _require_identity(sys.h22, -(sys.h11 * sys.h11) - sys.h20, "h22 = -h11^2 - h20")
    ch = nilpotent_change(params, sys.h11)
    H2 = transport_hamiltonian(sys.hamiltonian(x, y), ch, x, y)
    div2 = transport_divergence(divergence, ch, x, y) if divergence is not None else None
    A = sys.h20 * 2 - sys.h11 * sys.h11
    h11sq = sys.h11 * sys.h11
    B = h11sq * h11sq * 2 - h11sq * sys.h20 * 8 - sys.h40 * 8
    return H2, div2, A, B, ch


def classify_symmetric_nilpotent(sys: SymmetricSystem,
                                 numeric_params: Mapping[str, Rat] | None = None) -> str:
    """Nilpotent-branch trichotomy at (0,1) under det(A) = 0.

    Returns one of "cusp-1", "nilpotent-saddle-1", "nilpotent-center-1",
    "non-isolated".  Needs the sign of h20^2 + h40 to be decidable; raises
    with the candidate outcomes otherwise.
    """
    resonance = sys.h31 + sys.h11 * sys.h20 * 2  # h31 + 2 h11 h20
    if not _is_zero_at(resonance, numeric_params):
        return "cusp-1"
    disc = sys.h20 * sys.h20 + sys.h40  # h20^2 + h40
    if _is_zero_at(disc, numeric_params):
        return "non-isolated"
    sign = _sign_at(disc, numeric_params)
    if sign is None:
        raise NormalFormError(
            "sign of h20^2 + h40 undecidable; outcomes: nilpotent-saddle-1 (positive), "
            "nilpotent-center-1 (negative), non-isolated (zero)"
        )
    return "nilpotent-saddle-1" if sign > 0 else "nilpotent-center-1"


def _is_zero_at(p: ParamPoly, numeric: Mapping[str, Rat] | None) -> bool:
    if numeric:
        return p.evaluate(numeric) == 0
    return p.is_zero()


def _sign_at(p: ParamPoly, numeric: Mapping[str, Rat] | None) -> int | None:
    if numeric:
        v = p.evaluate(numeric)
        return 0 if v == 0 else (1 if v > 0 else -1)
    if p.is_constant():
        c = p.constant_value()
        return 0 if c == 0 else (1 if c > 0 else -1)
    return None
