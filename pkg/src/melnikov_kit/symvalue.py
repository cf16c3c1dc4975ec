"""Sums of (exact constant) x (radical expression) terms.

Melnikov coefficients are finite sums of a :class:`GammaConst` times a
:class:`RadExpr`.  The normal form scales every constant to mantissa 1
(folding the rational into the radical expression), extracts the common
fractional prime powers of each radical part into the constant, and merges
terms whose constants agree.  Equality is structural on that normal form,
with a high-precision numeric comparison available as a fallback.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

import mpmath

from .constants import GammaConst
from .poly import ParamPoly
from .radicals import MONO_ONE, Mono, RadExpr, Ring

Rat = Union[int, Fraction]

__all__ = ["SymValue"]


class SymValue:
    """Normalized sum of GammaConst * RadExpr terms over one ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Iterable[tuple[GammaConst, RadExpr]] = ()):
        self.ring = ring
        merged: dict[tuple, tuple[GammaConst, RadExpr]] = {}
        for const, expr in terms:
            const, expr = self._normalize_term(const, expr)
            if const.is_zero() or expr.is_zero():
                continue
            key = const.structure_key()
            if key in merged:
                prev_const, prev_expr = merged[key]
                merged[key] = (prev_const, prev_expr + expr)
                if merged[key][1].is_zero():
                    del merged[key]
            else:
                merged[key] = (const, expr)
        self.terms = [merged[k] for k in sorted(merged)]

    def _normalize_term(self, const: GammaConst, expr: RadExpr) -> tuple[GammaConst, RadExpr]:
        """Canonical split: pi/Gamma factors in the constant, everything else
        (mantissa and fractional prime powers) in the radical expression."""
        if const.is_zero() or expr.is_zero():
            return const, expr
        if const.mantissa != 1:
            expr = expr * const.mantissa
        if const.primes:
            expr = expr * RadExpr._from_prime_powers(self.ring, const.primes)
        if const.mantissa != 1 or const.primes:
            const = GammaConst(1, {}, const.pi_exp, const.gammas)
        return const, expr

    # ------------------------------------------------------------- builders
    @classmethod
    def zero(cls, ring: Ring) -> "SymValue":
        return cls(ring, [])

    @classmethod
    def of(cls, value: "RadExpr | GammaConst | Rat", ring: Ring) -> "SymValue":
        if isinstance(value, RadExpr):
            return cls(ring, [(GammaConst.rational(1), value)])
        if isinstance(value, GammaConst):
            return cls(ring, [(value, ring.one())])
        return cls(ring, [(GammaConst.rational(1), RadExpr.from_rational(ring, value))])

    # ------------------------------------------------------------- algebra
    def __add__(self, other) -> "SymValue":
        if isinstance(other, SymValue):
            if other.ring is not self.ring:
                raise ValueError("SymValue terms from different rings")
            return SymValue(self.ring, list(self.terms) + list(other.terms))
        return self + SymValue.of(other, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "SymValue":
        return SymValue(self.ring, [(c, -e) for c, e in self.terms])

    def __sub__(self, other) -> "SymValue":
        if not isinstance(other, SymValue):
            other = SymValue.of(other, self.ring)
        return self + (-other)

    def __mul__(self, other) -> "SymValue":
        if isinstance(other, SymValue):
            if other.ring is not self.ring:
                raise ValueError("SymValue terms from different rings")
            out = []
            for c1, e1 in self.terms:
                for c2, e2 in other.terms:
                    out.append((c1 * c2, e1 * e2))
            return SymValue(self.ring, out)
        if isinstance(other, GammaConst):
            return SymValue(self.ring, [(c * other, e) for c, e in self.terms])
        if isinstance(other, (RadExpr, int, Fraction, ParamPoly)):
            return SymValue(self.ring, [(c, e * other) for c, e in self.terms])
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SymValue":
        if isinstance(other, GammaConst):
            return SymValue(self.ring, [(c / other, e) for c, e in self.terms])
        if isinstance(other, (RadExpr, int, Fraction)):
            if isinstance(other, (int, Fraction)):
                other = RadExpr.from_rational(self.ring, other)
            inv = other.inverse()
            return SymValue(self.ring, [(c, e * inv) for c, e in self.terms])
        if isinstance(other, SymValue):
            if len(other.terms) != 1:
                raise ValueError("can only divide by single-term values")
            c, e = other.terms[0]
            return (self / c) / e
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymValue):
            if isinstance(other, (int, Fraction)) and other == 0:
                return self.is_zero()
            other = SymValue.of(other, self.ring)
        if len(self.terms) != len(other.terms):
            return False
        for (c1, e1), (c2, e2) in zip(self.terms, other.terms):
            if c1 != c2 or e1 != e2:
                return False
        return True

    def is_zero(self) -> bool:
        return not self.terms

    # ---------------------------------------------------------- structure
    def coefficient_of(self, name: str) -> "SymValue":
        """Coefficient of a parameter appearing linearly."""
        out = []
        for const, expr in self.terms:
            if expr.den.degree_in(name) > 0:
                raise ValueError(f"{name!r} appears in a denominator")
            num = {}
            for mono, coeff in expr.num.items():
                if coeff.degree_in(name) > 1:
                    raise ValueError(f"{name!r} appears nonlinearly")
                c = coeff.coefficient_of(name, 1)
                if not c.is_zero():
                    num[mono] = c
            if num:
                out.append((const, RadExpr(self.ring, num, expr.den)))
        return SymValue(self.ring, out)

    def substitute_params(self, assignment: Mapping[str, "RadExpr | ParamPoly | Rat"]) -> "SymValue":
        return SymValue(
            self.ring,
            [(c, e.substitute_params(assignment)) for c, e in self.terms],
        )

    def used_params(self) -> set[str]:
        used: set[str] = set()
        for _, expr in self.terms:
            for coeff in expr.num.values():
                used |= coeff.variables_present()
            used |= expr.den.variables_present()
        return used

    # ----------------------------------------------------------- numerics
    def eval_mpf(self, assignment: Mapping[str, Rat] | None = None, digits: int = 50):
        assignment = assignment or {}
        with mpmath.workdps(digits + 15):
            total = mpmath.mpf(0)
            for const, expr in self.terms:
                total += const.eval_mpf(digits) * expr.eval_mpf(assignment, digits)
            return +total

    def numerically_equal(self, other: "SymValue", assignment: Mapping[str, Rat] | None = None,
                          digits: int = 50, rel_tol_exp: int = 40) -> bool:
        a = self.eval_mpf(assignment, digits)
        b = other.eval_mpf(assignment, digits)
        with mpmath.workdps(digits + 10):
            scale = max(abs(a), abs(b), mpmath.mpf(1))
            return abs(a - b) <= scale * mpmath.mpf(10) ** (-rel_tol_exp)

    def sign_certain(self) -> int | None:
        """Sign when every term agrees in sign; None when mixed or unknown."""
        if not self.terms:
            return 0
        signs = set()
        for const, expr in self.terms:
            if not expr.is_rational():
                return None
            s = const.sign() * (1 if expr.as_fraction() > 0 else -1 if expr.as_fraction() < 0 else 0)
            signs.add(s)
        if len(signs) == 1:
            return signs.pop()
        return None

    # ------------------------------------------------------------ rendering
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for const, expr in self.terms:
            ct, et = const.to_text(), expr.to_text()
            if ct == "1":
                parts.append(et)
            elif et == "1":
                parts.append(ct)
            else:
                parts.append(f"{ct} * ({et})")
        return "  +  ".join(parts)

    def __repr__(self) -> str:
        return f"SymValue({self.to_text()})"
