"""Truncated power series with RadExpr coefficients.

A :class:`TruncSeries` stores coefficients for powers 0 .. N-1 of one formal
variable together with the truncation order N, meaning the value is known
modulo O(var**N).  Binary operations truncate pessimistically to the smaller
operand order.  Composition requires the inner series to vanish at 0;
reversion additionally needs an invertible linear coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence, Union

from .poly import ParamPoly
from .radicals import RadExpr, Ring

Rat = Union[int, Fraction]

__all__ = ["TruncSeries"]


class TruncSeries:
    __slots__ = ("ring", "var", "coeffs", "order")

    def __init__(self, ring: Ring, var: str, coeffs: Sequence[RadExpr], order: int):
        if order < 1:
            raise ValueError("truncation order must be positive")
        if len(coeffs) > order:
            coeffs = list(coeffs)[:order]
        cs = [self._coerce_coeff(ring, c) for c in coeffs]
        while len(cs) < order:
            cs.append(ring.zero())
        self.ring = ring
        self.var = var
        self.coeffs = cs
        self.order = order

    @staticmethod
    def _coerce_coeff(ring: Ring, c) -> RadExpr:
        if isinstance(c, RadExpr):
            return c
        if isinstance(c, (int, Fraction)):
            return RadExpr.from_rational(ring, c)
        if isinstance(c, ParamPoly):
            return ring.from_poly(c)
        raise TypeError(f"bad series coefficient type {type(c).__name__}")

    # ------------------------------------------------------------- builders
    @classmethod
    def zero(cls, ring: Ring, var: str, order: int) -> "TruncSeries":
        return cls(ring, var, [], order)

    @classmethod
    def const(cls, ring: Ring, var: str, c, order: int) -> "TruncSeries":
        return cls(ring, var, [cls._coerce_coeff(ring, c)], order)

    @classmethod
    def identity(cls, ring: Ring, var: str, order: int) -> "TruncSeries":
        return cls(ring, var, [ring.zero(), ring.one()], order)

    # -------------------------------------------------------------- queries
    def __getitem__(self, k: int) -> RadExpr:
        if k >= self.order:
            raise IndexError(f"coefficient {k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def valuation(self) -> int:
        """Index of the first nonzero known coefficient (= order if none)."""
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        return self.order

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def truncate(self, order: int) -> "TruncSeries":
        if order >= self.order:
            return self
        return TruncSeries(self.ring, self.var, self.coeffs[:order], order)

    def map_coeffs(self, fn: Callable[[RadExpr], RadExpr]) -> "TruncSeries":
        return TruncSeries(self.ring, self.var, [fn(c) for c in self.coeffs], self.order)

    # ----------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "TruncSeries | None":
        if isinstance(other, TruncSeries):
            if other.ring is not self.ring or other.var != self.var:
                raise ValueError("series over different rings or variables")
            return other
        if isinstance(other, (int, Fraction, ParamPoly, RadExpr)):
            return TruncSeries.const(self.ring, self.var, other, self.order)
        return None

    def __add__(self, other) -> "TruncSeries":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return TruncSeries(
            self.ring, self.var,
            [self.coeffs[k] + other.coeffs[k] for k in range(n)], n,
        )

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        return self.map_coeffs(lambda c: -c)

    def __sub__(self, other) -> "TruncSeries":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "TruncSeries":
        return -(self - other)

    def __mul__(self, other) -> "TruncSeries":
        if isinstance(other, (int, Fraction, ParamPoly, RadExpr)):
            c = self._coerce_coeff(self.ring, other)
            return self.map_coeffs(lambda k: k * c)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        out = [self.ring.zero() for _ in range(n)]
        for i, a in enumerate(self.coeffs[:n]):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs[: n - i]):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b
        return TruncSeries(self.ring, self.var, out, n)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TruncSeries":
        if not isinstance(n, int) or n < 0:
            raise ValueError("series powers take non-negative integers")
        out = TruncSeries.const(self.ring, self.var, 1, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __truediv__(self, other) -> "TruncSeries":
        if isinstance(other, (int, Fraction, ParamPoly, RadExpr)):
            c = self._coerce_coeff(self.ring, other)
            inv = c.inverse()
            return self.map_coeffs(lambda k: k * inv)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.reciprocal()

    def reciprocal(self) -> "TruncSeries":
        """Multiplicative inverse; requires an invertible constant term."""
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise ValueError("series with zero constant term has no reciprocal")
        inv0 = c0.inverse()
        n = self.order
        out = [self.ring.zero() for _ in range(n)]
        out[0] = inv0
        for k in range(1, n):
            acc = self.ring.zero()
            for j in range(1, k + 1):
                if not self.coeffs[j].is_zero() and not out[k - j].is_zero():
                    acc = acc + self.coeffs[j] * out[k - j]
            out[k] = -(inv0 * acc)
        return TruncSeries(self.ring, self.var, out, n)

    # -------------------------------------------------------------- calculus
    def derivative(self) -> "TruncSeries":
        n = self.order - 1
        if n < 1:
            n = 1
        out = [self.coeffs[k] * k for k in range(1, min(self.order, n + 1))]
        return TruncSeries(self.ring, self.var, out, n)

    def shift_up(self, k: int = 1) -> "TruncSeries":
        """Multiply by var**k (order grows with the shift)."""
        return TruncSeries(
            self.ring, self.var, [self.ring.zero()] * k + self.coeffs, self.order + k
        )

    def shift_down(self, k: int = 1) -> "TruncSeries":
        """Divide by var**k; the low coefficients must vanish."""
        if any(not c.is_zero() for c in self.coeffs[:k]):
            raise ValueError(f"series is not divisible by {self.var}^{k}")
        return TruncSeries(self.ring, self.var, self.coeffs[k:], self.order - k)

    def rename(self, var: str) -> "TruncSeries":
        return TruncSeries(self.ring, var, self.coeffs, self.order)

    # ------------------------------------------------------------ composition
    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner(t)); the inner series must have zero constant term."""
        if inner.ring is not self.ring:
            raise ValueError("composition across rings")
        if not inner.coeffs[0].is_zero():
            raise ValueError("composition requires inner series with zero constant term")
        n = min(self.order, inner.order)
        result = TruncSeries.const(self.ring, inner.var, self.coeffs[min(n, self.order) - 1], n)
        for k in range(n - 2, -1, -1):
            result = result * inner.truncate(n)
            result = result + TruncSeries.const(self.ring, inner.var, self.coeffs[k], n)
        return result

    def reversion(self) -> "TruncSeries":
        """Series g with self(g(u)) = u + O(u**N).

        Requires zero constant term and invertible linear coefficient; a
        triangular solve determines the coefficients one order at a time.
        """
        if not self.coeffs[0].is_zero():
            raise ValueError("reversion undefined: nonzero constant term")
        s1 = self.coeffs[1]
        if s1.is_zero():
            raise ValueError("reversion undefined: zero linear coefficient")
        n = self.order
        inv1 = s1.inverse()
        g = [self.ring.zero(), inv1] + [self.ring.zero()] * (n - 2)
        # maintain powers of g modulo u**n, rebuilt incrementally per order
        for m in range(2, n):
            partial = TruncSeries(self.ring, self.var, g[:m], m + 1)
            value = self.truncate(m + 1).compose(partial)
            defect = value.coeffs[m]
            g[m] = -(defect * inv1)
        return TruncSeries(self.ring, self.var, g, n)

    # --------------------------------------------------- roots and powers
    def fractional_power(self, num: int, den: int) -> "TruncSeries":
        """Series for self**(num/den); the constant term must be invertible.

        The constant term's root is taken exactly (adjoining a radical when
        necessary); the rest uses the binomial series.
        """
        if den <= 0:
            raise ValueError("denominator of the exponent must be positive")
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise ValueError("fractional power needs a nonzero constant term")
        alpha = Fraction(num, den)
        root = self.ring.radical_root(c0, alpha.denominator)
        head = root ** alpha.numerator
        z = (self / c0) - 1
        n = self.order
        out = TruncSeries.const(self.ring, self.var, 1, n)
        term = TruncSeries.const(self.ring, self.var, 1, n)
        coef = Fraction(1)
        for k in range(1, n):
            coef = coef * (alpha - (k - 1)) / k
            term = term * z
            if term.is_zero():
                break
            out = out + term * coef
        return out * head

    def sqrt(self) -> "TruncSeries":
        return self.fractional_power(1, 2)

    def reciprocal_sqrt(self) -> "TruncSeries":
        """Series t with t*t*self = 1 + O(var**N)."""
        if self.coeffs[0].is_zero():
            raise ValueError("series not invertible under sqrt")
        return self.fractional_power(-1, 2)

    # ------------------------------------------------------------ rendering
    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self.coeffs[k] == other.coeffs[k] for k in range(n))

    def to_text(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if k == 0:
                parts.append(f"({c.to_text()})")
            elif k == 1:
                parts.append(f"({c.to_text()})*{self.var}")
            else:
                parts.append(f"({c.to_text()})*{self.var}^{k}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O({self.var}^{self.order})"

    def __repr__(self) -> str:
        return f"TruncSeries({self.to_text()})"
