"""Field arithmetic with adjoined radicals over multivariate rationals.

A :class:`Ring` fixes the parameter names and a registry of formal radicals,
each satisfying a single binomial relation ``rho**m = base`` for a primitive
integer-coefficient :class:`ParamPoly` base.  Rational radicands never create
symbols: they are carried exactly as fractional prime powers attached to each
monomial (``2**(1/2)`` and friends).

A :class:`RadExpr` is a quotient ``num / den`` where ``num`` maps radical
monomials to ``ParamPoly`` coefficients and ``den`` is always radical-free.
Division rationalizes the denominator, so zero testing and equality reduce to
dictionary comparison of cross-multiplied normal forms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence, Union

from .constants import rational_prime_powers
from .poly import ParamPoly

Rat = Union[int, Fraction]

__all__ = ["Ring", "Radical", "RadExpr"]

PrimePart = tuple[tuple[int, Fraction], ...]
RadPart = tuple[int, ...]
Mono = tuple[PrimePart, RadPart]

MONO_ONE: Mono = ((), ())


class Radical:
    """Formal m-th root of a primitive polynomial base."""

    __slots__ = ("name", "index", "base", "assume_positive")

    def __init__(self, name: str, index: int, base: ParamPoly, assume_positive: bool = True):
        if index < 2:
            raise ValueError("radical index must be at least 2")
        self.name = name
        self.index = index
        self.base = base
        self.assume_positive = assume_positive

    def __repr__(self) -> str:
        return f"Radical({self.name} = ({self.base.to_text()})^(1/{self.index}))"


class Ring:
    """Parameter context plus radical registry shared by RadExpr values."""

    def __init__(self, params: Sequence[str]):
        self.params = tuple(params)
        self.radicals: list[Radical] = []

    # polynomial helpers bound to this ring's parameter tuple
    def poly(self, terms=None) -> ParamPoly:
        return ParamPoly(self.params, terms or {})

    def const(self, c: Rat) -> ParamPoly:
        return ParamPoly.const(self.params, c)

    def var(self, name: str, power: int = 1) -> ParamPoly:
        return ParamPoly.var(self.params, name, power)

    def zero(self) -> "RadExpr":
        return RadExpr(self, {})

    def one(self) -> "RadExpr":
        return RadExpr.from_rational(self, 1)

    def from_poly(self, p: ParamPoly) -> "RadExpr":
        if p.params != self.params:
            p = p.extend_params(self.params)
        return RadExpr(self, {MONO_ONE: p} if not p.is_zero() else {})

    def expr_var(self, name: str) -> "RadExpr":
        return self.from_poly(self.var(name))

    def from_rational(self, c: Rat) -> "RadExpr":
        return RadExpr.from_rational(self, c)

    # ----------------------------------------------------------- radicals
    def adjoin_radical(self, base: ParamPoly, index: int, assume_positive: bool = True) -> int:
        """Intern a radical for ``base**(1/index)``; returns its position.

        The base must already be integer-primitive with a positive leading
        coefficient.  Re-adjoining with a compatible index reuses the symbol.
        """
        for i, rad in enumerate(self.radicals):
            if rad.base == base:
                if rad.index == index:
                    return i
                raise ValueError(
                    f"radical base {base.to_text()} already adjoined with index "
                    f"{rad.index}; cannot re-adjoin with index {index}"
                )
        name = f"rt{index}_{len(self.radicals)}"
        self.radicals.append(Radical(name, index, base, assume_positive))
        return len(self.radicals) - 1

    def radical_root(self, value: "RadExpr | ParamPoly | Rat", index: int,
                     assume_positive: bool = True) -> "RadExpr":
        """Exact ``value**(1/index)`` for suitable values.

        Rationals factor into prime powers; polynomials split into rational
        content times a primitive part, which is adjoined as a fresh radical
        symbol (or reuses an existing one).  Quotients take roots of numerator
        and denominator separately; single radical monomials with exponents
        divisible by ``index`` reduce without new symbols.
        """
        if isinstance(value, (int, Fraction)):
            return self._rational_root(Fraction(value), index)
        if isinstance(value, ParamPoly):
            return self._poly_root(value, index, assume_positive)
        assert isinstance(value, RadExpr)
        if value.is_zero():
            return self.zero()
        num_root = self._radpoly_root(value.num, index, assume_positive)
        if value.den.is_constant() and value.den.constant_value() == 1:
            return num_root
        den_root = self._poly_root(value.den, index, assume_positive)
        return num_root / den_root

    def _rational_root(self, c: Fraction, index: int) -> "RadExpr":
        if c == 0:
            return self.zero()
        if c < 0:
            raise ValueError("radical of a negative rational")
        primes = {p: Fraction(e, index) for p, e in rational_prime_powers(c).items()}
        return RadExpr._from_prime_powers(self, primes)

    def _poly_root(self, p: ParamPoly, index: int, assume_positive: bool) -> "RadExpr":
        if p.is_zero():
            return self.zero()
        if p.params != self.params:
            p = p.extend_params(self.params)
        if p.is_constant():
            return self._rational_root(p.constant_value(), index)
        # unsigned content: the primitive base keeps the sign of its value
        content, prim = p.primitive_part()
        if content < 0:
            content, prim = -content, -prim
        root = self._rational_root(content, index)
        pos = self.adjoin_radical(prim, index, assume_positive)
        rads = [0] * (pos + 1)
        rads[pos] = 1
        mono: Mono = ((), tuple(rads))
        return root * RadExpr(self, {mono: self.const(1)})

    def _radpoly_root(self, num: dict[Mono, ParamPoly], index: int,
                      assume_positive: bool) -> "RadExpr":
        if len(num) != 1:
            raise ValueError("radical of a multi-term radical expression is not supported")
        (mono, coeff), = num.items()
        primes, rads = mono
        new_primes = {p: e / index for p, e in primes}
        out = RadExpr._from_prime_powers(self, new_primes)
        for i, e in enumerate(rads):
            if e == 0:
                continue
            rad = self.radicals[i]
            total = Fraction(e, rad.index) / index  # exponent of base
            if total.denominator == 1:
                out = out * self.from_poly(rad.base ** total.numerator)
            elif (Fraction(rad.index) * total).denominator == 1:
                k = int(Fraction(rad.index) * total)
                rads2 = [0] * (i + 1)
                rads2[i] = k % rad.index
                out = out * RadExpr(self, {((), tuple(rads2)): self.const(1)})
                out = out * self.from_poly(rad.base ** (k // rad.index))
            else:
                raise ValueError("incompatible radical index in nested root")
        return out * self._poly_root(coeff, index, assume_positive)

    # ------------------------------------------------------------ monomials
    def mono_mul(self, m1: Mono, m2: Mono) -> tuple[Fraction, ParamPoly | None, Mono]:
        """Combine monomials, reducing prime and radical exponents.

        Returns (rational factor, optional polynomial factor from radical
        relations, reduced monomial).
        """
        primes1, rads1 = m1
        primes2, rads2 = m2
        factor = Fraction(1)
        primes: dict[int, Fraction] = dict(primes1)
        for p, e in primes2:
            primes[p] = primes.get(p, Fraction(0)) + e
        clean_primes = []
        for p in sorted(primes):
            e = primes[p]
            k = e.numerator // e.denominator
            frac = e - k
            if k:
                factor *= Fraction(p) ** k
            if frac:
                clean_primes.append((p, frac))
        n = max(len(rads1), len(rads2))
        rads = [0] * n
        poly_factor: ParamPoly | None = None
        for i in range(n):
            e = (rads1[i] if i < len(rads1) else 0) + (rads2[i] if i < len(rads2) else 0)
            if e and i < len(self.radicals):
                m = self.radicals[i].index
                if e >= m:
                    power = e // m
                    e %= m
                    extra = self.radicals[i].base ** power
                    poly_factor = extra if poly_factor is None else poly_factor * extra
            rads[i] = e
        while rads and rads[-1] == 0:
            rads.pop()
        return factor, poly_factor, (tuple(clean_primes), tuple(rads))

    def mono_text(self, mono: Mono) -> str:
        primes, rads = mono
        parts = [f"{p}^({e})" for p, e in primes]
        for i, e in enumerate(rads):
            if e:
                rad = self.radicals[i]
                parts.append(f"({rad.base.to_text()})^({Fraction(e, rad.index)})")
        return "*".join(parts) if parts else "1"


class RadExpr:
    """Element of the radical extension field; see module docstring."""

    __slots__ = ("ring", "num", "den", "_hash")

    def __init__(self, ring: Ring, num: Mapping[Mono, ParamPoly], den: ParamPoly | None = None):
        self.ring = ring
        if den is None:
            den = ring.const(1)
        clean: dict[Mono, ParamPoly] = {}
        for mono, coeff in num.items():
            if coeff.is_zero():
                continue
            if mono in clean:
                coeff = clean[mono] + coeff
            if coeff.is_zero():
                clean.pop(mono, None)
            else:
                clean[mono] = coeff
        if den.is_zero():
            raise ZeroDivisionError("RadExpr denominator is zero")
        self.num = clean
        self.den = den
        self._hash: int | None = None
        self._simplify()

    # ------------------------------------------------------------- builders
    @classmethod
    def from_rational(cls, ring: Ring, c: Rat) -> "RadExpr":
        c = Fraction(c)
        if c == 0:
            return cls(ring, {})
        return cls(ring, {MONO_ONE: ring.const(c)})

    @classmethod
    def _from_prime_powers(cls, ring: Ring, primes: Mapping[int, Fraction]) -> "RadExpr":
        factor = Fraction(1)
        clean = []
        for p in sorted(primes):
            e = primes[p]
            if not e:
                continue
            k = e.numerator // e.denominator
            frac = e - k
            if k:
                factor *= Fraction(p) ** k
            if frac:
                clean.append((p, frac))
        mono: Mono = (tuple(clean), ())
        return cls(ring, {mono: ring.const(factor)})

    # ----------------------------------------------------------- inspection
    def is_zero(self) -> bool:
        return not self.num

    def is_rational(self) -> bool:
        if not self.num:
            return True
        if set(self.num) != {MONO_ONE}:
            return False
        return self.num[MONO_ONE].is_constant() and self.den.is_constant()

    def as_fraction(self) -> Fraction:
        if not self.num:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"not a rational value: {self}")
        return self.num[MONO_ONE].constant_value() / self.den.constant_value()

    def is_radical_free(self) -> bool:
        return all(m == MONO_ONE for m in self.num)

    def as_param_poly(self) -> ParamPoly:
        """The value as a plain polynomial; denominator must be rational."""
        if not self.is_radical_free():
            raise ValueError("expression contains radicals")
        if not self.den.is_constant():
            raise ValueError("expression has a polynomial denominator")
        if not self.num:
            return self.ring.poly()
        return self.num[MONO_ONE] / self.den.constant_value()

    def numerator_parts(self) -> list[tuple[Mono, ParamPoly]]:
        return sorted(self.num.items(), key=lambda kv: kv[0])

    # -------------------------------------------------------- normalization
    def _simplify(self) -> None:
        if not self.num:
            self.den = self.ring.const(1)
            return
        den = self.den
        # rational content of the denominator folds into the numerator
        content, prim = den.primitive_part()
        if content != 1:
            inv = Fraction(content.denominator, content.numerator)
            self.num = {m: c * inv for m, c in self.num.items()}
            den = prim
        if not den.is_constant():
            # exact cancellation of the full denominator
            divided = {}
            for m, c in self.num.items():
                q = c.exact_divide(den)
                if q is None:
                    divided = None
                    break
                divided[m] = q
            if divided is not None:
                self.num = divided
                den = self.ring.const(1)
            else:
                # cancel powers of known radical bases (the usual culprits)
                for rad in self.ring.radicals:
                    while True:
                        dq = den.exact_divide(rad.base)
                        if dq is None or dq.is_zero():
                            break
                        nq = {}
                        ok = True
                        for m, c in self.num.items():
                            q = c.exact_divide(rad.base)
                            if q is None:
                                ok = False
                                break
                            nq[m] = q
                        if not ok:
                            break
                        self.num = nq
                        den = dq
        self.den = den

    # ------------------------------------------------------------- algebra
    def _used_radicals(self) -> int:
        """1 + highest radical position referenced (0 when radical-free)."""
        n = 0
        for _, rads in self.num:
            for i, e in enumerate(rads):
                if e and i + 1 > n:
                    n = i + 1
        return n

    def _coerce(self, other) -> "RadExpr | None":
        if isinstance(other, RadExpr):
            if other.ring is not self.ring:
                if other.ring.params != self.ring.params:
                    raise ValueError("RadExpr values from different rings")
                # same parameters: allow when every referenced radical agrees
                need = max(self._used_radicals(), other._used_radicals())
                ra, rb = self.ring.radicals, other.ring.radicals
                if need > len(ra) or need > len(rb) or any(
                    ra[i].index != rb[i].index or ra[i].base != rb[i].base
                    for i in range(need)
                ):
                    raise ValueError(
                        "RadExpr values from rings with incompatible radicals"
                    )
            return other
        if isinstance(other, (int, Fraction)):
            return RadExpr.from_rational(self.ring, other)
        if isinstance(other, ParamPoly):
            return self.ring.from_poly(other)
        return None

    def __add__(self, other) -> "RadExpr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            num = dict(self.num)
            for m, c in other.num.items():
                s = num.get(m)
                num[m] = c if s is None else s + c
            return RadExpr(self.ring, num, self.den)
        num: dict[Mono, ParamPoly] = {}
        for m, c in self.num.items():
            num[m] = c * other.den
        for m, c in other.num.items():
            s = num.get(m)
            t = c * self.den
            num[m] = t if s is None else s + t
        return RadExpr(self.ring, num, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RadExpr":
        return RadExpr(self.ring, {m: -c for m, c in self.num.items()}, self.den)

    def __sub__(self, other) -> "RadExpr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RadExpr":
        return -(self - other)

    def __mul__(self, other) -> "RadExpr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.ring.zero()
        num: dict[Mono, ParamPoly] = {}
        for m1, c1 in self.num.items():
            for m2, c2 in other.num.items():
                factor, polyf, mono = self.ring.mono_mul(m1, m2)
                c = c1 * c2
                if factor != 1:
                    c = c * factor
                if polyf is not None:
                    c = c * polyf
                s = num.get(mono)
                num[mono] = c if s is None else s + c
        return RadExpr(self.ring, num, self.den * other.den)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RadExpr":
        if not isinstance(n, int):
            raise TypeError("integer powers only; use Ring.radical_root for roots")
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def inverse(self) -> "RadExpr":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        multiplier, cleared = _rationalize(self.ring, self.num)
        # 1/self = den * multiplier / cleared
        num: dict[Mono, ParamPoly] = {}
        for m, c in multiplier.items():
            num[m] = c * self.den
        return RadExpr(self.ring, num, cleared)

    def __truediv__(self, other) -> "RadExpr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RadExpr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        left = {}
        for m, c in self.num.items():
            left[m] = c * other.den
        right = {}
        for m, c in other.num.items():
            right[m] = c * self.den
        return left == right

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.as_fraction())
            else:
                self._hash = hash(
                    (frozenset((m, c) for m, c in self.num.items()), self.den)
                )
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -------------------------------------------------------- substitution
    def substitute_params(self, assignment: Mapping[str, "RadExpr | ParamPoly | Rat"]) -> "RadExpr":
        """Substitute values for parameters throughout the expression.

        Radical symbols whose base involves a substituted parameter are
        re-rooted on the substituted base (the positive branch is kept, per
        the adjunction's positivity assumption).
        """
        coerced: dict[str, RadExpr] = {}
        for name, v in assignment.items():
            vv = self._coerce(v)
            if vv is None:
                raise TypeError(f"bad substitution value for {name!r}")
            coerced[name] = vv

        def subst_poly(p: ParamPoly) -> RadExpr:
            total = self.ring.zero()
            pow_cache: dict[tuple[str, int], RadExpr] = {}
            for exps, c in p.terms.items():
                term = RadExpr.from_rational(self.ring, c)
                residual = [0] * len(p.params)
                for i, (name, e) in enumerate(zip(p.params, exps)):
                    if e == 0:
                        continue
                    if name in coerced:
                        key = (name, e)
                        if key not in pow_cache:
                            pow_cache[key] = coerced[name] ** e
                        term = term * pow_cache[key]
                    else:
                        residual[i] = e
                term = term * self.ring.from_poly(self.ring.poly({tuple(residual): Fraction(1)}))
                total = total + term
            return total

        # radicals whose base mentions a substituted parameter get re-rooted
        rad_map: dict[int, RadExpr] = {}
        used_radicals = set()
        for _, rads in self.num:
            for i, e in enumerate(rads):
                if e:
                    used_radicals.add(i)
        for i in used_radicals:
            rad = self.ring.radicals[i]
            if rad.base.variables_present() & set(assignment):
                new_base = subst_poly(rad.base)
                rad_map[i] = self.ring.radical_root(new_base, rad.index,
                                                    rad.assume_positive)

        total = self.ring.zero()
        for (primes, rads), coeff in self.num.items():
            if any(e and i in rad_map for i, e in enumerate(rads)):
                plain = tuple(0 if i in rad_map else e for i, e in enumerate(rads))
                while plain and plain[-1] == 0:
                    plain = plain[:-1]
                mono_part = RadExpr(self.ring, {(primes, plain): self.ring.const(1)})
                for i, e in enumerate(rads):
                    if e and i in rad_map:
                        mono_part = mono_part * rad_map[i] ** e
            else:
                mono_part = RadExpr(self.ring, {(primes, rads): self.ring.const(1)})
            total = total + mono_part * subst_poly(coeff)
        return total / subst_poly(self.den)

    # ----------------------------------------------------------- numerics
    def eval_mpf(self, assignment: Mapping[str, Rat], digits: int = 50):
        """High-precision numeric value at rational parameter values."""
        import mpmath

        with mpmath.workdps(digits + 15):
            def frac(v: Fraction):
                return mpmath.mpf(v.numerator) / v.denominator

            values = {k: Fraction(v) for k, v in assignment.items()}
            rad_vals = []
            for rad in self.ring.radicals:
                base_val = frac(rad.base.evaluate(values))
                if base_val <= 0:
                    raise ValueError(
                        f"radical base {rad.base.to_text()} is not positive at the "
                        "given parameter values"
                    )
                rad_vals.append(mpmath.power(base_val, mpmath.mpf(1) / rad.index))

            def mono_val(mono: Mono):
                primes, rads = mono
                v = mpmath.mpf(1)
                for p, e in primes:
                    v *= mpmath.power(p, frac(e))
                for i, e in enumerate(rads):
                    if e:
                        v *= rad_vals[i] ** e
                return v

            total = mpmath.mpf(0)
            for mono, coeff in self.num.items():
                total += mono_val(mono) * frac(coeff.evaluate(values))
            total /= frac(self.den.evaluate(values))
            return +total

    # ------------------------------------------------------------ rendering
    def to_text(self) -> str:
        if not self.num:
            return "0"
        parts = []
        for mono, coeff in self.numerator_parts():
            mono_txt = self.ring.mono_text(mono)
            coeff_txt = coeff.to_text()
            if mono_txt == "1":
                parts.append(coeff_txt)
            elif coeff_txt == "1":
                parts.append(mono_txt)
            else:
                parts.append(f"({coeff_txt})*{mono_txt}")
        text = " + ".join(parts)
        if not (self.den.is_constant() and self.den.constant_value() == 1):
            text = f"({text}) / ({self.den.to_text()})"
        return text

    def __repr__(self) -> str:
        return f"RadExpr({self.to_text()})"


# ---------------------------------------------------------- rationalization

def _rationalize(ring: Ring, num: dict[Mono, ParamPoly]) -> tuple[dict[Mono, ParamPoly], ParamPoly]:
    """Find M with num * M radical-free; returns (M, num * M as ParamPoly)."""
    current = dict(num)
    multiplier = {MONO_ONE: ring.const(1)}
    guard = 0
    while not (len(current) == 1 and MONO_ONE in current):
        guard += 1
        if guard > 64:
            raise ArithmeticError("rationalization did not terminate")
        if len(current) == 1:
            conj = {_complement_mono(ring, next(iter(current))): ring.const(1)}
        else:
            target = _pick_irrational(ring, current)
            if target is None:
                raise ArithmeticError("rationalization stalled on a radical-free sum")
            conj = _parity_conjugate(ring, current, target)
        multiplier = _radpoly_mul(ring, multiplier, conj)
        current = _radpoly_mul(ring, current, conj)
        if not current:
            raise ArithmeticError("zero divisor met during rationalization")
    return multiplier, current[MONO_ONE]


def _complement_mono(ring: Ring, mono: Mono) -> Mono:
    """Monomial whose product with ``mono`` has no irrational part."""
    primes, rads = mono
    comp_primes = tuple((p, 1 - e) for p, e in primes)
    comp_rads = tuple(
        (ring.radicals[i].index - e) if e else 0 for i, e in enumerate(rads)
    )
    while comp_rads and comp_rads[-1] == 0:
        comp_rads = comp_rads[:-1]
    return (comp_primes, comp_rads)


def _pick_irrational(ring: Ring, num: dict[Mono, ParamPoly]):
    """Select an irrational factor still present: (kind, key, denominator)."""
    for mono in num:
        primes, rads = mono
        for p, e in primes:
            return ("prime", p, e.denominator)
        for i, e in enumerate(rads):
            if e:
                return ("radical", i, ring.radicals[i].index)
    return None


def _parity_conjugate(ring: Ring, num: dict[Mono, ParamPoly], target) -> dict[Mono, ParamPoly]:
    """Conjugate cancelling the finest dyadic layer of one irrational factor.

    With integer-scaled exponents k (denominator d) and v the least 2-adic
    valuation over the nonzero k, negating terms with odd k >> v makes every
    exponent in the product divisible by 2^(v+1).  Iterating clears the
    factor when d is a power of two; odd indices are rejected.
    """
    kind, key, d = target
    ks: list[int] = []
    for mono in num:
        primes, rads = mono
        if kind == "prime":
            e = next((pe for p, pe in primes if p == key), Fraction(0))
            scaled = e * d
        else:
            e = rads[key] if key < len(rads) else 0
            scaled = Fraction(e)
        if scaled.denominator != 1:
            raise ArithmeticError("mixed radical denominators in rationalization")
        ks.append(scaled.numerator)
    nonzero = [k for k in ks if k]
    if d % 2:
        raise ArithmeticError("cannot rationalize radicals of odd index")
    v = min(_v2(k) for k in nonzero)
    out = {}
    for (mono, coeff), k in zip(num.items(), ks):
        flip = (k >> v) & 1
        out[mono] = -coeff if flip else coeff
    return out


def _v2(k: int) -> int:
    v = 0
    while k % 2 == 0:
        k //= 2
        v += 1
    return v


def _radpoly_mul(ring: Ring, a: dict[Mono, ParamPoly], b: dict[Mono, ParamPoly]) -> dict[Mono, ParamPoly]:
    out: dict[Mono, ParamPoly] = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            factor, polyf, mono = ring.mono_mul(m1, m2)
            c = c1 * c2
            if factor != 1:
                c = c * factor
            if polyf is not None:
                c = c * polyf
            s = out.get(mono)
            out[mono] = c if s is None else s + c
    return {m: c for m, c in out.items() if not c.is_zero()}
