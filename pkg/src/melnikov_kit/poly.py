"""Sparse multivariate polynomials over exact rationals.

A :class:`ParamPoly` is a dictionary from exponent vectors to nonzero
``Fraction`` coefficients, over a fixed tuple of parameter names.  Term order
everywhere is graded lexicographic.  These polynomials carry the Hamiltonian
coefficients, perturbation parameters and normal-form data; all arithmetic is
exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rat = Union[int, Fraction]

__all__ = [
    "ParamPoly",
    "poly_gcd",
    "poly_sqrt",
    "univariate_gcd",
]


def _as_fraction(c: Rat) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


def grlex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


class ParamPoly:
    """Polynomial in named parameters with Fraction coefficients.

    Instances are immutable; arithmetic returns new objects.  Two polynomials
    can be combined only when declared over the same parameter tuple.
    """

    __slots__ = ("params", "terms", "_hash")

    def __init__(self, params: Sequence[str], terms: Mapping[tuple[int, ...], Rat] | None = None):
        self.params = tuple(params)
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            n = len(self.params)
            for exps, c in terms.items():
                c = _as_fraction(c)
                if c == 0:
                    continue
                exps = tuple(exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent vector {exps} for {self.params}")
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if clean[exps] == 0:
                    del clean[exps]
        self.terms = clean
        self._hash: int | None = None

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls, params: Sequence[str]) -> "ParamPoly":
        return cls(params, {})

    @classmethod
    def const(cls, params: Sequence[str], c: Rat) -> "ParamPoly":
        c = _as_fraction(c)
        if c == 0:
            return cls(params, {})
        return cls(params, {tuple([0] * len(params)): c})

    @classmethod
    def var(cls, params: Sequence[str], name: str, power: int = 1) -> "ParamPoly":
        params = tuple(params)
        i = params.index(name)
        exps = [0] * len(params)
        exps[i] = power
        return cls(params, {tuple(exps): Fraction(1)})

    # ------------------------------------------------------------- queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> Fraction:
        """Value as a rational; raises if non-constant."""
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"not a constant polynomial: {self}")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.params.index(name)
        return max(e[i] for e in self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=grlex_key)
        return exps, self.terms[exps]

    def coefficient_of(self, name: str, power: int) -> "ParamPoly":
        """Coefficient of ``name**power``, a polynomial in the other exponents.

        The result stays in the same parameter tuple (with zero exponent on
        ``name``).
        """
        i = self.params.index(name)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            if exps[i] == power:
                reduced = exps[:i] + (0,) + exps[i + 1:]
                out[reduced] = out.get(reduced, Fraction(0)) + c
        return ParamPoly(self.params, out)

    def variables_present(self) -> set[str]:
        out: set[str] = set()
        for exps in self.terms:
            for name, e in zip(self.params, exps):
                if e:
                    out.add(name)
        return out

    # ---------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "ParamPoly | None":
        if isinstance(other, ParamPoly):
            if other.params != self.params:
                raise ValueError(f"parameter mismatch: {self.params} vs {other.params}")
            return other
        if isinstance(other, (int, Fraction)):
            return ParamPoly.const(self.params, other)
        return None

    def __add__(self, other) -> "ParamPoly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = out.get(exps, Fraction(0)) + c
            if s == 0:
                out.pop(exps, None)
            else:
                out[exps] = s
        return ParamPoly(self.params, out)

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly(self.params, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "ParamPoly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ParamPoly":
        return -(self - other)

    def __mul__(self, other) -> "ParamPoly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.terms or not other.terms:
            return ParamPoly.zero(self.params)
        if other.is_constant():
            c = other.constant_value()
            return ParamPoly(self.params, {e: k * c for e, k in self.terms.items()})
        if self.is_constant():
            c = self.constant_value()
            return ParamPoly(self.params, {e: k * c for e, k in other.terms.items()})
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return ParamPoly(self.params, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ParamPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = ParamPoly.const(self.params, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __truediv__(self, other) -> "ParamPoly":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                raise ZeroDivisionError("division of polynomial by zero")
            return self * Fraction(1, 1) * Fraction(c.denominator, c.numerator)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ParamPoly.const(self.params, other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.params == other.params and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.params, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -------------------------------------------------------------- calculus
    def derivative(self, name: str) -> "ParamPoly":
        i = self.params.index(name)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            reduced = exps[:i] + (e - 1,) + exps[i + 1:]
            out[reduced] = out.get(reduced, Fraction(0)) + c * e
        return ParamPoly(self.params, out)

    # ------------------------------------------------------- substitution
    def substitute(self, assignment: Mapping[str, "ParamPoly | Rat"]) -> "ParamPoly":
        """Substitute polynomials or rationals for a subset of parameters."""
        polys: dict[int, ParamPoly] = {}
        for name, val in assignment.items():
            i = self.params.index(name)
            if isinstance(val, (int, Fraction)):
                val = ParamPoly.const(self.params, val)
            elif val.params != self.params:
                raise ValueError("substitution value must share the parameter tuple")
            polys[i] = val
        result = ParamPoly.zero(self.params)
        pow_cache: dict[tuple[int, int], ParamPoly] = {}
        for exps, c in self.terms.items():
            residual = list(exps)
            factor = ParamPoly.const(self.params, c)
            for i, val in polys.items():
                e = exps[i]
                if e == 0:
                    continue
                residual[i] = 0
                key = (i, e)
                if key not in pow_cache:
                    pow_cache[key] = val ** e
                factor = factor * pow_cache[key]
            factor = factor * ParamPoly(self.params, {tuple(residual): Fraction(1)})
            result = result + factor
        return result

    def evaluate(self, assignment: Mapping[str, Rat]) -> Fraction:
        """Evaluate at rational values; all present parameters must be bound."""
        idx = {name: _as_fraction(v) for name, v in assignment.items()}
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for name, e in zip(self.params, exps):
                if e == 0:
                    continue
                if name not in idx:
                    raise ValueError(f"unbound parameter {name!r} in evaluation")
                term *= idx[name] ** e
            total += term
        return total

    def extend_params(self, params: Sequence[str]) -> "ParamPoly":
        """Re-declare over a superset (or reordering) of the parameters."""
        params = tuple(params)
        mapping = []
        for name in self.params:
            if name not in params:
                raise ValueError(f"parameter {name!r} missing from target tuple")
            mapping.append(params.index(name))
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            new = [0] * len(params)
            for pos, e in zip(mapping, exps):
                new[pos] += e
            key = tuple(new)
            out[key] = out.get(key, Fraction(0)) + c
        return ParamPoly(params, out)

    # ---------------------------------------------------------- content ops
    def rational_content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive.

        Returns the signed content: the sign of the graded-lex leading
        coefficient is carried by the content so the primitive part has a
        positive leading coefficient.  Zero polynomial has content 0.
        """
        if not self.terms:
            return Fraction(0)
        from math import gcd

        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
        content = Fraction(num_gcd, den_lcm)
        _, lead = self.leading()
        if lead < 0:
            content = -content
        return content

    def primitive_part(self) -> tuple[Fraction, "ParamPoly"]:
        """Split into (content, primitive) with content * primitive == self."""
        if not self.terms:
            return Fraction(0), self
        c = self.rational_content()
        inv = Fraction(c.denominator, c.numerator)
        return c, ParamPoly(self.params, {e: k * inv for e, k in self.terms.items()})

    def monomial_content(self) -> tuple[int, ...]:
        """Componentwise minimum exponent vector over all terms."""
        if not self.terms:
            return tuple([0] * len(self.params))
        it = iter(self.terms)
        mins = list(next(it))
        for exps in it:
            for i, e in enumerate(exps):
                if e < mins[i]:
                    mins[i] = e
        return tuple(mins)

    def divide_monomial(self, exps: tuple[int, ...]) -> "ParamPoly":
        out = {}
        for e, c in self.terms.items():
            reduced = tuple(a - b for a, b in zip(e, exps))
            if any(v < 0 for v in reduced):
                raise ValueError("monomial does not divide every term")
            out[reduced] = c
        return ParamPoly(self.params, out)

    def exact_divide(self, divisor: "ParamPoly") -> "ParamPoly | None":
        """Exact multivariate division; None when the division is not exact."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if divisor.is_constant():
            c = divisor.constant_value()
            return ParamPoly(self.params, {e: k / c for e, k in self.terms.items()})
        quotient: dict[tuple[int, ...], Fraction] = {}
        rem = self
        d_exps, d_coef = divisor.leading()
        guard = 0
        while rem.terms:
            guard += 1
            if guard > 10000:
                return None
            r_exps, r_coef = rem.leading()
            q_exps = tuple(a - b for a, b in zip(r_exps, d_exps))
            if any(e < 0 for e in q_exps):
                return None
            q_coef = r_coef / d_coef
            quotient[q_exps] = quotient.get(q_exps, Fraction(0)) + q_coef
            rem = rem - divisor * ParamPoly(self.params, {q_exps: q_coef})
        return ParamPoly(self.params, quotient)

    # ------------------------------------------------------------ rendering
    def __repr__(self) -> str:
        return f"ParamPoly({self.to_text()!r})"

    def to_text(self) -> str:
        """Canonical ASCII form with graded-lex term order."""
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = []
            for name, e in zip(self.params, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


# ---------------------------------------------------------------- gcd tools

def _univariate_coeffs(p: ParamPoly, name: str) -> list[Fraction]:
    """Dense coefficient list (ascending) for a polynomial using one variable."""
    extra = p.variables_present() - {name}
    if extra:
        raise ValueError(f"polynomial is not univariate in {name!r}: uses {sorted(extra)}")
    i = p.params.index(name)
    deg = p.degree_in(name)
    coeffs = [Fraction(0)] * (deg + 1)
    for exps, c in p.terms.items():
        coeffs[exps[i]] = c
    return coeffs


def univariate_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of dense (ascending) rational coefficient lists."""

    def strip(v: list[Fraction]) -> list[Fraction]:
        while v and v[-1] == 0:
            v = v[:-1]
        return v

    def rem(u: list[Fraction], v: list[Fraction]) -> list[Fraction]:
        u = u[:]
        dv = len(v) - 1
        lead = v[-1]
        while len(u) - 1 >= dv and strip(u):
            du = len(u) - 1
            q = u[-1] / lead
            for i in range(dv + 1):
                u[du - dv + i] -= q * v[i]
            u = strip(u)
            if not u:
                break
        return u

    a, b = strip(a), strip(b)
    while b:
        a, b = b, rem(a, b)
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def poly_gcd(a: ParamPoly, b: ParamPoly) -> ParamPoly:
    """Gcd of multivariate polynomials (primitive, positive leading coeff).

    Uses content extraction plus a subresultant-style recursion on the last
    variable actually present.  Intended for the moderate sizes arising in
    coefficient elimination, not as a general-purpose gcd engine.
    """
    if a.params != b.params:
        raise ValueError("parameter mismatch in gcd")
    if a.is_zero():
        return _normalize_gcd(b)
    if b.is_zero():
        return _normalize_gcd(a)

    mono_a = a.monomial_content()
    mono_b = b.monomial_content()
    common_mono = tuple(min(x, y) for x, y in zip(mono_a, mono_b))
    a = a.divide_monomial(mono_a)
    b = b.divide_monomial(mono_b)

    used = sorted(a.variables_present() | b.variables_present())
    if not used:
        g = ParamPoly.const(a.params, 1)
    elif len(used) == 1:
        g = _gcd_univariate_case(a, b, used[0])
    else:
        g = _gcd_recursive(a, b, used[-1])
    g = g * ParamPoly(a.params, {common_mono: Fraction(1)})
    return _normalize_gcd(g)


def _normalize_gcd(p: ParamPoly) -> ParamPoly:
    if p.is_zero():
        return p
    _, prim = p.primitive_part()
    return prim


def _gcd_univariate_case(a: ParamPoly, b: ParamPoly, name: str) -> ParamPoly:
    ca = _univariate_coeffs(a, name)
    cb = _univariate_coeffs(b, name)
    g = univariate_gcd(ca, cb)
    i = a.params.index(name)
    terms = {}
    for e, c in enumerate(g):
        if c:
            exps = [0] * len(a.params)
            exps[i] = e
            terms[tuple(exps)] = c
    return ParamPoly(a.params, terms)


def _poly_as_univariate(p: ParamPoly, name: str) -> list[ParamPoly]:
    deg = max(p.degree_in(name), 0)
    return [p.coefficient_of(name, e) for e in range(deg + 1)]


def _multi_content(coeffs: list[ParamPoly]) -> ParamPoly:
    content = ParamPoly.zero(coeffs[0].params)
    for c in coeffs:
        if not c.is_zero():
            content = poly_gcd(content, c)
            if content.is_constant():
                break
    return content if not content.is_zero() else ParamPoly.const(coeffs[0].params, 1)


def _gcd_recursive(a: ParamPoly, b: ParamPoly, name: str) -> ParamPoly:
    ua = _poly_as_univariate(a, name)
    ub = _poly_as_univariate(b, name)
    while ua and ua[-1].is_zero():
        ua.pop()
    while ub and ub[-1].is_zero():
        ub.pop()
    cont_a = _multi_content(ua)
    cont_b = _multi_content(ub)
    prim_a = [c.exact_divide(cont_a) for c in ua]
    prim_b = [c.exact_divide(cont_b) for c in ub]
    if any(c is None for c in prim_a) or any(c is None for c in prim_b):
        raise ArithmeticError("content division failed in gcd recursion")
    cont = poly_gcd(cont_a, cont_b)

    var = ParamPoly.var(a.params, name)

    def rebuild(coeffs: list[ParamPoly]) -> ParamPoly:
        total = ParamPoly.zero(a.params)
        for e, c in enumerate(coeffs):
            total = total + c * var ** e
        return total

    def pseudo_rem(u: list[ParamPoly], v: list[ParamPoly]) -> list[ParamPoly]:
        u = u[:]
        dv = len(v) - 1
        lead = v[-1]
        while len(u) - 1 >= dv and any(not c.is_zero() for c in u):
            du = len(u) - 1
            top = u[-1]
            u = [c * lead for c in u]
            shift = du - dv
            for i in range(dv + 1):
                u[shift + i] = u[shift + i] - top * v[i]
            while u and u[-1].is_zero():
                u.pop()
        return u

    u, v = prim_a, prim_b
    if len(u) < len(v):
        u, v = v, u
    guard = 0
    while v:
        guard += 1
        if guard > 60:
            raise ArithmeticError("gcd pseudo-remainder sequence did not terminate")
        r = pseudo_rem(u, v)
        if not r:
            break
        rc = _multi_content(r)
        r = [c.exact_divide(rc) for c in r]
        if any(c is None for c in r):
            raise ArithmeticError("primitive part failed in gcd recursion")
        u, v = v, r
    else:
        v = u
    if v:
        g_prim = rebuild(v)
        vc = _multi_content(v)
        reduced = g_prim.exact_divide(vc)
        if reduced is not None:
            g_prim = reduced
    else:
        g_prim = ParamPoly.const(a.params, 1)
    return cont * g_prim


def poly_sqrt(p: ParamPoly) -> ParamPoly | None:
    """Exact polynomial square root, or None if ``p`` is not a square."""
    if p.is_zero():
        return p
    lead_exps, lead_coef = p.leading()
    if any(e % 2 for e in lead_exps):
        return None
    if lead_coef < 0:
        return None
    num = _isqrt_fraction(lead_coef)
    if num is None:
        return None
    half_exps = tuple(e // 2 for e in lead_exps)
    root = ParamPoly(p.params, {half_exps: num})
    rem = p - root * root
    guard = 0
    lead_term = ParamPoly(p.params, {half_exps: 2 * num})
    while not rem.is_zero():
        guard += 1
        if guard > 2000:
            return None
        r_exps, r_coef = rem.leading()
        q_exps = tuple(a - b for a, b in zip(r_exps, half_exps))
        if any(e < 0 for e in q_exps):
            return None
        q = ParamPoly(p.params, {q_exps: r_coef / (2 * num)})
        root = root + q
        rem = p - root * root
        if grlex_key(rem.leading()[0]) >= grlex_key(r_exps) if rem.terms else False:
            return None
    _ = lead_term
    return root


def _isqrt_fraction(c: Fraction) -> Fraction | None:
    from math import isqrt

    n, d = c.numerator, c.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None
