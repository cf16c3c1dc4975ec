"""Exact real-root isolation and rational interval arithmetic.

Univariate polynomials are dense ascending ``Fraction`` coefficient lists.
Root isolation uses Sturm sequences on the squarefree part, with Yun's
decomposition supplying multiplicities; intervals are refinable to any width
by sign bisection.  :class:`RatInterval` provides outward-exact interval
arithmetic over rationals, including enclosures of m-th roots computed by
pure rational bisection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .poly import ParamPoly, univariate_gcd

Rat = Union[int, Fraction]

__all__ = [
    "RatInterval",
    "RootRecord",
    "interval_nth_root",
    "isolate_real_roots",
    "poly_interval_eval",
    "refine_root",
    "sturm_chain",
    "sturm_count",
]


# ----------------------------------------------------------- dense helpers

def strip(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c = c[:-1]
    return c


def poly_eval(c: Sequence[Fraction], x: Fraction) -> Fraction:
    total = Fraction(0)
    for coef in reversed(c):
        total = total * x + coef
    return total


def poly_derivative(c: Sequence[Fraction]) -> list[Fraction]:
    return [c[k] * k for k in range(1, len(c))]


def poly_divmod(u: Sequence[Fraction], v: Sequence[Fraction]):
    u = list(u)
    v = strip(list(v))
    if not v:
        raise ZeroDivisionError("polynomial division by zero")
    dv = len(v) - 1
    lead = v[-1]
    q = [Fraction(0)] * max(len(u) - dv, 0)
    while len(strip(u)) - 1 >= dv:
        u = strip(u)
        du = len(u) - 1
        f = u[-1] / lead
        q[du - dv] = f
        for i in range(dv + 1):
            u[du - dv + i] -= f * v[i]
        u = u[:-1] if u and u[-1] == 0 else u
        u = strip(u)
        if not u:
            break
    return strip(q), strip(list(u))


def from_param_poly(p: ParamPoly, name: str | None = None) -> list[Fraction]:
    """Dense coefficients of a univariate polynomial."""
    used = sorted(p.variables_present())
    if name is None:
        if len(used) > 1:
            raise ValueError(f"polynomial uses several variables: {used}")
        name = used[0] if used else (p.params[0] if p.params else None)
    if name is None:
        return [p.constant_value()] if not p.is_zero() else []
    i = p.params.index(name)
    deg = max(p.degree_in(name), 0)
    out = [Fraction(0)] * (deg + 1)
    for exps, c in p.terms.items():
        others = sum(exps) - exps[i]
        if others:
            raise ValueError("polynomial is not univariate")
        out[exps[i]] += c
    return strip(out)


# ------------------------------------------------------------------ Sturm

def sturm_chain(c: Sequence[Fraction]) -> list[list[Fraction]]:
    f = strip(list(c))
    if not f:
        raise ValueError("zero polynomial has no Sturm chain")
    chain = [f, strip(poly_derivative(f))]
    while chain[-1]:
        _, r = poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-x for x in r])
    return [p for p in chain if p]


def _variations(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(chain, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi]."""
    return _variations(chain, lo) - _variations(chain, hi)


def root_bound(c: Sequence[Fraction]) -> Fraction:
    c = strip(list(c))
    lead = abs(c[-1])
    if len(c) == 1:
        return Fraction(1)
    return 1 + max(abs(k) / lead for k in c[:-1])


@dataclass(frozen=True)
class RootRecord:
    lo: Fraction
    hi: Fraction
    multiplicity: int
    exact: Fraction | None = None  # set for rational roots found exactly

    def as_interval(self) -> "RatInterval":
        if self.exact is not None:
            return RatInterval(self.exact, self.exact)
        return RatInterval(self.lo, self.hi)


def _yun_decomposition(c: list[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Squarefree factors with multiplicities, [(s_i, i)], product s_i^i = c/lc."""
    f = strip(list(c))
    lead = f[-1]
    f = [x / lead for x in f]
    df = poly_derivative(f)
    g = univariate_gcd(f, df)
    if len(g) <= 1:
        return [(f, 1)]
    out = []
    w, _ = poly_divmod(f, g)
    y, _ = poly_divmod(df, g)
    i = 1
    while True:
        dw = poly_derivative(w)
        z = [a - b for a, b in _pad(y, dw)]
        z = strip(z)
        s = univariate_gcd(w, z) if z else w
        if len(s) > 1:
            out.append((s, i))
        if not z:
            break
        w, _ = poly_divmod(w, s) if len(s) > 1 else (w, [])
        y, _ = poly_divmod(z, s) if len(s) > 1 else (z, [])
        i += 1
        if len(strip(w)) <= 1:
            break
    return out


def _pad(a: list[Fraction], b: list[Fraction]):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def _isolate_squarefree(f: list[Fraction]) -> list[tuple[Fraction, Fraction, Fraction | None]]:
    """Disjoint isolating intervals (lo, hi, exact_or_None) for a squarefree poly."""
    chain = sturm_chain(f)
    B = root_bound(f)
    out: list[tuple[Fraction, Fraction, Fraction | None]] = []

    def recurse(lo: Fraction, hi: Fraction, count: int) -> None:
        if count == 0:
            return
        if count == 1:
            # shrink a little so that the endpoints are not roots
            out.append((lo, hi, None))
            return
        mid = (lo + hi) / 2
        if poly_eval(f, mid) == 0:
            out.append((mid, mid, mid))
            eps = (hi - lo) / 2
            while True:
                a, b = mid - eps, mid + eps
                if poly_eval(f, a) != 0 and poly_eval(f, b) != 0:
                    left = sturm_count(chain, lo, a)
                    right = sturm_count(chain, b, hi)
                    if left + right == count - 1:
                        recurse(lo, a, left)
                        recurse(b, hi, right)
                        return
                eps /= 2
        left = sturm_count(chain, lo, mid)
        recurse(lo, mid, left)
        recurse(mid, hi, count - left)

    total = sturm_count(chain, -B, B)
    recurse(-B, B, total)
    return sorted(out, key=lambda t: t[0])


def isolate_real_roots(poly: "ParamPoly | Sequence[Fraction]", name: str | None = None
                       ) -> list[RootRecord]:
    """Isolating intervals for all real roots, with multiplicities.

    Each returned interval contains exactly one distinct real root (intervals
    are pairwise disjoint); rational roots found during bisection are
    reported exactly.  Raises on the zero polynomial.
    """
    if isinstance(poly, ParamPoly):
        coeffs = from_param_poly(poly, name)
    else:
        coeffs = strip([Fraction(c) for c in poly])
    if not coeffs:
        raise ValueError("zero polynomial")
    if len(coeffs) == 1:
        return []
    records: list[RootRecord] = []
    for sqf, mult in _yun_decomposition(coeffs):
        for lo, hi, exact in _isolate_squarefree(sqf):
            if exact is None:
                lo, hi = _tighten_open(sqf, lo, hi)
                lo, hi = refine_root(sqf, lo, hi, (hi - lo) / 8)
                if lo == hi:
                    exact = lo
            records.append(RootRecord(lo, hi, mult, exact))
    records.sort(key=lambda r: r.lo)
    return records


def _tighten_open(f: list[Fraction], lo: Fraction, hi: Fraction):
    """Move endpoints off roots so that sign(f(lo)) * sign(f(hi)) < 0."""
    flo, fhi = poly_eval(f, lo), poly_eval(f, hi)
    width = hi - lo
    while flo == 0 or fhi == 0:
        width /= 2
        if flo == 0:
            lo -= width
            flo = poly_eval(f, lo)
        if fhi == 0:
            hi += width
            fhi = poly_eval(f, hi)
    return lo, hi


def refine_root(f: "Sequence[Fraction] | ParamPoly", lo: Fraction, hi: Fraction,
                width: Fraction, name: str | None = None) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a squarefree poly down to ``width``."""
    if isinstance(f, ParamPoly):
        f = from_param_poly(f, name)
    flo = poly_eval(f, lo)
    fhi = poly_eval(f, hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("interval endpoints do not bracket a sign change")
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = poly_eval(f, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo, hi


# -------------------------------------------------------------- intervals

@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v: Rat) -> "RatInterval":
        v = Fraction(v)
        return cls(v, v)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def sign(self) -> int | None:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def __add__(self, other) -> "RatInterval":
        other = _as_interval(other)
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "RatInterval":
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other) -> "RatInterval":
        return self + (-_as_interval(other))

    def __rsub__(self, other) -> "RatInterval":
        return -(self - other)

    def __mul__(self, other) -> "RatInterval":
        other = _as_interval(other)
        cands = [self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi]
        return RatInterval(min(cands), max(cands))

    __rmul__ = __mul__

    def reciprocal(self) -> "RatInterval":
        if self.contains_zero():
            raise ZeroDivisionError("interval straddles zero")
        return RatInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other) -> "RatInterval":
        return self * _as_interval(other).reciprocal()

    def __pow__(self, n: int) -> "RatInterval":
        if n < 0:
            return (self ** (-n)).reciprocal()
        out = RatInterval.point(1)
        for _ in range(n):
            out = out * self
        if n % 2 == 0 and self.contains_zero():
            out = RatInterval(Fraction(0), out.hi)
        return out


def _as_interval(v) -> RatInterval:
    if isinstance(v, RatInterval):
        return v
    return RatInterval.point(Fraction(v))


def interval_nth_root(x: RatInterval, m: int, rel_width: Fraction = Fraction(1, 10 ** 30)
                      ) -> RatInterval:
    """Outward rational enclosure of x**(1/m) for a positive interval.

    Exact bisection in rationals; the enclosure ends are certified by the
    comparisons r**m <= v <= R**m alone.
    """
    if x.lo <= 0:
        raise ValueError("nth root enclosure needs a strictly positive interval")

    def bracket(v: Fraction) -> tuple[Fraction, Fraction]:
        try:
            guess = Fraction(float(v) ** (1.0 / m)).limit_denominator(10 ** 18)
        except OverflowError:
            guess = Fraction(1)
        if guess <= 0:
            guess = Fraction(1)
        lo = guess
        while lo ** m > v:
            lo /= 2
        hi = max(guess, lo)
        while hi ** m < v:
            hi *= 2
        while hi - lo > hi * rel_width:
            mid = (lo + hi) / 2
            if mid ** m <= v:
                lo = mid
            else:
                hi = mid
        return lo, hi

    lo_l, _ = bracket(x.lo)
    _, hi_u = bracket(x.hi)
    return RatInterval(lo_l, hi_u)


def poly_interval_eval(p: ParamPoly, box: dict[str, RatInterval]) -> RatInterval:
    """Interval evaluation of a polynomial over a rational box."""
    total = RatInterval.point(0)
    for exps, c in p.terms.items():
        term = RatInterval.point(c)
        for name, e in zip(p.params, exps):
            if e == 0:
                continue
            if name not in box:
                raise ValueError(f"unbound parameter {name!r} in interval evaluation")
            term = term * (box[name] ** e)
        total = total + term
    return total
