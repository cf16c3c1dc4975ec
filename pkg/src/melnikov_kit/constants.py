"""Exact constants built from rationals, prime powers, pi and Gamma values.

A :class:`GammaConst` is ``mantissa * prod(p^e_p) * pi^e_pi * prod(Gamma(q)^n_q)``
with rational mantissa and exponents and Gamma arguments in (0, 1).  The
normal form

* reduces Gamma arguments into (0, 1) with the recurrence ``G(z+1) = z G(z)``,
* rewrites ``Gamma(1/2)`` as ``pi^(1/2)``,
* eliminates arguments above 1/2 through the reflection identity whenever
  ``sin(pi q)`` is itself a rational times prime powers (denominators
  2, 3, 4, 6),
* keeps prime exponents in [0, 1) by folding integer parts into the mantissa.

All factors except the mantissa are positive, so the sign of a constant is
the sign of its mantissa.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

import mpmath

Rat = Union[int, Fraction]

__all__ = ["GammaConst", "factor_int", "rational_prime_powers"]


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer by trial division."""
    if n <= 0:
        raise ValueError("need a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def rational_prime_powers(c: Fraction) -> dict[int, int]:
    """Signed prime exponents of a positive rational."""
    if c <= 0:
        raise ValueError("need a positive rational")
    out = factor_int(c.numerator)
    for p, e in factor_int(c.denominator).items():
        out[p] = out.get(p, 0) - e
        if out[p] == 0:
            del out[p]
    return out


# sin(pi*q) for the arguments where the value is rational times prime powers,
# encoded as prime -> exponent (mantissa folded in as exponent of its primes).
_SIN_TABLE: dict[Fraction, dict[int, Fraction]] = {
    Fraction(1, 2): {},
    Fraction(1, 3): {3: Fraction(1, 2), 2: Fraction(-1)},
    Fraction(1, 4): {2: Fraction(-1, 2)},
    Fraction(1, 6): {2: Fraction(-1)},
}


class GammaConst:
    """Immutable exact constant; see module docstring for the normal form."""

    __slots__ = ("mantissa", "primes", "pi_exp", "gammas", "_hash")

    def __init__(
        self,
        mantissa: Rat = 1,
        primes: Mapping[int, Rat] | None = None,
        pi_exp: Rat = 0,
        gammas: Mapping[Rat, int] | None = None,
    ):
        m = Fraction(mantissa)
        pr = {int(p): Fraction(e) for p, e in (primes or {}).items() if e}
        g: dict[Fraction, int] = {}
        for q, n in (gammas or {}).items():
            q = Fraction(q)
            n = int(n)
            if n:
                g[q] = g.get(q, 0) + n
        pi = Fraction(pi_exp)
        self.mantissa, self.primes, self.pi_exp, self.gammas = self._normalize(m, pr, pi, g)
        self._hash: int | None = None

    # ------------------------------------------------------------- builders
    @classmethod
    def rational(cls, c: Rat) -> "GammaConst":
        return cls(mantissa=c)

    @classmethod
    def pi(cls, exp: Rat = 1) -> "GammaConst":
        return cls(pi_exp=exp)

    @classmethod
    def gamma(cls, q: Rat, exp: int = 1) -> "GammaConst":
        return cls(gammas={Fraction(q): exp})

    @classmethod
    def beta(cls, a: Rat, b: Rat) -> "GammaConst":
        """Euler Beta function B(a, b) for positive rational arguments."""
        a, b = Fraction(a), Fraction(b)
        if a <= 0 or b <= 0:
            raise ValueError("Beta arguments must be positive")
        return cls.gamma(a) * cls.gamma(b) / cls.gamma(a + b)

    # -------------------------------------------------------- normalization
    @staticmethod
    def _normalize(m, primes, pi_exp, gammas):
        if m == 0:
            return Fraction(0), {}, Fraction(0), {}

        # Gamma argument reduction into (0, 1).
        work: dict[Fraction, int] = {}
        for q, n in gammas.items():
            if q <= 0:
                raise ValueError(f"Gamma argument must be positive, got {q}")
            while q >= 1:
                q -= 1
                if q == 0:
                    break  # Gamma(1) = 1
                # Gamma(q+1) = q Gamma(q), applied n times in the exponent
                m *= Fraction(q) ** n
            if q > 0:
                work[q] = work.get(q, 0) + n

        # Gamma(1/2) -> pi^(1/2); reflection for representable arguments.
        half = Fraction(1, 2)
        if half in work:
            pi_exp += Fraction(work.pop(half), 2)
        for q in sorted([q for q in work if q > half], reverse=True):
            n = work.pop(q)
            if n == 0:
                continue
            mate = 1 - q
            table = _SIN_TABLE.get(mate)
            if table is None:
                work[q] = n
                continue
            # Gamma(q)^n = [pi / sin(pi (1-q))]^n * Gamma(1-q)^(-n)
            pi_exp += n
            work[mate] = work.get(mate, 0) - n
            for p, e in table.items():
                primes[p] = primes.get(p, Fraction(0)) - Fraction(e) * n
        gammas = {q: n for q, n in work.items() if n}

        # Fold integral prime parts into the mantissa, keep exponents in [0,1).
        clean: dict[int, Fraction] = {}
        for p, e in primes.items():
            k = e.numerator // e.denominator
            frac = e - k
            if k:
                m *= Fraction(p) ** k
            if frac:
                clean[p] = frac
        # The mantissa itself may carry primes already present fractionally;
        # leave it reduced as a plain rational (canonical enough for equality).
        return m, clean, pi_exp, gammas

    # ------------------------------------------------------------- algebra
    def _key(self):
        return (
            self.mantissa,
            tuple(sorted(self.primes.items())),
            self.pi_exp,
            tuple(sorted(self.gammas.items())),
        )

    def structure_key(self):
        """Key ignoring the mantissa; constants with equal structure keys
        differ by a rational factor."""
        return (
            tuple(sorted(self.primes.items())),
            self.pi_exp,
            tuple(sorted(self.gammas.items())),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GammaConst):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def sign(self) -> int:
        if self.mantissa > 0:
            return 1
        if self.mantissa < 0:
            return -1
        return 0

    def __mul__(self, other) -> "GammaConst":
        if isinstance(other, (int, Fraction)):
            other = GammaConst.rational(other)
        if not isinstance(other, GammaConst):
            return NotImplemented
        primes = dict(self.primes)
        for p, e in other.primes.items():
            primes[p] = primes.get(p, Fraction(0)) + e
        gammas = dict(self.gammas)
        for q, n in other.gammas.items():
            gammas[q] = gammas.get(q, 0) + n
        return GammaConst(
            self.mantissa * other.mantissa, primes, self.pi_exp + other.pi_exp, gammas
        )

    __rmul__ = __mul__

    def inverse(self) -> "GammaConst":
        if self.mantissa == 0:
            raise ZeroDivisionError("inverse of zero constant")
        return GammaConst(
            1 / self.mantissa,
            {p: -e for p, e in self.primes.items()},
            -self.pi_exp,
            {q: -n for q, n in self.gammas.items()},
        )

    def __truediv__(self, other) -> "GammaConst":
        if isinstance(other, (int, Fraction)):
            other = GammaConst.rational(other)
        if not isinstance(other, GammaConst):
            return NotImplemented
        return self * other.inverse()

    def __neg__(self) -> "GammaConst":
        return GammaConst(-self.mantissa, self.primes, self.pi_exp, self.gammas)

    def pow_rational(self, e: Rat) -> "GammaConst":
        """Raise to a rational power; the mantissa must be positive and the
        Gamma part must vanish unless the exponent is an integer."""
        e = Fraction(e)
        if e.denominator == 1:
            k = e.numerator
            out = GammaConst.rational(1)
            base = self if k >= 0 else self.inverse()
            for _ in range(abs(k)):
                out = out * base
            return out
        if self.gammas:
            raise ValueError("fractional power of a Gamma factor is not supported")
        if self.mantissa <= 0:
            raise ValueError("fractional power needs a positive constant")
        primes = {p: pe * e for p, pe in self.primes.items()}
        for p, pe in rational_prime_powers(self.mantissa).items():
            primes[p] = primes.get(p, Fraction(0)) + pe * e
        return GammaConst(1, primes, self.pi_exp * e, {})

    # ------------------------------------------------------------- numerics
    def eval_mpf(self, digits: int = 50):
        """Correctly rounded (to working precision) mpmath value."""
        with mpmath.workdps(digits + 10):
            v = mpmath.mpf(self.mantissa.numerator) / self.mantissa.denominator
            for p, e in self.primes.items():
                v *= mpmath.power(p, mpmath.mpf(e.numerator) / e.denominator)
            if self.pi_exp:
                v *= mpmath.power(mpmath.pi, mpmath.mpf(self.pi_exp.numerator) / self.pi_exp.denominator)
            for q, n in self.gammas.items():
                v *= mpmath.gamma(mpmath.mpf(q.numerator) / q.denominator) ** n
            return +v

    def eval_decimal(self, digits: int = 50) -> str:
        with mpmath.workdps(digits + 10):
            return mpmath.nstr(self.eval_mpf(digits), digits, strip_zeros=False)

    # ------------------------------------------------------------ rendering
    def to_text(self) -> str:
        if self.mantissa == 0:
            return "0"
        parts = []
        if self.mantissa != 1 or (not self.primes and not self.pi_exp and not self.gammas):
            parts.append(str(self.mantissa))
        for p, e in sorted(self.primes.items()):
            parts.append(f"{p}^({e})")
        if self.pi_exp:
            parts.append("pi" if self.pi_exp == 1 else f"pi^({self.pi_exp})")
        for q, n in sorted(self.gammas.items()):
            base = f"Gamma({q})"
            parts.append(base if n == 1 else f"{base}^{n}")
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"GammaConst({self.to_text()})"
