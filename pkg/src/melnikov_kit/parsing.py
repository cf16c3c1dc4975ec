"""Parsing of system definition files and exact coefficient expressions.

System files are line-oriented key/value documents with ASCII polynomial
expressions::

    # comment
    param r
    kind = elementary
    H = 1/2*(x^2 + y^2) - 1/2*x^3 + y^3 + 1/8*x^4 - x*y^3 + r*y^4
    divergence = c00 + c10*x + c01*y + c20*x^2 + c11*x*y + c02*y^2

Symbols used only in the perturbation become perturbation parameters;
undeclared symbols in the Hamiltonian are line-numbered errors.  Symmetric
systems use ``symmetric = true`` plus ``h20 = ...`` entries (the derived
``h04``/``h13`` values may be given but must match the constraints).

The same expression grammar, extended with ``pi``, ``Gamma(a/b)``, ``sqrt``
and rational powers, parses exact coefficient values into :class:`SymValue`
objects for golden-table comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .constants import GammaConst
from .melnikov import SystemSpec
from .normal_form import SymmetricSystem
from .poly import ParamPoly
from .radicals import RadExpr, Ring
from .symvalue import SymValue

__all__ = [
    "ParseError",
    "ParsedSystem",
    "parse_expression",
    "parse_poly",
    "parse_symvalue",
    "parse_system_file",
    "parse_system_text",
    "serialize_system",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


# ------------------------------------------------------------- tokenizing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[()+\-*/^,]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} in expression")
        if m.group("num"):
            out.append(("num", m.group("num")))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            op = m.group("op")
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


# ------------------------------------------------------------- AST + eval

@dataclass
class _Node:
    kind: str                 # num | name | call | binop | neg
    value: str | Fraction | None = None
    children: list["_Node"] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse(self) -> _Node:
        node = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing tokens starting at {self.peek()[1]!r}")
        return node

    def expr(self) -> _Node:
        node = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = _Node("binop", val, [node, rhs])
            else:
                return node

    def term(self) -> _Node:
        node = self.unary()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                node = _Node("binop", val, [node, rhs])
            else:
                return node

    def unary(self) -> _Node:
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return inner if val == "+" else _Node("neg", None, [inner])
        return self.power()

    def power(self) -> _Node:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            expo = self.exponent()
            return _Node("binop", "^", [base, expo])
        return base

    def exponent(self) -> _Node:
        kind, val = self.peek()
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and val == "-":
            self.take()
            inner = self.exponent()
            return _Node("neg", None, [inner])
        if kind == "num":
            self.take()
            return _Node("num", val)
        raise ParseError(f"bad exponent near {val!r}")

    def atom(self) -> _Node:
        kind, val = self.take()
        if kind == "num":
            return _Node("num", val)
        if kind == "name":
            nkind, nval = self.peek()
            if nkind == "op" and nval == "(":
                self.take()
                args = [self.expr()]
                while self.peek() == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                return _Node("call", val, args)
            return _Node("name", val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {val!r}")


def parse_expression(text: str) -> _Node:
    return _Parser(_tokenize(text)).parse()


def _number_fraction(text: str) -> Fraction:
    if "." in text:
        return Fraction(text)
    return Fraction(int(text))


def _eval_symvalue(node: _Node, ring: Ring, allowed: set[str]) -> SymValue:
    if node.kind == "num":
        return SymValue.of(_number_fraction(node.value), ring)
    if node.kind == "name":
        if node.value == "pi":
            return SymValue.of(GammaConst.pi(), ring)
        if node.value not in allowed:
            raise ParseError(f"undeclared symbol {node.value!r}")
        return SymValue.of(ring.expr_var(node.value), ring)
    if node.kind == "neg":
        return -_eval_symvalue(node.children[0], ring, allowed)
    if node.kind == "call":
        fname = node.value
        if fname == "sqrt":
            if len(node.children) != 1:
                raise ParseError("sqrt takes one argument")
            return _sym_pow(_eval_symvalue(node.children[0], ring, allowed),
                            Fraction(1, 2), ring)
        if fname == "Gamma":
            if len(node.children) != 1:
                raise ParseError("Gamma takes one argument")
            arg = _eval_symvalue(node.children[0], ring, allowed)
            q = _as_rational(arg)
            return SymValue.of(GammaConst.gamma(q), ring)
        raise ParseError(f"unknown function {fname!r}")
    if node.kind == "binop":
        op = node.value
        if op == "^":
            expo = _exponent_fraction(node.children[1], ring, allowed)
            base = _eval_symvalue(node.children[0], ring, allowed)
            return _sym_pow(base, expo, ring)
        lhs = _eval_symvalue(node.children[0], ring, allowed)
        rhs = _eval_symvalue(node.children[1], ring, allowed)
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if op == "/":
            return lhs / rhs
    raise ParseError(f"malformed expression node {node.kind!r}")


def _exponent_fraction(node: _Node, ring: Ring, allowed: set[str]) -> Fraction:
    value = _eval_symvalue(node, ring, allowed)
    return _as_rational(value)


def _as_rational(value: SymValue) -> Fraction:
    if value.is_zero():
        return Fraction(0)
    if len(value.terms) != 1:
        raise ParseError("expected a rational value")
    const, expr = value.terms[0]
    if const.gammas or const.pi_exp or const.primes:
        raise ParseError("expected a rational value")
    if not expr.is_rational():
        raise ParseError("expected a rational value")
    return const.mantissa * expr.as_fraction()


def _sym_pow(base: SymValue, expo: Fraction, ring: Ring) -> SymValue:
    if expo.denominator == 1:
        n = expo.numerator
        if n >= 0:
            out = SymValue.of(Fraction(1), ring)
            for _ in range(n):
                out = out * base
            return out
        inv = _sym_invert(base, ring)
        out = SymValue.of(Fraction(1), ring)
        for _ in range(-n):
            out = out * inv
        return out
    if len(base.terms) != 1:
        raise ParseError("fractional power of a sum is not supported")
    const, expr = base.terms[0]
    new_const = const.pow_rational(expo)
    root = ring.radical_root(expr, expo.denominator)
    powered = root ** expo.numerator
    return SymValue(ring, [(new_const, powered)])


def _sym_invert(value: SymValue, ring: Ring) -> SymValue:
    if len(value.terms) != 1:
        raise ParseError("division by a sum of inequivalent terms is not supported")
    const, expr = value.terms[0]
    return SymValue(ring, [(const.inverse(), expr.inverse())])


def parse_symvalue(text: str, ring: Ring, allowed: Sequence[str] | None = None) -> SymValue:
    """Exact constant/coefficient expression into a SymValue over ``ring``."""
    allowed_set = set(allowed) if allowed is not None else set(ring.params)
    return _eval_symvalue(parse_expression(text), ring, allowed_set)


def parse_poly(text: str, params: Sequence[str], line: int | None = None) -> ParamPoly:
    """Polynomial expression over the given parameters (rationals allowed)."""
    ring = Ring(tuple(params))
    try:
        value = parse_symvalue(text, ring, params)
    except ParseError as exc:
        raise ParseError(str(exc).split(": ", 1)[-1], line) from None
    if value.is_zero():
        return ParamPoly.zero(tuple(params))
    if len(value.terms) != 1:
        raise ParseError("expression is not polynomial", line)
    const, expr = value.terms[0]
    if const.gammas or const.pi_exp or const.primes:
        raise ParseError("transcendental constants not allowed here", line)
    try:
        poly = expr.as_param_poly()
    except ValueError as exc:
        raise ParseError(f"expression is not polynomial: {exc}", line) from None
    return poly * const.mantissa


# ------------------------------------------------------------ system files

_SYMMETRIC_KEYS = ("h20", "h11", "h02", "h40", "h31", "h22", "h04", "h13")


@dataclass
class ParsedSystem:
    """Validated contents of a system definition file."""

    kind: str
    omega: Fraction
    symmetric: bool
    hamiltonian: ParamPoly | None
    divergence: ParamPoly
    params: tuple[str, ...]
    delta_params: tuple[str, ...]
    positive: tuple[ParamPoly, ...]
    symmetric_system: SymmetricSystem | None = None

    def to_system_spec(self) -> SystemSpec:
        if self.hamiltonian is None:
            raise ParseError("symmetric system: apply a normal form to obtain H first")
        return SystemSpec.from_polynomials(
            self.hamiltonian, self.divergence, kind=self.kind,
            delta_params=self.delta_params,
            positive=[p for p in self.positive],
        )


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_RESERVED = {"pi", "sqrt", "Gamma", "x", "y"}


def parse_system_text(text: str) -> ParsedSystem:
    declared: list[str] = []
    positive_names: list[str] = []
    assignments: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("param "):
            rest = line[6:].split()
            if not rest:
                raise ParseError("param needs a name", lineno)
            name = rest[0]
            if not _NAME_RE.fullmatch(name) or name in _RESERVED:
                raise ParseError(f"bad parameter name {name!r}", lineno)
            declared.append(name)
            if len(rest) > 1:
                if rest[1] != "positive":
                    raise ParseError(f"unknown param attribute {rest[1]!r}", lineno)
                positive_names.append(name)
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ParseError("empty key or value", lineno)
        if key in assignments:
            raise ParseError(f"duplicate key {key!r}", lineno)
        assignments[key] = (value, lineno)

    kind = "auto"
    if "kind" in assignments:
        kind_val, kline = assignments.pop("kind")
        if kind_val not in ("elementary", "nilpotent", "auto"):
            raise ParseError(f"kind must be elementary|nilpotent|auto, got {kind_val!r}", kline)
        kind = kind_val

    symmetric = False
    if "symmetric" in assignments:
        sym_val, sline = assignments.pop("symmetric")
        if sym_val not in ("true", "false"):
            raise ParseError("symmetric must be true or false", sline)
        symmetric = sym_val == "true"

    omega = Fraction(1)
    if "omega" in assignments:
        text_val, oline = assignments.pop("omega")
        try:
            omega = Fraction(text_val)
        except ValueError:
            raise ParseError(f"omega must be rational, got {text_val!r}", oline) from None
        if omega <= 0:
            raise ParseError("omega must be positive", oline)

    # perturbation parameters: names used in p/q/divergence but never declared
    pert_keys = [k for k in ("p", "q", "divergence") if k in assignments]
    delta_names: list[str] = []
    for k in pert_keys:
        for name in _NAME_RE.findall(assignments[k][0]):
            if name in _RESERVED or name in declared or name in delta_names:
                continue
            delta_names.append(name)
    delta_names.sort()  # canonical order for deterministic round-trips

    all_params = tuple(declared) + tuple(delta_names)
    poly_params = ("x", "y") + all_params

    def parse_entry(key: str) -> ParamPoly | None:
        if key not in assignments:
            return None
        value, lineno = assignments.pop(key)
        poly = parse_poly(value, poly_params, lineno)
        for name in poly.variables_present() - {"x", "y"}:
            if name not in all_params:
                raise ParseError(f"undeclared symbol {name!r}", lineno)
        return poly

    p_poly = parse_entry("p")
    q_poly = parse_entry("q")
    div_poly = parse_entry("divergence")
    if div_poly is not None and (p_poly is not None or q_poly is not None):
        raise ParseError("give either divergence or the p/q pair, not both")
    if div_poly is None:
        if p_poly is None and q_poly is None:
            div_poly = ParamPoly.zero(poly_params)
        else:
            px = p_poly.derivative("x") if p_poly is not None else ParamPoly.zero(poly_params)
            qy = q_poly.derivative("y") if q_poly is not None else ParamPoly.zero(poly_params)
            div_poly = px + qy

    positive = tuple(ParamPoly.var(all_params, n) for n in positive_names)

    if symmetric:
        entries: dict[str, ParamPoly] = {}
        for key in _SYMMETRIC_KEYS:
            val = parse_entry(key)
            if val is not None:
                extra = val.variables_present() & {"x", "y"}
                if extra:
                    raise ParseError(f"symmetric coefficient {key} cannot use x or y")
                entries[key] = _strip_xy(val, all_params)
        if "H" in assignments:
            raise ParseError("symmetric systems are given by h-coefficients, not H")
        _reject_unknown(assignments)
        sym = SymmetricSystem.from_values(
            {k: v for k, v in entries.items() if k in
             ("h20", "h11", "h02", "h40", "h31", "h22")},
            params=all_params,
        )
        for derived, expected in (("h04", sym.h04), ("h13", sym.h13)):
            if derived in entries and entries[derived] != expected:
                raise ParseError(
                    f"constraint violation: {derived} must equal "
                    f"{expected.to_text()} for the symmetric family"
                )
        return ParsedSystem(
            kind=kind, omega=omega, symmetric=True, hamiltonian=None,
            divergence=div_poly, params=tuple(declared),
            delta_params=tuple(delta_names), positive=positive,
            symmetric_system=sym,
        )

    H = parse_entry("H")
    if H is None:
        raise ParseError("missing Hamiltonian: add an 'H = ...' line")
    _reject_unknown(assignments)
    return ParsedSystem(
        kind=kind, omega=omega, symmetric=False, hamiltonian=H,
        divergence=div_poly, params=tuple(declared),
        delta_params=tuple(delta_names), positive=positive,
    )


def _strip_xy(p: ParamPoly, params: tuple[str, ...]) -> ParamPoly:
    out = {}
    ix, iy = p.params.index("x"), p.params.index("y")
    keep = [k for k, n in enumerate(p.params) if n not in ("x", "y")]
    for exps, c in p.terms.items():
        if exps[ix] or exps[iy]:
            raise ParseError("unexpected x or y in a coefficient")
        out[tuple(exps[k] for k in keep)] = c
    return ParamPoly(params, out)


def _reject_unknown(assignments: dict[str, tuple[str, int]]) -> None:
    if assignments:
        key, (_, lineno) = next(iter(assignments.items()))
        raise ParseError(f"unknown key {key!r}", lineno)


def parse_system_file(path) -> ParsedSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system_text(fh.read())


def serialize_system(parsed: ParsedSystem) -> str:
    """Canonical text form; parsing it back gives an identical system."""
    lines = []
    for name in parsed.params:
        attr = " positive" if any(
            p == ParamPoly.var(p.params, name) for p in parsed.positive
        ) else ""
        lines.append(f"param {name}{attr}")
    lines.append(f"kind = {parsed.kind}")
    lines.append(f"omega = {parsed.omega}")
    if parsed.symmetric:
        lines.append("symmetric = true")
        sym = parsed.symmetric_system
        for key in ("h20", "h11", "h02", "h40", "h31", "h22"):
            lines.append(f"{key} = {getattr(sym, key).to_text()}")
    else:
        lines.append(f"H = {parsed.hamiltonian.to_text()}")
    if not parsed.divergence.is_zero():
        lines.append(f"divergence = {parsed.divergence.to_text()}")
    return "\n".join(lines) + "\n"
