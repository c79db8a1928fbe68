"""Immutable symbolic expression trees with exact rational arithmetic.

Expressions are built over the independent variables t and x, jet variables
u_{a0,a1} (a0 orders of t-differentiation, a1 orders of x-differentiation),
and named parameters.  Every constructor normalizes: sums and products are
flattened and sorted under a fixed term order, like terms merge, powers of a
common base merge (x^a * x^b -> x^(a+b)), products distribute over sums, and
positive integer powers of sums expand.  The resulting normal form is a sum
of monomials c * f1 * f2 * ... where each factor is an atom or an atomic
power; rational-exponent powers and exp/ln applications stay unexpanded.

All constants are exact `fractions.Fraction` values; floats never enter a
tree.  Trees are immutable and hashable, so they can be shared freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "Expr", "Rat", "Var", "Jet", "Param", "Sum", "Prod", "Pow", "Fun",
    "DerivKey", "ParseError",
    "rat", "jet", "param", "T", "X", "ZERO", "ONE",
    "add", "mul", "pow_", "fun_", "normalize",
    "partial_derivative", "substitute",
    "free_atoms", "jet_keys", "max_x_order", "has_t_derivatives",
    "sort_key", "parse", "to_text",
]

#: alpha = (alpha0, alpha1); (0, 0) is the dependent variable itself.
DerivKey = tuple[int, int]


class Expr:
    """Base class for expression nodes.  Arithmetic operators normalize."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(MINUS_ONE, _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return mul(self, pow_(_coerce(other), -1))

    def __rtruediv__(self, other):
        return mul(_coerce(other), pow_(self, -1))

    def __pow__(self, exponent):
        return pow_(self, exponent)

    def __neg__(self):
        return mul(MINUS_ONE, self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Rat(Expr):
    """Exact rational constant."""
    value: Fraction


@dataclass(frozen=True, slots=True)
class Var(Expr):
    """Independent variable, name in {'t', 'x'}."""
    name: str


@dataclass(frozen=True, slots=True)
class Jet(Expr):
    """Jet variable u_{a0,a1}: the (a0,a1)-th derivative as a coordinate."""
    a0: int
    a1: int

    @property
    def key(self) -> DerivKey:
        return (self.a0, self.a1)


@dataclass(frozen=True, slots=True)
class Param(Expr):
    """Named parameter (ansatz function, family constant, ...)."""
    name: str


@dataclass(frozen=True, slots=True)
class Sum(Expr):
    terms: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Prod(Expr):
    factors: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    """base raised to an exact rational exponent."""
    base: Expr
    exponent: Fraction


@dataclass(frozen=True, slots=True)
class Fun(Expr):
    """Elementary function application, name in {'exp', 'ln'}."""
    name: str
    arg: Expr


T = Var("t")
X = Var("x")
ZERO = Rat(Fraction(0))
ONE = Rat(Fraction(1))
MINUS_ONE = Rat(Fraction(-1))


def rat(numerator: int, denominator: int = 1) -> Rat:
    return Rat(Fraction(numerator, denominator))


def jet(a0: int, a1: int = -1) -> Jet:
    """jet(k) is the k-th pure x-derivative; jet(a0, a1) the mixed one."""
    if a1 < 0:
        a0, a1 = 0, a0
    if a0 < 0 or a1 < 0:
        raise ValueError("derivative orders must be non-negative")
    return Jet(a0, a1)


def param(name: str) -> Param:
    return Param(name)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Rat(Fraction(value))
    raise TypeError(f"cannot use {value!r} in a symbolic expression")


# ---------------------------------------------------------------------------
# term order

_VAR_RANK = {"t": 0, "x": 1}


def sort_key(e: Expr) -> tuple:
    """Deterministic total order key; structurally equal nodes tie."""
    if isinstance(e, Rat):
        return (0, e.value.numerator, e.value.denominator)
    if isinstance(e, Var):
        return (1, _VAR_RANK[e.name])
    if isinstance(e, Jet):
        return (2, e.a0, e.a1)
    if isinstance(e, Param):
        return (3, e.name)
    if isinstance(e, Fun):
        return (4, e.name, sort_key(e.arg))
    if isinstance(e, Pow):
        return (5, sort_key(e.base), e.exponent.numerator, e.exponent.denominator)
    if isinstance(e, Prod):
        return (6, len(e.factors)) + tuple(sort_key(f) for f in e.factors)
    if isinstance(e, Sum):
        return (7, len(e.terms)) + tuple(sort_key(t) for t in e.terms)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# normalizing constructors

def _split_coeff(e: Expr) -> tuple[Fraction, Expr | None]:
    """Split a non-Sum node into (rational coefficient, monomial part)."""
    if isinstance(e, Rat):
        return e.value, None
    if isinstance(e, Prod) and isinstance(e.factors[0], Rat):
        rest = e.factors[1:]
        part = rest[0] if len(rest) == 1 else Prod(rest)
        return e.factors[0].value, part
    return Fraction(1), e


def _make_term(coeff: Fraction, part: Expr | None) -> Expr:
    if part is None:
        return Rat(coeff)
    if coeff == 1:
        return part
    if isinstance(part, Prod):
        return Prod((Rat(coeff),) + part.factors)
    return Prod((Rat(coeff), part))


def add(*args) -> Expr:
    """Normalized sum: flattens, folds constants, merges like terms."""
    coeff = Fraction(0)
    groups: dict[tuple, list] = {}
    stack = [_coerce(a) for a in args]
    for a in stack:
        parts = a.terms if isinstance(a, Sum) else (a,)
        for term in parts:
            c, part = _split_coeff(term)
            if part is None:
                coeff += c
                continue
            k = sort_key(part)
            entry = groups.get(k)
            if entry is None:
                groups[k] = [c, part]
            else:
                entry[0] += c
    terms = [_make_term(c, part) for c, part in groups.values() if c != 0]
    if coeff != 0:
        terms.append(Rat(coeff))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=sort_key)
    return Sum(tuple(terms))


def mul(*args) -> Expr:
    """Normalized product: merges powers, distributes over sums."""
    coeff = Fraction(1)
    powers: dict[tuple, list] = {}  # base key -> [base, accumulated exponent]
    sums: list[tuple[Sum, int]] = []

    def take(base: Expr, exponent: Fraction) -> None:
        k = sort_key(base)
        entry = powers.get(k)
        if entry is None:
            powers[k] = [base, exponent]
        else:
            entry[1] += exponent

    stack = [_coerce(a) for a in args]
    for a in stack:
        factors = a.factors if isinstance(a, Prod) else (a,)
        for f in factors:
            if isinstance(f, Rat):
                if f.value == 0:
                    return ZERO
                coeff *= f.value
            elif isinstance(f, Pow):
                take(f.base, f.exponent)
            else:
                # sums included: repeated sum factors merge before expansion
                take(f, Fraction(1))

    atoms: list[Expr] = []
    spill: list[Expr] = []
    for base, exponent in powers.values():
        if exponent == 0:
            continue
        if isinstance(base, Sum) and exponent.denominator == 1 and exponent > 0:
            # expandable sum power: distribute below instead of re-entering pow_
            sums.append((base, int(exponent)))
            continue
        p = pow_(base, exponent)
        if isinstance(p, Rat):
            if p.value == 0:
                return ZERO
            coeff *= p.value
        elif isinstance(p, Prod):
            spill.append(p)
        else:
            atoms.append(p)
    if spill:
        return mul(Rat(coeff), *atoms, *spill,
                   *(s for s, n in sums for _ in range(n)))

    atomic = _assemble(coeff, atoms)
    if not sums:
        return atomic
    terms = [atomic]
    for s, n in sums:
        for _ in range(n):
            terms = [mul(tm, s_term) for tm in terms for s_term in s.terms]
    return add(*terms)


def _assemble(coeff: Fraction, atoms: list[Expr]) -> Expr:
    if not atoms:
        return Rat(coeff)
    atoms.sort(key=sort_key)
    if coeff == 1:
        return atoms[0] if len(atoms) == 1 else Prod(tuple(atoms))
    return Prod((Rat(coeff),) + tuple(atoms))


def pow_(base: Expr, exponent: int | Fraction) -> Expr:
    """Normalized power with exact rational exponent."""
    base = _coerce(base)
    e = Fraction(exponent)
    if e == 0:
        return ONE
    if e == 1:
        return base
    if isinstance(base, Rat):
        if e.denominator == 1:
            return Rat(base.value ** int(e))  # raises on 0 ** negative
        if base.value == 0:
            if e > 0:
                return ZERO
            raise ZeroDivisionError("0 raised to a negative power")
        if base.value == 1:
            return ONE
        return Pow(base, e)
    if isinstance(base, Pow):
        return pow_(base.base, base.exponent * e)
    if isinstance(base, Prod):
        return mul(*(pow_(f, e) for f in base.factors))
    if isinstance(base, Sum) and e.denominator == 1 and e > 0:
        out: Expr = base
        for _ in range(int(e) - 1):
            out = mul(out, base)
        return out
    return Pow(base, e)


def fun_(name: str, arg: Expr) -> Expr:
    """Normalized elementary function application."""
    if name not in ("exp", "ln"):
        raise ValueError(f"unsupported function {name!r}")
    arg = _coerce(arg)
    if name == "exp" and arg == ZERO:
        return ONE
    if name == "ln" and arg == ONE:
        return ZERO
    return Fun(name, arg)


def normalize(e: Expr) -> Expr:
    """Rebuild a tree bottom-up through the normalizing constructors."""
    if isinstance(e, (Rat, Var, Jet, Param)):
        return e
    if isinstance(e, Sum):
        return add(*(normalize(t) for t in e.terms))
    if isinstance(e, Prod):
        return mul(*(normalize(f) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(normalize(e.base), e.exponent)
    if isinstance(e, Fun):
        return fun_(e.name, normalize(e.arg))
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# calculus and rewriting

def partial_derivative(e: Expr, wrt: Expr) -> Expr:
    """Exact partial derivative; every other atom is held constant."""
    if not isinstance(wrt, (Var, Jet, Param)):
        raise TypeError("can only differentiate with respect to t, x, a jet "
                        "variable, or a parameter")
    if e == wrt:
        return ONE
    if isinstance(e, (Rat, Var, Jet, Param)):
        return ZERO
    if isinstance(e, Sum):
        return add(*(partial_derivative(t, wrt) for t in e.terms))
    if isinstance(e, Prod):
        pieces = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = partial_derivative(f, wrt)
            if df == ZERO:
                continue
            pieces.append(mul(*fs[:i], *fs[i + 1:], df))
        return add(*pieces)
    if isinstance(e, Pow):
        db = partial_derivative(e.base, wrt)
        if db == ZERO:
            return ZERO
        return mul(Rat(e.exponent), pow_(e.base, e.exponent - 1), db)
    if isinstance(e, Fun):
        da = partial_derivative(e.arg, wrt)
        if da == ZERO:
            return ZERO
        if e.name == "exp":
            return mul(fun_("exp", e.arg), da)
        return mul(pow_(e.arg, -1), da)
    raise TypeError(f"not an expression node: {e!r}")


def substitute(e: Expr, bindings: Mapping[Expr, Expr]) -> Expr:
    """Simultaneous substitution of jet variables and parameters.

    Replacement values are inserted as-is and not re-substituted into.
    """
    for key in bindings:
        if not isinstance(key, (Jet, Param, Var)):
            raise TypeError(f"cannot substitute for {key!r}")
    return _subst(e, bindings)


def _subst(e: Expr, bindings: Mapping[Expr, Expr]) -> Expr:
    if isinstance(e, (Jet, Param, Var)):
        return _coerce(bindings.get(e, e))
    if isinstance(e, Rat):
        return e
    if isinstance(e, Sum):
        return add(*(_subst(t, bindings) for t in e.terms))
    if isinstance(e, Prod):
        return mul(*(_subst(f, bindings) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(_subst(e.base, bindings), e.exponent)
    if isinstance(e, Fun):
        return fun_(e.name, _subst(e.arg, bindings))
    raise TypeError(f"not an expression node: {e!r}")


def free_atoms(e: Expr) -> set[Expr]:
    """All Var/Jet/Param atoms occurring in e."""
    out: set[Expr] = set()
    _collect_atoms(e, out)
    return out


def _collect_atoms(e: Expr, out: set[Expr]) -> None:
    if isinstance(e, (Var, Jet, Param)):
        out.add(e)
    elif isinstance(e, Sum):
        for t in e.terms:
            _collect_atoms(t, out)
    elif isinstance(e, Prod):
        for f in e.factors:
            _collect_atoms(f, out)
    elif isinstance(e, Pow):
        _collect_atoms(e.base, out)
    elif isinstance(e, Fun):
        _collect_atoms(e.arg, out)


def jet_keys(e: Expr) -> set[DerivKey]:
    return {a.key for a in free_atoms(e) if isinstance(a, Jet)}


def max_x_order(e: Expr) -> int | None:
    """Highest a1 among pure x-jets u_{0,a1} in e; None if no jets occur."""
    keys = jet_keys(e)
    if not keys:
        return None
    if any(a0 for a0, _ in keys):
        raise ValueError("expression contains t-derivatives")
    return max(a1 for _, a1 in keys)


def has_t_derivatives(e: Expr) -> bool:
    return any(a0 >= 1 for a0, _ in jet_keys(e))


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    """Syntax or identifier error, carrying the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, depvar: str, params: set[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.depvar = depvar
        self.params = params
        self.jet_re = re.compile(rf"{re.escape(depvar)}_(\d+)$")

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, off = self.next()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", off)

    def parse(self) -> Expr:
        e = self.expr()
        kind, value, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {value!r}", off)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                rhs = self.term()
                e = add(e, rhs) if value == "+" else add(e, mul(MINUS_ONE, rhs))
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.next()
                rhs = self.factor()
                e = mul(e, rhs) if value == "*" else mul(e, pow_(rhs, -1))
            else:
                return e

    def factor(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.next()
            return mul(MINUS_ONE, self.factor())
        base = self.base()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.next()
            return pow_(base, self.rational_exponent())
        return base

    def rational_exponent(self) -> Fraction:
        kind, value, off = self.next()
        if kind == "num":
            return Fraction(int(value))
        if kind == "op" and value == "-":
            kind, value, off = self.next()
            if kind != "num":
                raise ParseError("expected integer exponent", off)
            return Fraction(-int(value))
        if kind == "op" and value == "(":
            sign = 1
            kind, value, off = self.next()
            if kind == "op" and value == "-":
                sign = -1
                kind, value, off = self.next()
            if kind != "num":
                raise ParseError("expected integer in exponent", off)
            numerator = sign * int(value)
            kind, value, off = self.peek()
            if kind == "op" and value == "/":
                self.next()
                kind, value, off = self.next()
                if kind != "num":
                    raise ParseError("expected integer denominator", off)
                result = Fraction(numerator, int(value))
            else:
                result = Fraction(numerator)
            self.expect_op(")")
            return result
        raise ParseError("expected rational exponent", off)

    def base(self) -> Expr:
        kind, value, off = self.next()
        if kind == "num":
            return Rat(Fraction(int(value)))
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "ident":
            if value in ("exp", "ln"):
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return fun_(value, arg)
            if value == "t":
                return T
            if value == "x":
                return X
            if value == self.depvar:
                return Jet(0, 0)
            m = self.jet_re.match(value)
            if m:
                return Jet(0, int(m.group(1)))
            if self.params is not None and value not in self.params:
                raise ParseError(f"unknown identifier {value!r}", off)
            return Param(value)
        raise ParseError(f"unexpected {value!r}" if value else "unexpected end of input", off)


def parse(text: str, depvar: str = "u", params: Iterable[str] | None = None) -> Expr:
    """Parse an expression string into a normalized Expr.

    `depvar` names the dependent variable; `depvar`, `depvar_k` map to jet
    variables (u_0 is u itself).  Identifiers other than t, x, exp, ln and
    the dependent variable become parameters; if `params` is given, any
    identifier outside it is rejected.
    """
    parameters = set(params) if params is not None else None
    return _Parser(text, depvar, parameters).parse()


# ---------------------------------------------------------------------------
# printing

def to_text(e: Expr, depvar: str = "u") -> str:
    """Render an expression in the input grammar.

    Output re-parses to the same tree, except that mixed/t-derivatives
    (which the grammar cannot express) render as `u_{a0,a1}`.
    """
    if isinstance(e, Sum):
        out = _term_text(e.terms[0], depvar)
        for term in e.terms[1:]:
            c, part = _split_coeff(term)
            if c < 0:
                out += " - " + _term_text(_make_term(-c, part), depvar)
            else:
                out += " + " + _term_text(term, depvar)
        return out
    return _term_text(e, depvar)


def _term_text(e: Expr, depvar: str) -> str:
    if isinstance(e, Rat):
        return _rat_text(e.value)
    if isinstance(e, Prod):
        fs = e.factors
        prefix = ""
        if isinstance(fs[0], Rat):
            c = fs[0].value
            fs = fs[1:]
            if c == -1:
                prefix = "-"
            elif c != 1:
                prefix = _rat_text(c) + "*"
        body = "*".join(_factor_text(f, depvar) for f in fs)
        return prefix + body
    return _factor_text(e, depvar)


def _factor_text(e: Expr, depvar: str) -> str:
    if isinstance(e, Pow):
        return f"{_base_text(e.base, depvar)}^{_exponent_text(e.exponent)}"
    return _base_text(e, depvar)


def _base_text(e: Expr, depvar: str) -> str:
    if isinstance(e, Rat):
        v = e.value
        if v >= 0 and v.denominator == 1:
            return str(v.numerator)
        return f"({_rat_text(v)})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Jet):
        if e.a0 == 0:
            return depvar if e.a1 == 0 else f"{depvar}_{e.a1}"
        return f"{depvar}_{{{e.a0},{e.a1}}}"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Fun):
        return f"{e.name}({to_text(e.arg, depvar)})"
    return f"({to_text(e, depvar)})"


def _exponent_text(exponent: Fraction) -> str:
    if exponent.denominator == 1 and exponent >= 0:
        return str(exponent.numerator)
    return f"({_rat_text(exponent)})"


def _rat_text(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"
