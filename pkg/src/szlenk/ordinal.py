"""Exact ordinal arithmetic below epsilon_0, in Cantor normal form.

An ordinal is stored as a tuple of (exponent, coefficient) pairs with strictly
decreasing exponents and positive integer coefficients, i.e.

    w^e1 * c1 + w^e2 * c2 + ... + w^ek * ck      (e1 > e2 > ... > ek)

where each exponent is itself such an ordinal.  This represents every ordinal
below epsilon_0 uniquely and makes comparison, (non-commutative) addition and
multiplication, and w-powers exact and fast at the sizes this package needs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union


class NotALimit(ValueError):
    """Raised when a fundamental sequence is requested for 0 or a successor."""


class ParseError(ValueError):
    """Raised on malformed ordinal text; carries the offending position."""

    def __init__(self, message: str, pos: int) -> None:
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Ordinal:
    """An ordinal below epsilon_0 in Cantor normal form.

    ``cnf`` is a tuple of (exponent, coefficient) pairs; the empty tuple is 0.
    Instances are immutable, hashable and totally ordered.
    """

    cnf: tuple[tuple["Ordinal", int], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for exp, coeff in self.cnf:
            if not isinstance(exp, Ordinal) or not isinstance(coeff, int):
                raise TypeError("cnf terms must be (Ordinal, int) pairs")
            if coeff < 1:
                raise ValueError("cnf coefficients must be >= 1")
            if prev is not None and not exp < prev:
                raise ValueError("cnf exponents must be strictly decreasing")
            prev = exp

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_int(n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are non-negative")
        if n == 0:
            return ZERO
        return Ordinal(((ZERO, n),))

    @staticmethod
    def omega() -> "Ordinal":
        return OMEGA

    # -- predicates and accessors -----------------------------------------

    def is_zero(self) -> bool:
        return not self.cnf

    def is_finite(self) -> bool:
        return not self.cnf or (len(self.cnf) == 1 and self.cnf[0][0].is_zero())

    def as_int(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is not finite")
        return self.cnf[0][1] if self.cnf else 0

    def is_successor(self) -> bool:
        return bool(self.cnf) and self.cnf[-1][0].is_zero()

    def is_limit(self) -> bool:
        return bool(self.cnf) and not self.cnf[-1][0].is_zero()

    def leading_exponent(self) -> "Ordinal":
        if not self.cnf:
            raise ValueError("0 has no leading exponent")
        return self.cnf[0][0]

    # -- ordering ----------------------------------------------------------

    def _cmp(self, other: "Ordinal") -> int:
        for (e1, c1), (e2, c2) in zip(self.cnf, other.cnf):
            if e1 != e2:
                return -1 if e1._cmp(e2) < 0 else 1
            if c1 != c2:
                return -1 if c1 < c2 else 1
        if len(self.cnf) != len(other.cnf):
            return -1 if len(self.cnf) < len(other.cnf) else 1
        return 0

    def __lt__(self, other: "Ordinal") -> bool:
        return self._cmp(_coerce(other)) < 0

    def __le__(self, other: "Ordinal") -> bool:
        return self._cmp(_coerce(other)) <= 0

    def __gt__(self, other: "Ordinal") -> bool:
        return self._cmp(_coerce(other)) > 0

    def __ge__(self, other: "Ordinal") -> bool:
        return self._cmp(_coerce(other)) >= 0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: Union["Ordinal", int]) -> "Ordinal":
        return add(self, _coerce(other))

    def __radd__(self, other: int) -> "Ordinal":
        return add(_coerce(other), self)

    def __mul__(self, other: Union["Ordinal", int]) -> "Ordinal":
        return mul(self, _coerce(other))

    def __rmul__(self, other: int) -> "Ordinal":
        return mul(_coerce(other), self)

    # -- rendering ---------------------------------------------------------

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"Ordinal[{to_text(self)}]"


def _coerce(x: Union[Ordinal, int]) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return Ordinal.from_int(x)
    raise TypeError(f"cannot interpret {x!r} as an ordinal")


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


# -- core operations -------------------------------------------------------


def cmp(a: Ordinal, b: Ordinal) -> int:
    """Three-way comparison: -1, 0 or 1."""
    return _coerce(a)._cmp(_coerce(b))


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal sum a + b (left-absorbing, not commutative)."""
    a, b = _coerce(a), _coerce(b)
    if b.is_zero():
        return a
    if a.is_zero():
        return b
    lead = b.cnf[0][0]
    # Terms of a strictly below w^lead are absorbed by b.
    kept = [t for t in a.cnf if t[0] > lead]
    merged = list(b.cnf)
    boundary = [t for t in a.cnf if t[0] == lead]
    if boundary:
        merged[0] = (lead, boundary[0][1] + merged[0][1])
    return Ordinal(tuple(kept) + tuple(merged))


def mul(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal product a * b (left-distributive over +, not commutative)."""
    a, b = _coerce(a), _coerce(b)
    if a.is_zero() or b.is_zero():
        return ZERO
    e1, c1 = a.cnf[0]
    out = ZERO
    for f, d in b.cnf:
        if f.is_zero():
            # a * d scales the leading coefficient only.
            piece = Ordinal(((e1, c1 * d),) + a.cnf[1:])
        else:
            piece = Ordinal(((add(e1, f), d),))
        out = add(out, piece)
    return out


def omega_pow(a: Ordinal) -> Ordinal:
    """w ** a."""
    a = _coerce(a)
    return Ordinal(((a, 1),))


def is_limit(a: Ordinal) -> bool:
    return _coerce(a).is_limit()


def is_successor(a: Ordinal) -> bool:
    return _coerce(a).is_successor()


def is_power_of_omega(a: Ordinal) -> bool:
    """True iff a = w^e for some e (this includes 1 = w^0)."""
    a = _coerce(a)
    return len(a.cnf) == 1 and a.cnf[0][1] == 1


def predecessor(a: Ordinal) -> Ordinal:
    """The b with b + 1 = a; requires a to be a successor."""
    a = _coerce(a)
    if not a.is_successor():
        raise ValueError(f"{a} is not a successor")
    exp, coeff = a.cnf[-1]
    if coeff > 1:
        return Ordinal(a.cnf[:-1] + ((exp, coeff - 1),))
    return Ordinal(a.cnf[:-1])


def cofinality_class(a: Ordinal) -> str:
    """One of "zero", "one", "omega".

    Every ordinal below epsilon_0 has countable cofinality, so limits are
    always cofinality omega here; uncountable-cofinality ordinals are outside
    the representable range altogether.
    """
    a = _coerce(a)
    if a.is_zero():
        return "zero"
    return "one" if a.is_successor() else "omega"


def least_omega_power_above(x: Ordinal) -> Ordinal:
    """The least w^a with x < w^a.

    For x = 0 this is 1 = w^0; otherwise x has leading exponent e and
    w^e <= x < w^(e+1), so the answer is w^(e+1).
    """
    x = _coerce(x)
    if x.is_zero():
        return ONE
    return omega_pow(add(x.leading_exponent(), ONE))


# -- indexed families and their suprema ------------------------------------


@dataclass(frozen=True)
class Const:
    """The constant family n |-> value."""

    value: Ordinal


@dataclass(frozen=True)
class AffineInN:
    """The family n |-> slope * n + offset (n ranges over 0, 1, 2, ...)."""

    slope: Ordinal
    offset: Ordinal

    def __post_init__(self) -> None:
        if self.slope.is_zero():
            raise ValueError("AffineInN requires a nonzero slope; use Const")

    def at(self, n: int) -> Ordinal:
        return add(mul(self.slope, Ordinal.from_int(n)), self.offset)


OrdFamily = Union[Const, AffineInN]


def sup_family(fam: OrdFamily) -> Ordinal:
    """Exact supremum of the family over n < omega.

    For AffineInN(s, o) the supremum is s * w = w^(lead(s)+1) whenever the
    offset does not dominate; if lead(o) > lead(s) then s*n + o = o for every
    n and the supremum is o itself.
    """
    if isinstance(fam, Const):
        return fam.value
    s, o = fam.slope, fam.offset
    if not o.is_zero() and o.leading_exponent() > s.leading_exponent():
        return o
    return omega_pow(add(s.leading_exponent(), ONE))


def sup_affine(slope: Ordinal, offset: Ordinal) -> Ordinal:
    """sup_n (slope*n + offset); tolerates slope = 0 (then it's the offset)."""
    if slope.is_zero():
        return offset
    return sup_family(AffineInN(slope, offset))


# -- fundamental sequences -------------------------------------------------


def fundamental_sequence(a: Ordinal, k: int) -> Ordinal:
    """The k-th member of the canonical fundamental sequence of a limit a.

    Rules: (d + w^(b+1))[k] = d + w^b * k, and (d + w^l)[k] = d + w^(l[k])
    for limit exponents l.  The sequence is strictly increasing in k with
    supremum a.
    """
    a = _coerce(a)
    if k < 0:
        raise ValueError("k must be >= 0")
    if not a.is_limit():
        raise NotALimit(f"{a} is not a limit ordinal")
    exp, coeff = a.cnf[-1]
    head = a.cnf[:-1] if coeff == 1 else a.cnf[:-1] + ((exp, coeff - 1),)
    delta = Ordinal(head)
    if exp.is_successor():
        step = mul(omega_pow(predecessor(exp)), Ordinal.from_int(k))
    else:
        step = omega_pow(fundamental_sequence(exp, k))
    return add(delta, step)


# -- text syntax -----------------------------------------------------------
#
#   expr   := term ("+" term)*
#   term   := "w" ["^" base] ["*" nat] | nat
#   base   := nat | "w" | "(" expr ")"
#
# Terms are combined with ordinal addition, so input need not be in CNF:
# "w + w^2" evaluates to w^2.

_TOKEN = re.compile(r"\s*(w|\d+|[\^*+()])")


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            return
        yield m.group(1), m.start(1)
        pos = m.end()


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = list(_tokenize(text))
        self.i = 0
        self.n = len(text)

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else self.n

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.n)
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}", self.pos())
        self.i += 1

    def parse_expr(self) -> Ordinal:
        out = self.parse_term()
        while self.peek() == "+":
            self.take()
            out = add(out, self.parse_term())
        return out

    def parse_term(self) -> Ordinal:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a term", self.n)
        if tok.isdigit():
            self.take()
            return Ordinal.from_int(int(tok))
        if tok != "w":
            raise ParseError(f"expected 'w' or a number, got {tok!r}", self.pos())
        self.take()
        exponent = ONE
        if self.peek() == "^":
            self.take()
            exponent = self.parse_base()
        coeff = 1
        if self.peek() == "*":
            self.take()
            lit = self.peek()
            if lit is None or not lit.isdigit():
                raise ParseError("expected a coefficient after '*'", self.pos())
            self.take()
            coeff = int(lit)
            if coeff < 1:
                raise ParseError("coefficient must be >= 1", self.pos())
        return mul(omega_pow(exponent), Ordinal.from_int(coeff))

    def parse_base(self) -> Ordinal:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok == "w":
            self.take()
            return OMEGA
        if tok is not None and tok.isdigit():
            self.take()
            return Ordinal.from_int(int(tok))
        raise ParseError("expected an exponent", self.pos())


def parse(text: str) -> Ordinal:
    """Parse ordinal text like "w^(w)*3 + w*2 + 5"."""
    p = _Parser(text)
    if not p.tokens:
        raise ParseError("empty input", 0)
    out = p.parse_expr()
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return out


def to_text(a: Ordinal) -> str:
    a = _coerce(a)
    if a.is_zero():
        return "0"
    parts = []
    for exp, coeff in a.cnf:
        if exp.is_zero():
            parts.append(str(coeff))
            continue
        if exp == ONE:
            body = "w"
        elif exp.is_finite():
            body = f"w^{exp.as_int()}"
        else:
            body = f"w^({to_text(exp)})"
        parts.append(body if coeff == 1 else f"{body}*{coeff}")
    return " + ".join(parts)


# -- JSON ------------------------------------------------------------------


def to_json(a: Ordinal) -> dict:
    a = _coerce(a)
    return {"cnf": [[to_json(exp), coeff] for exp, coeff in a.cnf]}


def from_json(doc: object) -> Ordinal:
    if not isinstance(doc, dict) or set(doc) != {"cnf"} or not isinstance(doc["cnf"], list):
        raise ValueError(f"not an ordinal document: {doc!r}")
    terms = []
    for item in doc["cnf"]:
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[1], int):
            raise ValueError(f"malformed cnf term: {item!r}")
        terms.append((from_json(item[0]), item[1]))
    return Ordinal(tuple(terms))


# -- rationals as strings (shared helper for document schemas) -------------


def frac_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def frac_from_str(s: object) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"expected a rational string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {s!r}: {exc}") from None
