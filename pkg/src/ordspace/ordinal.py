"""Exact arithmetic for ordinals below epsilon-zero, in Cantor normal form.

An ordinal is stored as its CNF term list: a tuple of (exponent, coefficient)
pairs with exponents (themselves ordinals) strictly decreasing and integer
coefficients >= 1.  The empty tuple is 0, and the denoted ordinal is
sum of w^exponent_i * coefficient_i.

Text notation (whitespace insignificant):

    ordinal := "0" | term ("+" term)*
    term    := "w^(" ordinal ")" ("*" nat)? | "w" ("*" nat)? | nat
    nat     := [1-9][0-9]*

"w" alone is accepted as shorthand for "w^(1)".  The formatter emits terms
in strictly decreasing exponent order, writing "w" for the exponent-1 term
and omitting "*1" coefficients, so formatting is canonical.
"""

from __future__ import annotations

from typing import Iterable, Union


class ParseError(ValueError):
    """Ordinal notation syntax error, carrying the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Ordinal:
    """An ordinal below epsilon-zero in Cantor normal form.

    Immutable and totally ordered.  Construct via :func:`from_int`,
    :func:`omega_pow`, :func:`parse` or the arithmetic functions rather
    than by passing raw term tuples.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[tuple["Ordinal", int]] = ()):
        terms = tuple(terms)
        for exp, coeff in terms:
            if not isinstance(exp, Ordinal) or not isinstance(coeff, int):
                raise TypeError("terms must be (Ordinal, int) pairs")
            if coeff < 1:
                raise ValueError("coefficients must be >= 1")
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if compare(e1, e2) <= 0:
                raise ValueError("exponents must be strictly decreasing")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Ordinal is immutable")

    # ---- structural predicates ------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def __int__(self) -> int:
        if self.is_zero():
            return 0
        if not self.is_finite():
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1]

    def __bool__(self) -> bool:
        return bool(self.terms)

    # ---- comparisons ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.terms))
        return self._hash

    def __lt__(self, other: "Ordinal") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "Ordinal") -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: "Ordinal") -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: "Ordinal") -> bool:
        return compare(self, other) >= 0

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return f"Ordinal({format_ordinal(self)!r})"


OrdinalLike = Union[Ordinal, int, str]


def from_int(n: int) -> Ordinal:
    if n < 0:
        raise ValueError("ordinals are non-negative")
    if n == 0:
        return ZERO
    return Ordinal(((ZERO, n),))


def as_ordinal(value: OrdinalLike) -> Ordinal:
    """Coerce an int or notation string to an Ordinal."""
    if isinstance(value, Ordinal):
        return value
    if isinstance(value, int):
        return from_int(value)
    if isinstance(value, str):
        return parse(value)
    raise TypeError(f"cannot interpret {value!r} as an ordinal")


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def compare(a: Ordinal, b: Ordinal) -> int:
    """Total order on ordinals: -1, 0 or 1.

    Lexicographic on the CNF term sequence, comparing exponents first,
    then coefficients; a proper prefix is smaller.
    """
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c != 0:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(a.terms) == len(b.terms):
        return 0
    return -1 if len(a.terms) < len(b.terms) else 1


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal sum a + b (non-commutative, absorbs small left terms)."""
    if b.is_zero():
        return a
    eb = b.terms[0][0]
    kept = [t for t in a.terms if compare(t[0], eb) > 0]
    merged = list(b.terms)
    if len(kept) < len(a.terms) and compare(a.terms[len(kept)][0], eb) == 0:
        merged[0] = (eb, a.terms[len(kept)][1] + b.terms[0][1])
    return Ordinal(kept + merged)


def mul_nat(a: Ordinal, k: int) -> Ordinal:
    """Ordinal product a * k for a natural k >= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if a.is_zero():
        return ZERO
    (e0, c0), tail = a.terms[0], a.terms[1:]
    return Ordinal(((e0, c0 * k),) + tail)


def omega_pow(a: Ordinal) -> Ordinal:
    """w^a as a single-term CNF ordinal."""
    return Ordinal(((a, 1),))


def omega_mul(mu: Ordinal, x: Ordinal) -> Ordinal:
    """Left product w^mu * x; shifts every CNF exponent of x up by mu."""
    return Ordinal(tuple((add(mu, e), c) for e, c in x.terms))


def leading_exponent(a: Ordinal) -> Ordinal:
    if a.is_zero():
        raise ValueError("zero has no leading exponent")
    return a.terms[0][0]


def last_exponent(a: Ordinal) -> Ordinal:
    if a.is_zero():
        raise ValueError("zero has no last exponent")
    return a.terms[-1][0]


def successor(a: Ordinal) -> Ordinal:
    return add(a, ONE)


def predecessor(a: Ordinal) -> Ordinal:
    """The b with b + 1 = a; defined for successor ordinals only."""
    if not a.is_successor():
        raise ValueError(f"{a} is not a successor ordinal")
    head, (_, c) = a.terms[:-1], a.terms[-1]
    if c == 1:
        return Ordinal(head)
    return Ordinal(head + ((ZERO, c - 1),))


def left_subtract(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique c with a + c = b; requires a <= b."""
    if a.is_zero():
        return b
    if b.is_zero() or compare(a, b) > 0:
        raise ValueError(f"cannot left-subtract {a} from smaller {b}")
    (ea, ca), (eb, cb) = a.terms[0], b.terms[0]
    c = compare(ea, eb)
    if c < 0:
        return b  # a is absorbed entirely
    if ca < cb:
        return Ordinal(((eb, cb - ca),) + b.terms[1:])
    # equal head terms: recurse on the tails
    return left_subtract(Ordinal(a.terms[1:]), Ordinal(b.terms[1:]))


def divide_by_omega_pow(g: Ordinal, mu: Ordinal) -> tuple[Ordinal, Ordinal]:
    """Split g = w^mu * quotient + remainder with remainder < w^mu.

    Terms with exponent >= mu feed the quotient (exponent shifted down by
    mu on the left), the rest form the remainder.  g is a multiple of w^mu
    exactly when the remainder is 0.
    """
    quot, rem = [], []
    for e, c in g.terms:
        if compare(e, mu) >= 0:
            quot.append((left_subtract(mu, e), c))
        else:
            rem.append((e, c))
    return Ordinal(quot), Ordinal(rem)


def tower_index(z: Ordinal) -> Ordinal:
    """The unique xi with w^(w^xi) <= z < w^(w^(xi+1)); requires z >= w.

    Equivalently the leading exponent of the leading exponent of z.
    """
    if compare(z, OMEGA) < 0:
        raise ValueError(f"tower index needs z >= w, got {z}")
    return leading_exponent(leading_exponent(z))


# ---- text notation ---------------------------------------------------------


def parse(text: str) -> Ordinal:
    """Parse ordinal notation; raises ParseError with the failing position."""
    parser = _Parser(text)
    value = parser.parse_ordinal()
    parser.skip_ws()
    if parser.pos < len(parser.text):
        raise ParseError("unexpected trailing input", parser.pos)
    return value


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def parse_ordinal(self) -> Ordinal:
        if self.peek() == "0":
            self.pos += 1
            return ZERO
        terms = [self.parse_term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.parse_term())
        for (e1, _, _), (e2, _, pos2) in zip(terms, terms[1:]):
            if compare(e1, e2) <= 0:
                raise ParseError("exponents must be strictly decreasing", pos2)
        return Ordinal((e, c) for e, c, _ in terms)

    def parse_term(self) -> tuple[Ordinal, int, int]:
        start = self.pos
        ch = self.peek()
        if ch == "w":
            self.pos += 1
            if self.peek() == "^":
                self.pos += 1
                self.expect("(")
                exponent = self.parse_ordinal()
                self.expect(")")
            else:
                exponent = ONE
            coeff = 1
            if self.peek() == "*":
                self.pos += 1
                coeff = self.parse_nat()
            return exponent, coeff, start
        if ch.isdigit():
            return ZERO, self.parse_nat(), start
        raise ParseError("expected a term", self.pos)

    def parse_nat(self) -> int:
        self.skip_ws()
        start = self.pos
        if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
            raise ParseError("expected a number", self.pos)
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        digits = self.text[start : self.pos]
        if digits[0] == "0":
            raise ParseError("numbers may not start with 0", start)
        return int(digits)


def format_ordinal(a: Ordinal) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for e, c in a.terms:
        if e.is_zero():
            parts.append(str(c))
            continue
        base = "w" if e == ONE else f"w^({format_ordinal(e)})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


# ---- JSON encoding: nested arrays [[exp, coeff], ...], 0 = [] --------------


def to_json(a: Ordinal) -> list:
    return [[to_json(e), c] for e, c in a.terms]


def from_json(data) -> Ordinal:
    if not isinstance(data, list):
        raise ValueError("ordinal JSON must be an array")
    terms = []
    for item in data:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], int)):
            raise ValueError("ordinal JSON terms must be [exponent, coefficient]")
        terms.append((from_json(item[0]), item[1]))
    return Ordinal(terms)


def validate(a: Ordinal) -> None:
    """Assert the CNF invariants recursively; for tests."""
    for e, c in a.terms:
        if c < 1:
            raise AssertionError("coefficient below 1")
        validate(e)
    for (e1, _), (e2, _) in zip(a.terms, a.terms[1:]):
        if compare(e1, e2) <= 0:
            raise AssertionError("exponents not strictly decreasing")
