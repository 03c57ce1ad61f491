"""Exact evaluation of the Grasberg norm on step functions.

For an infinite space K with Cantor-Bendixson index cb (always a successor),
the parameters are o = the unique ordinal with w^o < cb <= w^(o+1) and
b = max{n < w : the (w^o * n)-th derivative of K is non-empty}.  The norm of
f is max over 0 <= n <= b of 2^n times the sup of |f| on the (w^o * n)-th
derivative, with the sup over the empty set taken as 0.

All values are exact rationals; no floating point enters any comparison here,
since the queen inequality can be attained with equality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    compare,
    divide_by_omega_pow,
    format_ordinal,
    from_json as ordinal_from_json,
    leading_exponent,
    mul_nat,
    omega_pow,
    predecessor,
    to_json as ordinal_to_json,
)
from .topology import (
    ClosedSet,
    Singleton,
    Stratum,
    cb_index,
    format_closed_set,
    is_empty,
    iterated_derivative,
    roundup,
    to_json as closed_set_to_json,
)

Rational = Union[Fraction, int, str]


@dataclass(frozen=True)
class GrasbergParams:
    o: Ordinal
    b: int
    cb: Ordinal


@lru_cache(maxsize=None)
def params(space: ClosedSet) -> GrasbergParams:
    """Norm parameters of an infinite space; errors on finite spaces."""
    cb = cb_index(space)
    if compare(cb, ONE) <= 0:
        raise ValueError("Grasberg parameters need an infinite space (cb index >= 2)")
    lam = predecessor(cb)
    o = leading_exponent(lam)
    quotient, _ = divide_by_omega_pow(lam, o)
    return GrasbergParams(o=o, b=int(quotient), cb=cb)


@lru_cache(maxsize=None)
def level_sets(space: ClosedSet) -> tuple[ClosedSet, ...]:
    """The derived sets K^(w^o * n) for n = 0..b."""
    p = params(space)
    levels = [space]
    for n in range(1, p.b + 1):
        levels.append(iterated_derivative(space, mul_nat(omega_pow(p.o), n)))
    return tuple(levels)


# ---- step functions ---------------------------------------------------------


class StepFunction:
    """A function on [0, ambient] constant on finitely many clopen pieces.

    breakpoints b0 < b1 < ... < bk = ambient cut the space into the pieces
    [0, b0], (b0, b1], ..., (b_{k-1}, bk]; values[i] is the value on piece i.
    Every such piece is clopen in the order topology (a jump can only sit at
    a successor), so the function is continuous.  Adjacent pieces with equal
    values are merged on construction, making the representation canonical.
    """

    __slots__ = ("ambient", "breakpoints", "values", "_hash")

    def __init__(
        self,
        ambient: Ordinal,
        breakpoints: Sequence[Ordinal],
        values: Sequence[Rational],
    ):
        if not breakpoints:
            raise ValueError("a step function needs at least one piece")
        if len(breakpoints) != len(values):
            raise ValueError("breakpoints and values must have equal length")
        if breakpoints[-1] != ambient:
            raise ValueError("last breakpoint must equal the ambient ordinal")
        for x, y in zip(breakpoints, breakpoints[1:]):
            if compare(x, y) >= 0:
                raise ValueError("breakpoints must be strictly increasing")
        vals = [Fraction(v) for v in values]
        merged_b: list[Ordinal] = []
        merged_v: list[Fraction] = []
        for bp, v in zip(breakpoints, vals):
            if merged_v and merged_v[-1] == v:
                merged_b[-1] = bp
            else:
                merged_b.append(bp)
                merged_v.append(v)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "breakpoints", tuple(merged_b))
        object.__setattr__(self, "values", tuple(merged_v))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("StepFunction is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            self.ambient == other.ambient
            and self.breakpoints == other.breakpoints
            and self.values == other.values
        )

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash((self.ambient, self.breakpoints, self.values))
            )
        return self._hash

    def pieces(self) -> Iterator[tuple[Optional[Ordinal], Ordinal, Fraction]]:
        """Yield (lower, upper, value); lower None means the piece [0, upper]."""
        prev: Optional[Ordinal] = None
        for bp, v in zip(self.breakpoints, self.values):
            yield prev, bp, v
            prev = bp

    def __repr__(self) -> str:
        body = ", ".join(
            f"(..{format_ordinal(b)}]={v}" for b, v in zip(self.breakpoints, self.values)
        )
        return f"StepFunction({body})"


def constant(ambient: Ordinal, value: Rational) -> StepFunction:
    return StepFunction(ambient, (ambient,), (value,))


def indicator(ambient: Ordinal, lo: Ordinal, hi: Ordinal) -> StepFunction:
    """The indicator of the window (lo, hi] inside [0, ambient]."""
    if compare(hi, ambient) > 0 or compare(lo, hi) > 0:
        raise ValueError("indicator window must satisfy lo <= hi <= ambient")
    if lo == hi:
        return constant(ambient, 0)
    bps: list[Ordinal] = []
    vals: list[Rational] = []
    if not lo.is_zero():
        bps.append(lo)
        vals.append(0)
    bps.append(hi)
    vals.append(1)
    if compare(hi, ambient) < 0:
        bps.append(ambient)
        vals.append(0)
    return StepFunction(ambient, bps, vals)


def value_at(f: StepFunction, point: Ordinal) -> Fraction:
    if compare(point, f.ambient) > 0:
        raise ValueError(f"point {point} outside [0, {f.ambient}]")
    for bp, v in zip(f.breakpoints, f.values):
        if compare(point, bp) <= 0:
            return v
    raise AssertionError("unreachable: last breakpoint is the ambient")


def _refined_breakpoints(fs: Sequence[StepFunction]) -> list[Ordinal]:
    return sorted({bp for f in fs for bp in f.breakpoints})


def step_add(f: StepFunction, g: StepFunction) -> StepFunction:
    if f.ambient != g.ambient:
        raise ValueError("step functions live on different ambient intervals")
    bps = _refined_breakpoints((f, g))
    return StepFunction(f.ambient, bps, [value_at(f, b) + value_at(g, b) for b in bps])


def step_scale(f: StepFunction, c: Rational) -> StepFunction:
    c = Fraction(c)
    return StepFunction(f.ambient, f.breakpoints, [c * v for v in f.values])


def step_convex(coeffs: Sequence[Rational], fs: Sequence[StepFunction]) -> StepFunction:
    coeffs = [Fraction(c) for c in coeffs]
    if len(coeffs) != len(fs):
        raise ValueError("one coefficient per function required")
    if any(c < 0 for c in coeffs) or sum(coeffs, Fraction(0)) != 1:
        raise ValueError("coefficients must be non-negative and sum to 1")
    ambient = fs[0].ambient
    if any(f.ambient != ambient for f in fs):
        raise ValueError("step functions live on different ambient intervals")
    bps = _refined_breakpoints(fs)
    values = [
        sum((c * value_at(f, b) for c, f in zip(coeffs, fs)), Fraction(0)) for b in bps
    ]
    return StepFunction(ambient, bps, values)


# ---- sup and norm -----------------------------------------------------------


def _piece_meets(space: ClosedSet, lower: Optional[Ordinal], upper: Ordinal) -> bool:
    """Does the clopen piece (lower, upper] (or [0, upper]) meet the set?"""
    for atom in space.atoms:
        if isinstance(atom, Singleton):
            p = atom.point
            if compare(p, upper) <= 0 and (lower is None or compare(lower, p) < 0):
                return True
            continue
        w_lo = atom.lo if lower is None or compare(atom.lo, lower) >= 0 else lower
        w_hi = atom.hi if compare(atom.hi, upper) <= 0 else upper
        if compare(w_lo, w_hi) < 0 and compare(roundup(w_lo, atom.mu), w_hi) <= 0:
            return True
    return False


def sup_on(f: StepFunction, space: ClosedSet) -> Fraction:
    """Max of |f| over the set; 0 on the empty set."""
    if f.ambient != space.ambient:
        raise ValueError("function and set live on different ambient intervals")
    best = Fraction(0)
    for lower, upper, v in f.pieces():
        if abs(v) > best and _piece_meets(space, lower, upper):
            best = abs(v)
    return best


def grasberg_norm(f: StepFunction, space: ClosedSet) -> Fraction:
    """max over 0 <= n <= b of 2^n * sup of |f| on the (w^o * n)-th derivative."""
    best = Fraction(0)
    for n, level in enumerate(level_sets(space)):
        value = (2**n) * sup_on(f, level)
        if value > best:
            best = value
    return best


def phi(f: StepFunction, space: ClosedSet, eps: Rational) -> ClosedSet:
    """The critical set: at each level n, the points where 2^(n+1)|f| > |f| + eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    norm = grasberg_norm(f, space)
    atoms = []
    for n, level in enumerate(level_sets(space)):
        weight = 2 ** (n + 1)
        for lower, upper, v in f.pieces():
            if weight * abs(v) <= norm + eps:
                continue
            for atom in level.atoms:
                if isinstance(atom, Singleton):
                    p = atom.point
                    if compare(p, upper) <= 0 and (
                        lower is None or compare(lower, p) < 0
                    ):
                        atoms.append(Singleton(p))
                    continue
                w_lo = (
                    atom.lo
                    if lower is None or compare(atom.lo, lower) >= 0
                    else lower
                )
                w_hi = atom.hi if compare(atom.hi, upper) <= 0 else upper
                if compare(w_lo, w_hi) < 0:
                    atoms.append(Stratum(w_lo, w_hi, atom.mu))
    return ClosedSet(space.ambient, atoms)


# ---- lemma checkers ---------------------------------------------------------


@dataclass(frozen=True)
class KingReport:
    """Critical sets stay small: cb index of phi never exceeds w^o."""

    phi: ClosedSet
    cb_phi: Ordinal
    bound: Ordinal
    passed: bool

    def to_json(self) -> dict:
        return {
            "phi": closed_set_to_json(self.phi),
            "cbPhi": ordinal_to_json(self.cb_phi),
            "bound": ordinal_to_json(self.bound),
            "pass": self.passed,
        }


def check_king(f: StepFunction, space: ClosedSet, eps: Rational) -> KingReport:
    p = params(space)
    critical = phi(f, space, eps)
    cb_phi = cb_index(critical)
    bound = omega_pow(p.o)
    return KingReport(
        phi=critical, cb_phi=cb_phi, bound=bound, passed=compare(cb_phi, bound) <= 0
    )


@dataclass(frozen=True)
class QueenReport:
    """Perturbation bound: if g is small on phi(f, eps), then
    |f+g| <= max(|f| + eps, |f|/2 + eps/2 + |g|)."""

    lhs: Fraction
    rhs: Fraction
    hypothesis_lhs: Fraction
    hypothesis_rhs: Fraction
    hypothesis_ok: bool
    passed: bool

    def to_json(self) -> dict:
        return {
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "hypothesisLhs": str(self.hypothesis_lhs),
            "hypothesisRhs": str(self.hypothesis_rhs),
            "hypothesisOk": self.hypothesis_ok,
            "pass": self.passed,
        }


def check_queen(
    f: StepFunction, g: StepFunction, space: ClosedSet, eps: Rational
) -> QueenReport:
    eps = Fraction(eps)
    p = params(space)
    hyp_lhs = sup_on(g, phi(f, space, eps))
    hyp_rhs = eps / 2**p.b
    hypothesis_ok = hyp_lhs <= hyp_rhs
    lhs = grasberg_norm(step_add(f, g), space)
    nf = grasberg_norm(f, space)
    ng = grasberg_norm(g, space)
    rhs = max(nf + eps, nf / 2 + eps / 2 + ng)
    return QueenReport(
        lhs=lhs,
        rhs=rhs,
        hypothesis_lhs=hyp_lhs,
        hypothesis_rhs=hyp_rhs,
        hypothesis_ok=hypothesis_ok,
        passed=(not hypothesis_ok) or lhs <= rhs,
    )


# ---- fuzz generators --------------------------------------------------------


def random_ordinal(rng: random.Random, bound: Ordinal) -> Ordinal:
    """A structurally random ordinal in [0, bound]; deterministic per rng state.

    Builds a CNF with strictly decreasing exponents in one pass (each
    exponent is drawn at most equal to its predecessor and duplicates merge
    through add), then clamps to the bound.
    """
    if bound.is_zero():
        return ZERO
    roll = rng.random()
    if roll < 0.08:
        return ZERO
    if roll < 0.16:
        return bound
    exp_bound = leading_exponent(bound)
    acc = ZERO
    for _ in range(rng.randint(1, 3)):
        e = random_ordinal(rng, exp_bound)
        acc = add(acc, mul_nat(omega_pow(e), rng.randint(1, 9)))
        if e.is_zero():
            break
        exp_bound = e
    if compare(acc, bound) <= 0:
        return acc
    return bound


def random_step_function(
    space: ClosedSet,
    seed: int,
    max_pieces: int = 6,
    value_range: tuple[Rational, Rational] = (-1, 1),
) -> StepFunction:
    """Deterministic fuzz generator.

    Breakpoints are drawn from random CNF points below the ambient plus the
    landmark multiples at each derivative level, so that cut points land on
    derived sets often enough to make the norm levels matter.
    """
    if max_pieces < 1:
        raise ValueError("max_pieces must be >= 1")
    rng = random.Random(seed)
    ambient = space.ambient
    lo_v, hi_v = Fraction(value_range[0]), Fraction(value_range[1])
    if lo_v > hi_v:
        raise ValueError("empty value range")

    pool: set[Ordinal] = set()
    try:
        levels = level_sets(space)
    except ValueError:
        levels = (space,)
    for level in levels:
        for atom in level.atoms:
            if isinstance(atom, Singleton):
                pool.add(atom.point)
            else:
                first = roundup(atom.lo, atom.mu)
                pool.add(first)
                second = add(first, omega_pow(atom.mu))
                if compare(second, atom.hi) <= 0:
                    pool.add(second)
    for _ in range(3 * max_pieces + 4):
        pool.add(random_ordinal(rng, ambient))
    candidates = sorted(x for x in pool if compare(x, ambient) < 0)

    count = rng.randint(1, max_pieces)
    chosen = rng.sample(candidates, min(count - 1, len(candidates)))
    breakpoints = sorted(set(chosen)) + [ambient]
    span = hi_v - lo_v
    values = []
    for _ in breakpoints:
        den = rng.randint(1, 8)
        values.append(lo_v + span * Fraction(rng.randint(0, den), den))
    return StepFunction(ambient, breakpoints, values)


# ---- serialization ----------------------------------------------------------


def step_function_to_json(f: StepFunction) -> dict:
    return {
        "ambient": ordinal_to_json(f.ambient),
        "pieces": [
            {"upTo": ordinal_to_json(b), "value": str(v)}
            for b, v in zip(f.breakpoints, f.values)
        ],
    }


def step_function_from_json(data: dict) -> StepFunction:
    ambient = ordinal_from_json(data["ambient"])
    bps = [ordinal_from_json(piece["upTo"]) for piece in data["pieces"]]
    vals = [Fraction(piece["value"]) for piece in data["pieces"]]
    return StepFunction(ambient, bps, vals)
