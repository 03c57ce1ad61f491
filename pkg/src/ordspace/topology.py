"""Compact ordinal spaces [0, z] and their closed subsets.

A closed set is a finite union of atoms: singletons and strata.  The
stratum with window (lo, hi] and level mu denotes the multiples of w^mu
inside (lo, hi].  This algebra is closed under the Cantor-Bendixson
derivative: a singleton is isolated and vanishes, while the derivative of
a stratum is the same window one level up (mu + 1), because a multiple of
w^mu is a limit of smaller multiples exactly when it is a multiple of
w^(mu+1).  Iterating, the xi-th derivative of a stratum is the stratum at
level mu + xi, with set intersections realizing the limit stages exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

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
    left_subtract,
    omega_mul,
    omega_pow,
    to_json as ordinal_to_json,
)


@dataclass(frozen=True)
class Singleton:
    point: Ordinal


@dataclass(frozen=True)
class Stratum:
    """Multiples of w^mu in the window (lo, hi]; requires lo < hi."""

    lo: Ordinal
    hi: Ordinal
    mu: Ordinal

    def __post_init__(self) -> None:
        if compare(self.lo, self.hi) >= 0:
            raise ValueError("stratum window needs lo < hi")


Atom = Union[Singleton, Stratum]


def roundup(lo: Ordinal, nu: Ordinal) -> Ordinal:
    """Least multiple of w^nu strictly greater than lo."""
    quotient, _ = divide_by_omega_pow(lo, nu)
    return omega_mul(nu, add(quotient, ONE))


def stratum_nonempty(lo: Ordinal, hi: Ordinal, mu: Ordinal) -> bool:
    return compare(lo, hi) < 0 and compare(roundup(lo, mu), hi) <= 0


def max_stratum_exponent(lo: Ordinal, hi: Ordinal) -> Ordinal:
    """Largest nu such that (lo, hi] contains a multiple of w^nu.

    The valid nu are downward closed (multiples of w^(nu+1) are multiples
    of w^nu), so the maximum is well defined.  Computed by stripping the
    common CNF prefix of lo and hi; once they first differ, the leading
    exponent of the remaining part of hi is the answer.
    """
    if compare(lo, hi) >= 0:
        raise ValueError("max_stratum_exponent needs lo < hi")
    i = 0
    while i < len(lo.terms) and lo.terms[i] == hi.terms[i]:
        i += 1
    if i == len(lo.terms):
        return hi.terms[i][0]
    e_lo, e_hi = lo.terms[i][0], hi.terms[i][0]
    if compare(e_lo, e_hi) < 0:
        return e_hi
    # same exponent, so the coefficients differ and lo's is smaller
    return e_hi


def _stratum_contains(s: Stratum, g: Ordinal) -> bool:
    if compare(g, s.lo) <= 0 or compare(g, s.hi) > 0:
        return False
    _, rem = divide_by_omega_pow(g, s.mu)
    return rem.is_zero()


def _atom_sort_key(atom: Atom):
    if isinstance(atom, Singleton):
        return (atom.point, atom.point, ZERO, 0)
    return (atom.lo, atom.hi, atom.mu, 1)


class ClosedSet:
    """A closed subset of [0, ambient], normalized at construction.

    Normalization drops empty strata, merges same-level strata whose
    windows overlap or abut, drops atoms contained in another stratum,
    and rewrites one-point strata as singletons, so that equal
    construction paths produce identical representations.
    """

    __slots__ = ("ambient", "atoms", "_hash")

    def __init__(self, ambient: Ordinal, atoms: Iterable[Atom] = ()):
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "atoms", _normalize(ambient, atoms))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("ClosedSet is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClosedSet):
            return NotImplemented
        return self.ambient == other.ambient and self.atoms == other.atoms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.ambient, self.atoms)))
        return self._hash

    def __repr__(self) -> str:
        return f"ClosedSet(ambient={format_ordinal(self.ambient)}, {format_closed_set(self)})"


def _normalize(ambient: Ordinal, atoms: Iterable[Atom]) -> tuple[Atom, ...]:
    singles: set[Ordinal] = set()
    strata: list[Stratum] = []
    for atom in atoms:
        if isinstance(atom, Singleton):
            if compare(atom.point, ambient) > 0:
                raise ValueError(f"point {atom.point} outside [0, {ambient}]")
            singles.add(atom.point)
        elif isinstance(atom, Stratum):
            if compare(atom.lo, atom.hi) >= 0:
                raise ValueError("stratum requires lo < hi")
            if compare(atom.hi, ambient) > 0:
                raise ValueError(f"stratum reaches {atom.hi}, outside [0, {ambient}]")
            if stratum_nonempty(atom.lo, atom.hi, atom.mu):
                strata.append(atom)
        else:
            raise TypeError(f"not an atom: {atom!r}")

    # merge same-level strata with overlapping or abutting windows
    changed = True
    while changed:
        changed = False
        for i in range(len(strata)):
            for j in range(i + 1, len(strata)):
                a, b = strata[i], strata[j]
                if a.mu != b.mu:
                    continue
                if compare(a.hi, b.lo) < 0 or compare(b.hi, a.lo) < 0:
                    continue
                lo = a.lo if compare(a.lo, b.lo) <= 0 else b.lo
                hi = a.hi if compare(a.hi, b.hi) >= 0 else b.hi
                strata[i] = Stratum(lo, hi, a.mu)
                del strata[j]
                changed = True
                break
            if changed:
                break

    # drop strata whose points all lie in a coarser stratum
    kept: list[Stratum] = []
    for i, s in enumerate(strata):
        covered = any(
            k != i
            and compare(o.lo, s.lo) <= 0
            and compare(s.hi, o.hi) <= 0
            and compare(o.mu, s.mu) <= 0
            and not (o.lo == s.lo and o.hi == s.hi and o.mu == s.mu and k > i)
            for k, o in enumerate(strata)
            if k != i
        )
        if not covered:
            kept.append(s)

    # rewrite one-point strata as singletons
    final_strata: list[Stratum] = []
    for s in kept:
        first = roundup(s.lo, s.mu)
        if compare(add(first, omega_pow(s.mu)), s.hi) > 0:
            singles.add(first)
        else:
            final_strata.append(s)

    points = [p for p in singles if not any(_stratum_contains(s, p) for s in final_strata)]
    result: list[Atom] = [Singleton(p) for p in points]
    result.extend(final_strata)
    result.sort(key=_atom_sort_key)
    return tuple(result)


def interval(z: Ordinal) -> ClosedSet:
    """The full space [0, z]."""
    if z.is_zero():
        return ClosedSet(z, (Singleton(ZERO),))
    return ClosedSet(z, (Singleton(ZERO), Stratum(ZERO, z, ZERO)))


def contains(space: ClosedSet, g: Ordinal) -> bool:
    if compare(g, space.ambient) > 0:
        raise ValueError(f"point {g} outside [0, {space.ambient}]")
    for atom in space.atoms:
        if isinstance(atom, Singleton):
            if atom.point == g:
                return True
        elif _stratum_contains(atom, g):
            return True
    return False


def is_empty(space: ClosedSet) -> bool:
    return not space.atoms


def derivative(space: ClosedSet) -> ClosedSet:
    """Cantor-Bendixson derivative: the points that are limits of the set."""
    atoms = [
        Stratum(a.lo, a.hi, add(a.mu, ONE))
        for a in space.atoms
        if isinstance(a, Stratum)
    ]
    return ClosedSet(space.ambient, atoms)


def iterated_derivative(space: ClosedSet, xi: Ordinal) -> ClosedSet:
    """The xi-th derivative, in closed form (limit stages included)."""
    if xi.is_zero():
        return space
    atoms = [
        Stratum(a.lo, a.hi, add(a.mu, xi))
        for a in space.atoms
        if isinstance(a, Stratum)
    ]
    return ClosedSet(space.ambient, atoms)


def atom_height(atom: Atom) -> Ordinal:
    """Least xi wiping out the atom under iterated derivatives."""
    if isinstance(atom, Singleton):
        return ONE
    top = max_stratum_exponent(atom.lo, atom.hi)
    return add(left_subtract(atom.mu, top), ONE)


def cb_index(space: ClosedSet) -> Ordinal:
    """Least xi with the xi-th derivative empty; 0 for the empty set."""
    best = ZERO
    for atom in space.atoms:
        h = atom_height(atom)
        if compare(h, best) > 0:
            best = h
    return best


def finite_points(space: ClosedSet) -> Optional[tuple[Ordinal, ...]]:
    """All points of the set if it is finite, else None.

    A stratum is finite exactly when its window holds no multiple of
    w^(mu+1), i.e. when its height is 1.
    """
    points: set[Ordinal] = set()
    for atom in space.atoms:
        if isinstance(atom, Singleton):
            points.add(atom.point)
            continue
        if compare(roundup(atom.lo, add(atom.mu, ONE)), atom.hi) <= 0:
            return None
        step = omega_pow(atom.mu)
        m = roundup(atom.lo, atom.mu)
        while compare(m, atom.hi) <= 0:
            points.add(m)
            m = add(m, step)
    return tuple(sorted(points))


# ---- serialization ----------------------------------------------------------


def format_closed_set(space: ClosedSet) -> str:
    if not space.atoms:
        return "{}"
    parts = []
    for atom in space.atoms:
        if isinstance(atom, Singleton):
            parts.append(f"{{{format_ordinal(atom.point)}}}")
        else:
            parts.append(
                f"mult(w^({format_ordinal(atom.mu)})) in "
                f"({format_ordinal(atom.lo)}, {format_ordinal(atom.hi)}]"
            )
    return " u ".join(parts)


def to_json(space: ClosedSet) -> dict:
    atoms = []
    for atom in space.atoms:
        if isinstance(atom, Singleton):
            atoms.append({"singleton": ordinal_to_json(atom.point)})
        else:
            atoms.append(
                {
                    "lo": ordinal_to_json(atom.lo),
                    "hi": ordinal_to_json(atom.hi),
                    "mu": ordinal_to_json(atom.mu),
                }
            )
    return {"ambient": ordinal_to_json(space.ambient), "atoms": atoms}


def from_json(data: dict) -> ClosedSet:
    ambient = ordinal_from_json(data["ambient"])
    atoms: list[Atom] = []
    for item in data["atoms"]:
        if "singleton" in item:
            atoms.append(Singleton(ordinal_from_json(item["singleton"])))
        else:
            atoms.append(
                Stratum(
                    ordinal_from_json(item["lo"]),
                    ordinal_from_json(item["hi"]),
                    ordinal_from_json(item["mu"]),
                )
            )
    return ClosedSet(ambient, atoms)
