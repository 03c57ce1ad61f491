"""Szlenk index formulas, Dirac-set derivations, and small convex combinations.

The index of C(K) for countable compact K is omega to the least exponent xi
with cb_index(K) <= omega^xi.  For an interval [0, z] with z >= omega the
exponent collapses to tower_index(z) + 1.

extract_small_combination runs the constructive recursion that witnesses the
upper bound in the finite-height case: walk down a branch of the implicit
tree of child-index paths, at each stage adding one family function that is
tiny on the critical set of the running sum, and certify exact rational norm
bounds at every stage.  Heights with critical sets beyond finite are out of
scope here and rejected up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Optional, Union

from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    compare,
    format_ordinal,
    leading_exponent,
    omega_pow,
    predecessor,
    to_json as ordinal_to_json,
    tower_index,
)
from .topology import (
    ClosedSet,
    cb_index,
    finite_points,
    interval,
    is_empty,
    iterated_derivative,
)
from .grasberg import (
    StepFunction,
    constant,
    grasberg_norm,
    params,
    phi,
    step_add,
    step_scale,
    step_function_to_json,
    sup_on,
    value_at,
)
from .trees import FamilyContractError, WeaklyNullFamily

Rational = Union[Fraction, int, str]


@dataclass(frozen=True)
class SzlenkResult:
    index: Ordinal
    exponent: Ordinal
    cb: Ordinal

    def to_json(self) -> dict:
        return {
            "index": ordinal_to_json(self.index),
            "exponent": ordinal_to_json(self.exponent),
            "cb": ordinal_to_json(self.cb),
            "indexText": format_ordinal(self.index),
            "cbText": format_ordinal(self.cb),
        }


def index_of_CK(space: ClosedSet) -> SzlenkResult:
    """Index of C(K): omega to the least exponent xi with cb_index <= omega^xi."""
    if is_empty(space):
        raise ValueError("the space must be non-empty")
    cb = cb_index(space)
    if compare(cb, ONE) <= 0:
        exponent = ZERO
    else:
        lam = predecessor(cb)
        exponent = add(leading_exponent(lam), ONE)
    return SzlenkResult(index=omega_pow(exponent), exponent=exponent, cb=cb)


def index_of_interval(z: Ordinal) -> SzlenkResult:
    """Index of C([0, z]) for infinite z, via the double leading exponent."""
    if compare(z, omega_pow(ONE)) < 0:
        raise ValueError("z must be at least w; use index_of_CK for finite intervals")
    exponent = add(tower_index(z), ONE)
    return SzlenkResult(
        index=omega_pow(exponent), exponent=exponent, cb=cb_index(interval(z))
    )


def dirac_derivative(space: ClosedSet, eps: Rational, xi: Ordinal) -> ClosedSet:
    """Derive the set of point evaluations {delta_p : p in space} xi times.

    Distinct point evaluations are at distance exactly 2 in C(K)*, so for
    0 < eps < 2 a point evaluation survives one derivation exactly when its
    base point is a limit point of the space, and the derivation collapses to
    the topological derivative.  For eps >= 2 nothing survives even one step.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if xi.is_zero():
        return space
    if eps >= 2:
        return ClosedSet(space.ambient, ())
    return iterated_derivative(space, xi)


# ---- extraction -------------------------------------------------------------


class CertificateError(ValueError):
    """An extraction certificate failed re-verification."""


@dataclass(frozen=True)
class ExtractionCertificate:
    """Transcript of one extraction run; every field is exact.

    branch[m] is the path after stage m+1; blocks[m] the function added
    there; stage_norms[m] the Grasberg norm of the running scaled sum.
    """

    branch: tuple[tuple[int, ...], ...]
    blocks: tuple[StepFunction, ...]
    stage_norms: tuple[Fraction, ...]
    eps: Fraction
    n: int
    final: StepFunction
    final_norm: Fraction
    delta: Fraction

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "eps": str(self.eps),
            "branch": [list(path) for path in self.branch],
            "stageNorms": [str(x) for x in self.stage_norms],
            "finalNorm": str(self.final_norm),
        }

    def verify(self, space: ClosedSet) -> bool:
        """Recompute everything the certificate claims; raise on any mismatch."""
        p = params(space)
        if not p.o.is_zero():
            raise CertificateError("certificate requires a space of finite height")
        b = p.b
        budget = Fraction(2 ** (2 + b))
        if self.n * self.delta <= budget:
            raise CertificateError("n fails n*delta > 2^(2+b)")
        if (self.n - 1) * self.delta > budget:
            raise CertificateError("n is not minimal")
        if self.eps != Fraction(1, 2 * self.n):
            raise CertificateError("eps does not follow the 1/(2n) rule")
        if (1 + self.eps) ** self.n >= 2:
            raise CertificateError("(1+eps)^n must stay below 2")
        if not (len(self.branch) == len(self.blocks) == len(self.stage_norms) == self.n):
            raise CertificateError("stage count mismatch")
        for m, path in enumerate(self.branch):
            prefix = self.branch[m - 1] if m else ()
            if len(path) != m + 1 or path[:m] != prefix:
                raise CertificateError("branch is not a chain of extending paths")
        scale = Fraction(1, 2 ** (1 + b))
        threshold = self.eps / 2**b
        running = constant(space.ambient, 0)
        for m, block in enumerate(self.blocks):
            if sup_on(block, space) > 1:
                raise CertificateError(f"block {m + 1} leaves the unit ball")
            if sup_on(block, phi(running, space, self.eps)) >= threshold:
                raise CertificateError(f"block {m + 1} is not small on the critical set")
            running = step_add(running, step_scale(block, scale))
            norm = grasberg_norm(running, space)
            if norm != self.stage_norms[m]:
                raise CertificateError(f"stage norm {m + 1} does not recompute")
            if norm > (1 + self.eps) ** m:
                raise CertificateError(f"stage bound fails at stage {m + 1}")
        final = step_scale(reduce(step_add, self.blocks), Fraction(1, self.n))
        if final != self.final:
            raise CertificateError("final function does not recompute")
        final_norm = grasberg_norm(final, space)
        if final_norm != self.final_norm:
            raise CertificateError("final norm does not recompute")
        if final_norm != Fraction(2 ** (1 + b), self.n) * self.stage_norms[-1]:
            raise CertificateError("homogeneity identity fails")
        if final_norm >= self.delta:
            raise CertificateError("final norm is not below delta")
        return True


def extract_small_combination(
    space: ClosedSet,
    family: WeaklyNullFamily,
    delta: Rational,
    max_probes: int = 10**6,
) -> ExtractionCertificate:
    """Walk one branch, adding family functions small on each critical set.

    At stage m the running sum g carries the previously chosen blocks with
    weight 1/2^(1+b); its critical set is finite (the king bound at finite
    height), so children of the current node are probed in index order until
    one is below eps/2^b everywhere on it.  The average of the chosen blocks
    then has Grasberg norm below delta, by the exact chain
    |final| = (2^(1+b)/n)|g| <= 2^(1+b)(1+eps)^(n-1)/n < 2^(2+b)/n < delta.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if family.space != space:
        raise ValueError("family is declared on a different space")
    p = params(space)
    if not p.o.is_zero():
        raise ValueError(
            "extraction supports only spaces of finite height "
            f"(cb a finite successor); this space has o = {format_ordinal(p.o)}"
        )
    b = p.b
    n = int(Fraction(2 ** (2 + b)) / delta) + 1
    eps = Fraction(1, 2 * n)
    if (1 + eps) ** n >= 2:
        raise AssertionError("the eps = 1/(2n) rule must keep (1+eps)^n below 2")
    threshold = eps / 2**b
    scale = Fraction(1, 2 ** (1 + b))
    budget = max_probes if family.search_limit is None else min(max_probes, family.search_limit)

    running = constant(space.ambient, 0)
    path: tuple[int, ...] = ()
    branch: list[tuple[int, ...]] = []
    blocks: list[StepFunction] = []
    stage_norms: list[Fraction] = []

    for stage in range(1, n + 1):
        critical = phi(running, space, eps)
        points = finite_points(critical)
        if points is None:
            raise AssertionError("critical set must be finite at finite height")
        chosen: Optional[StepFunction] = None
        last_worst = None
        for k in range(budget):
            candidate = family.at(path + (k,))
            if candidate.ambient != space.ambient:
                raise FamilyContractError(
                    path + (k,), None, "function lives on a different ambient interval"
                )
            if sup_on(candidate, space) > 1:
                raise FamilyContractError(path + (k,), None, "function exceeds the unit ball")
            if sup_on(candidate, critical) < threshold:
                chosen = candidate
                path = path + (k,)
                break
            last_worst = max(points, key=lambda q: abs(value_at(candidate, q)))
        if chosen is None:
            raise FamilyContractError(
                path,
                last_worst,
                f"no child fell below {threshold} on the critical set "
                f"within {budget} probes",
            )
        branch.append(path)
        blocks.append(chosen)
        running = step_add(running, step_scale(chosen, scale))
        norm = grasberg_norm(running, space)
        if norm > (1 + eps) ** (stage - 1):
            raise AssertionError(f"stage bound failed at stage {stage}")
        stage_norms.append(norm)

    final = step_scale(reduce(step_add, blocks), Fraction(1, n))
    final_norm = grasberg_norm(final, space)
    certificate = ExtractionCertificate(
        branch=tuple(branch),
        blocks=tuple(blocks),
        stage_norms=tuple(stage_norms),
        eps=eps,
        n=n,
        final=final,
        final_norm=final_norm,
        delta=delta,
    )
    certificate.verify(space)
    return certificate
