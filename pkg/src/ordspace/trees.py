"""Finite well-founded trees and the weakly-null family contract.

A tree is a finite set of nodes with a partial parent map; nodes without a
parent hang off an implicit root that is never itself a member.  Pruning
removes the maximal nodes (those without children), rank is the number of
prunings needed to empty the tree, and stripping keeps what pruning would
eventually remove.  Heights are computed once by peeling leaves level by
level, so none of this recurses on tree depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Optional

from .ordinal import ONE, Ordinal, compare, mul_nat
from .topology import ClosedSet
from .grasberg import StepFunction, constant, indicator, step_function_from_json

Node = Hashable


class FiniteTree:
    """Immutable finite tree; construct from a node -> parent mapping.

    A parent of None marks a child of the implicit root.  The mapping's
    insertion order is kept for deterministic iteration and serialization.
    """

    __slots__ = ("_parent", "_children", "_height", "_hash")

    def __init__(self, parent: Mapping[Node, Optional[Node]]):
        parent_map: dict[Node, Optional[Node]] = dict(parent)
        for node, par in parent_map.items():
            if node is None:
                raise ValueError("None is reserved for the implicit root")
            if par is not None and par not in parent_map:
                raise ValueError(f"parent {par!r} of {node!r} is not a node")
        children: dict[Node, list[Node]] = {node: [] for node in parent_map}
        for node, par in parent_map.items():
            if par is not None:
                children[par].append(node)

        pending = {node: len(kids) for node, kids in children.items()}
        frontier = [node for node in parent_map if pending[node] == 0]
        height: dict[Node, int] = {}
        level = 1
        while frontier:
            nxt = []
            for node in frontier:
                height[node] = level
                par = parent_map[node]
                if par is not None:
                    pending[par] -= 1
                    if pending[par] == 0:
                        nxt.append(par)
            frontier = nxt
            level += 1
        if len(height) != len(parent_map):
            raise ValueError("parent links contain a cycle")

        object.__setattr__(self, "_parent", parent_map)
        object.__setattr__(self, "_children", {n: tuple(k) for n, k in children.items()})
        object.__setattr__(self, "_height", height)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteTree is immutable")

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._parent)

    def parent(self, node: Node) -> Optional[Node]:
        return self._parent[node]

    def children(self, node: Node) -> tuple[Node, ...]:
        return self._children[node]

    def height(self, node: Node) -> int:
        """1 for maximal nodes, else 1 + max height among children."""
        return self._height[node]

    def __len__(self) -> int:
        return len(self._parent)

    def __contains__(self, node: Node) -> bool:
        return node in self._parent

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteTree):
            return NotImplemented
        return self._parent == other._parent

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash(frozenset(self._parent.items()))
            )
        return self._hash

    def __repr__(self) -> str:
        return f"FiniteTree({len(self)} nodes, rank {rank(self)})"


EMPTY_TREE = FiniteTree({})


def max_nodes(tree: FiniteTree) -> tuple[Node, ...]:
    """The maximal nodes: those without children."""
    return tuple(n for n in tree.nodes if not tree.children(n))


def _restrict(tree: FiniteTree, keep: set) -> FiniteTree:
    new_parent: dict[Node, Optional[Node]] = {}
    for node in tree.nodes:
        if node in keep:
            par = tree.parent(node)
            new_parent[node] = par if par in keep else None
    return FiniteTree(new_parent)


def prune(tree: FiniteTree) -> FiniteTree:
    return iterated_prune(tree, 1)


def iterated_prune(tree: FiniteTree, k: int) -> FiniteTree:
    """Remove maximal nodes k times; the survivors are the nodes of height > k."""
    if k < 0:
        raise ValueError("prune count must be non-negative")
    return _restrict(tree, {n for n in tree.nodes if tree.height(n) > k})


def rank(tree: FiniteTree) -> int:
    """Least k with iterated_prune(tree, k) empty; the longest chain length."""
    return max((tree.height(n) for n in tree.nodes), default=0)


def strip(tree: FiniteTree, k: int) -> FiniteTree:
    """The part pruning would remove first: tree minus iterated_prune(tree, k)."""
    if k < 0 or k > rank(tree):
        raise ValueError(f"k must lie in [0, rank] = [0, {rank(tree)}]")
    return _restrict(tree, {n for n in tree.nodes if tree.height(n) <= k})


def subtree_above(tree: FiniteTree, s: Node) -> FiniteTree:
    """The nodes strictly above s, re-rooted so s's children become top-level."""
    if s not in tree:
        raise ValueError(f"{s!r} is not a node of the tree")
    new_parent: dict[Node, Optional[Node]] = {}
    stack = [(child, None) for child in reversed(tree.children(s))]
    while stack:
        node, par = stack.pop()
        new_parent[node] = par
        stack.extend((child, node) for child in reversed(tree.children(node)))
    return FiniteTree(new_parent)


@dataclass(frozen=True)
class FactReport:
    fact: str
    k: int
    passed: bool
    failures: tuple[tuple[Optional[Node], int], ...]

    def to_json(self) -> dict:
        return {
            "fact": self.fact,
            "k": self.k,
            "pass": self.passed,
            "failures": [
                {"witness": None if w is None else _node_to_json(w), "rank": r}
                for w, r in self.failures
            ],
        }


def check_fact_i(tree: FiniteTree, k: int) -> FactReport:
    """Stripping at k leaves a tree of rank exactly k."""
    actual = rank(strip(tree, k))
    failures = () if actual == k else ((None, actual),)
    return FactReport(fact="i", k=k, passed=actual == k, failures=failures)


def check_fact_ii(tree: FiniteTree, k: int) -> FactReport:
    """Every maximal node of the k-th prune carries a rank-k subtree above it."""
    if k < 0 or k > rank(tree):
        raise ValueError(f"k must lie in [0, rank] = [0, {rank(tree)}]")
    failures = []
    for s in max_nodes(iterated_prune(tree, k)):
        actual = rank(subtree_above(tree, s))
        if actual != k:
            failures.append((s, actual))
    return FactReport(fact="ii", k=k, passed=not failures, failures=tuple(failures))


# ---- serialization ----------------------------------------------------------


def tree_to_text(tree: FiniteTree) -> str:
    lines = []
    for node in tree.nodes:
        par = tree.parent(node)
        lines.append(f"{node} {'-' if par is None else par}")
    return "\n".join(lines) + ("\n" if lines else "")


def tree_from_text(text: str) -> FiniteTree:
    entries: dict[str, Optional[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'id parent-id' or 'id -'")
        node, par = parts
        if node in entries:
            raise ValueError(f"line {lineno}: duplicate node {node!r}")
        entries[node] = None if par == "-" else par
    return FiniteTree(entries)


def _node_to_json(node: Node):
    if isinstance(node, (str, int)):
        return node
    return str(node)


def tree_to_json(tree: FiniteTree) -> dict:
    return {
        "nodes": [
            {
                "id": _node_to_json(n),
                "parent": None if tree.parent(n) is None else _node_to_json(tree.parent(n)),
            }
            for n in tree.nodes
        ]
    }


def tree_from_json(data: dict) -> FiniteTree:
    entries: dict[Node, Optional[Node]] = {}
    for item in data["nodes"]:
        node = item["id"]
        if node in entries:
            raise ValueError(f"duplicate node {node!r}")
        entries[node] = item.get("parent")
    return FiniteTree(entries)


# ---- weakly null families ---------------------------------------------------


class FamilyContractError(RuntimeError):
    """A family failed its pointwise-null or norm-bound contract."""

    def __init__(self, path: tuple[int, ...], point, message: str):
        self.path = tuple(path)
        self.point = point
        detail = f"family contract violated at node {list(self.path)}"
        if point is not None:
            detail += f", witness point {point}"
        super().__init__(f"{detail}: {message}")


@dataclass(frozen=True)
class WeaklyNullFamily:
    """Step functions indexed by paths of child indices.

    Contract: each function is bounded by 1 in sup norm on the space, and at
    every node the children's values die out pointwise, i.e. for each point of
    the space and each positive threshold, all but finitely many children stay
    below the threshold there.  The second half cannot be certified by any
    finite amount of evaluation, so extraction searches children up to a
    budget (search_limit if set, else the caller's) and reports a contract
    violation when the budget runs out.
    """

    space: ClosedSet
    at: Callable[[tuple[int, ...]], StepFunction]
    search_limit: Optional[int] = None


def marching_indicators(space: ClosedSet, step: Ordinal = ONE) -> WeaklyNullFamily:
    """Indicators of the consecutive windows (step*(k+1), step*(k+2)].

    The window marches right as the child index k grows, so on any fixed
    finite point set the children are eventually zero.  Windows are clamped
    to the ambient interval; the path's last index alone decides the window.
    """
    if step.is_zero():
        raise ValueError("ladder step must be a positive ordinal")
    ambient = space.ambient

    def clamp(x: Ordinal) -> Ordinal:
        return x if compare(x, ambient) <= 0 else ambient

    def at(path: tuple[int, ...]) -> StepFunction:
        if not path:
            return constant(ambient, 0)
        k = path[-1]
        return indicator(ambient, clamp(mul_nat(step, k + 1)), clamp(mul_nat(step, k + 2)))

    return WeaklyNullFamily(space=space, at=at)


def zero_family(space: ClosedSet) -> WeaklyNullFamily:
    zero = constant(space.ambient, 0)
    return WeaklyNullFamily(space=space, at=lambda path: zero)


def family_from_table(space: ClosedSet, table: dict) -> WeaklyNullFamily:
    """Family given by a finite table {path -> step function}.

    The table maps explicit paths to functions; unlisted paths fall back to
    the optional default, else to zero.  A cutoff is required: it caps the
    child search, since a finite table cannot promise anything beyond it.
    """
    if "cutoff" not in table:
        raise ValueError("family table requires an explicit 'cutoff'")
    cutoff = int(table["cutoff"])
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    entries: dict[tuple[int, ...], StepFunction] = {}
    for item in table.get("entries", []):
        path = tuple(int(k) for k in item["path"])
        fn = step_function_from_json(item["fn"])
        if fn.ambient != space.ambient:
            raise ValueError(f"entry {list(path)} lives on a different ambient interval")
        entries[path] = fn
    default: Optional[StepFunction] = None
    if table.get("default") is not None:
        default = step_function_from_json(table["default"])
        if default.ambient != space.ambient:
            raise ValueError("default function lives on a different ambient interval")
    zero = constant(space.ambient, 0)

    def at(path: tuple[int, ...]) -> StepFunction:
        fn = entries.get(tuple(path))
        if fn is not None:
            return fn
        return default if default is not None else zero

    return WeaklyNullFamily(space=space, at=at, search_limit=cutoff)
