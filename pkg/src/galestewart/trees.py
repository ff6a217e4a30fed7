"""Finite sequences over an alphabet and bounded-depth prefix-closed trees.

Nodes are plain tuples of letter indices; ``()`` is the root.  A tree stores
every node explicitly up to its depth bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .caps import check_cap

Node = tuple[int, ...]
EMPTY: Node = ()


class InvalidTree(ValueError):
    pass


def is_prefix(x: Node, y: Node) -> bool:
    return len(x) <= len(y) and y[: len(x)] == x


def node_key(x: Node) -> tuple[int, Node]:
    """Canonical node order: by length, then lexicographically."""
    return (len(x), x)


def node_str(x: Node) -> str:
    return "".join(str(a) for a in x) if x else "ε"


@dataclass(frozen=True)
class Tree:
    alphabet_size: int
    depth_bound: int
    nodes: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise InvalidTree("alphabet size must be at least 1")
        if self.depth_bound < 0:
            raise InvalidTree("depth bound must be nonnegative")
        if not isinstance(self.nodes, frozenset):
            object.__setattr__(self, "nodes", frozenset(self.nodes))
        for x in self.nodes:
            if len(x) > self.depth_bound:
                raise InvalidTree(f"node {node_str(x)} deeper than {self.depth_bound}")
            if any(not 0 <= a < self.alphabet_size for a in x):
                raise InvalidTree(f"node {node_str(x)} leaves the alphabet")
            if x and x[:-1] not in self.nodes:
                raise InvalidTree(f"node {node_str(x)} has no parent in the tree")

    @classmethod
    def trusted(cls, alphabet_size: int, depth_bound: int, nodes: Iterable[Node]) -> Tree:
        """Build without re-validating; callers guarantee the invariants."""
        t = object.__new__(cls)
        object.__setattr__(t, "alphabet_size", alphabet_size)
        object.__setattr__(t, "depth_bound", depth_bound)
        object.__setattr__(t, "nodes", frozenset(nodes))
        return t

    def __contains__(self, x: Node) -> bool:
        return x in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self.sorted_nodes)

    def is_empty(self) -> bool:
        return not self.nodes

    @cached_property
    def sorted_nodes(self) -> tuple[Node, ...]:
        return tuple(sorted(self.nodes, key=node_key))

    @cached_property
    def sort_key(self) -> tuple:
        return tuple(node_key(x) for x in self.sorted_nodes)

    @cached_property
    def _children(self) -> dict[Node, tuple[int, ...]]:
        kids: dict[Node, list[int]] = {x: [] for x in self.nodes}
        for x in self.nodes:
            if x:
                kids[x[:-1]].append(x[-1])
        return {x: tuple(sorted(v)) for x, v in kids.items()}

    def children(self, x: Node) -> tuple[int, ...]:
        """Letters a with x·a in the tree, ascending."""
        return self._children.get(x, ())

    def level(self, n: int) -> list[Node]:
        return [x for x in self.sorted_nodes if len(x) == n]

    def leaves_at(self, depth: int) -> list[Node]:
        return self.level(depth)

    def __lt__(self, other: Tree) -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        shown = ",".join(node_str(x) for x in self.sorted_nodes[:12])
        more = "" if len(self.nodes) <= 12 else f",…(+{len(self.nodes) - 12})"
        return f"Tree(a={self.alphabet_size}, d={self.depth_bound}, {{{shown}{more}}})"


def full_tree(alphabet_size: int, depth: int) -> Tree:
    nodes = [
        tuple(w)
        for n in range(depth + 1)
        for w in itertools.product(range(alphabet_size), repeat=n)
    ]
    return Tree.trusted(alphabet_size, depth, nodes)


def tree_from_nodes(alphabet_size: int, depth_bound: int, nodes: Iterable[Node]) -> Tree:
    return Tree(alphabet_size, depth_bound, frozenset(tuple(x) for x in nodes))


def sub_at(t: Tree, x: Node) -> Tree:
    """The tree of continuations ``{y | x·y ∈ t}``."""
    depth = max(t.depth_bound - len(x), 0)
    if x not in t.nodes:
        return Tree.trusted(t.alphabet_size, depth, ())
    n = len(x)
    return Tree.trusted(t.alphabet_size, depth, (y[n:] for y in t.nodes if y[:n] == x))


def level_restrict(t: Tree, n: int) -> Tree:
    return Tree.trusted(t.alphabet_size, min(n, t.depth_bound), (x for x in t.nodes if len(x) <= n))


def is_pruned_to_horizon(t: Tree, horizon: int) -> bool:
    """Nonempty, and every node shorter than the horizon has a child."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if t.depth_bound < horizon:
        raise ValueError(f"tree depth bound {t.depth_bound} below horizon {horizon}")
    if not t.nodes:
        return False
    return all(t.children(x) for x in t.nodes if len(x) < horizon)


def unpruned_nodes(t: Tree, horizon: int) -> list[Node]:
    return [x for x in t.sorted_nodes if len(x) < horizon and not t.children(x)]


def count_trees(alphabet_size: int, depth: int) -> int:
    count = 2
    for _ in range(depth):
        count = 1 + count**alphabet_size
    return count


def enumerate_trees(alphabet_size: int, depth: int, cap: int | None = None) -> list[Tree]:
    """Every tree (the empty one included) with the given depth bound, in canonical order."""
    check_cap(f"trees over {alphabet_size} letters of depth {depth}", count_trees(alphabet_size, depth), cap)

    def grow(d: int) -> list[frozenset]:
        # node sets of nonempty trees of depth <= d, rooted at ε
        if d == 0:
            return [frozenset([EMPTY])]
        below = [frozenset()] + grow(d - 1)
        out = []
        for parts in itertools.product(below, repeat=alphabet_size):
            nodes = {EMPTY}
            for a, part in enumerate(parts):
                nodes.update((a,) + y for y in part)
            out.append(frozenset(nodes))
        return out

    trees = [Tree.trusted(alphabet_size, depth, ())]
    trees += [Tree.trusted(alphabet_size, depth, ns) for ns in grow(depth)]
    trees.sort(key=lambda t: t.sort_key)
    return trees


def cylinder_contains(x: Node, leaf: Node) -> bool:
    """Whether the branch through ``leaf`` lies in the basic open set of ``x``."""
    if len(x) > len(leaf):
        raise ValueError("cylinder node longer than the leaf")
    return leaf[: len(x)] == x


def parse_node(s: str) -> Node:
    """Digit-string node syntax used by the file formats; '' is the root."""
    if s in ("", "ε"):
        return EMPTY
    if not s.isdigit():
        raise ValueError(f"bad node string {s!r}")
    return tuple(int(c) for c in s)


def format_node(x: Node) -> str:
    return "".join(str(a) for a in x)
