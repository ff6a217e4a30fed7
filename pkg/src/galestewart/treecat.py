"""Trees with length-preserving isotone maps: morphisms, fixing levels, sequential limits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .trees import Node, Tree, is_prefix, level_restrict, node_str


class MorphismMismatch(ValueError):
    pass


class LimitBudgetExceeded(Exception):
    pass


@dataclass(frozen=True, eq=False)
class TreeMorphism:
    source: Tree
    target: Tree
    mapping: Mapping[Node, Node]

    def __call__(self, x: Node) -> Node:
        return self.mapping[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreeMorphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and dict(self.mapping) == dict(other.mapping))

    def preimage(self, nodes) -> set[Node]:
        nodes = set(nodes)
        return {x for x, y in self.mapping.items() if y in nodes}


def identity(t: Tree) -> TreeMorphism:
    return TreeMorphism(t, t, {x: x for x in t.nodes})


def letterwise(source: Tree, target: Tree, letter_map: Callable[[int], int]) -> TreeMorphism:
    return TreeMorphism(source, target, {x: tuple(letter_map(a) for a in x) for x in source.nodes})


def validate_morphism(f: TreeMorphism) -> bool:
    """Defined on the source, length preserving, isotone, into the target."""
    if set(f.mapping) != set(f.source.nodes):
        return False
    for x, y in f.mapping.items():
        if len(y) != len(x) or y not in f.target:
            return False
        # isotonicity reduces to the parent relation
        if x and not is_prefix(f.mapping[x[:-1]], y):
            return False
    return True


def compose(g: TreeMorphism, f: TreeMorphism) -> TreeMorphism:
    """``g ∘ f``."""
    if f.target != g.source:
        raise MorphismMismatch("target of the first map differs from source of the second")
    return TreeMorphism(f.source, g.target, {x: g.mapping[y] for x, y in f.mapping.items()})


def level_is_bijective(f: TreeMorphism, n: int) -> bool:
    src = f.source.level(n)
    image = {f.mapping[x] for x in src}
    return len(image) == len(src) and image == set(f.target.level(n))


def fixing_level(f: TreeMorphism) -> int:
    """Greatest k such that f is a bijection on the first k levels."""
    top = min(f.source.depth_bound, f.target.depth_bound)
    k = -1
    for n in range(top + 1):
        if not level_is_bijective(f, n):
            break
        k = n
    return max(k, 0)


def is_k_fixing(f: TreeMorphism, k: int) -> bool:
    return all(level_is_bijective(f, n) for n in range(k + 1))


def level_inverse(f: TreeMorphism, n: int) -> dict[Node, Node]:
    """Inverse of f on level n; requires that level to be bijective."""
    if not level_is_bijective(f, n):
        raise ValueError(f"map is not bijective on level {n}")
    return {f.mapping[x]: x for x in f.source.level(n)}


@dataclass(frozen=True)
class InverseSystem:
    """A chain ``… → T2 → T1 → T0``; transition(i) maps stage(i+1) to stage(i).

    ``stage_count`` is ``None`` for an unbounded system, which is then only
    explored up to ``budget`` stages.
    """

    stage: Callable[[int], Tree]
    transition: Callable[[int], TreeMorphism]
    schedule: Callable[[int], int]
    stage_count: int | None = None
    budget: int = 64

    @classmethod
    def finite(cls, stages, transitions, schedule=None) -> InverseSystem:
        stages, transitions = list(stages), list(transitions)
        if len(transitions) != len(stages) - 1:
            raise ValueError("a chain of m stages has m-1 transitions")
        if schedule is None:
            schedule = [fixing_level(f) for f in transitions]
        schedule = list(schedule)
        return cls(stages.__getitem__, transitions.__getitem__,
                   lambda i: schedule[i] if i < len(schedule) else _INF, len(stages))

    def validate(self, stages: int | None = None) -> bool:
        n = self.stage_count if self.stage_count is not None else (stages or self.budget)
        last = None
        for i in range(n - 1):
            f = self.transition(i)
            if f.source != self.stage(i + 1) or f.target != self.stage(i):
                return False
            if not validate_morphism(f) or not is_k_fixing(f, min(self.schedule(i), f.source.depth_bound)):
                return False
            if last is not None and self.schedule(i) < last:
                return False
            last = self.schedule(i)
        return True


_INF = 10**9


@dataclass(frozen=True, eq=False)
class Limit:
    tree: Tree
    representative: int  # the stage the limit is read off from
    projections: dict[int, TreeMorphism] = field(default_factory=dict)

    def projection(self, i: int) -> TreeMorphism:
        return self.projections[i]


def stabilization_stage(sys: InverseSystem, depth: int) -> int:
    """First stage N from which every later transition is depth-fixing."""
    if sys.stage_count is not None:
        last = sys.stage_count - 1
        n = last
        while n > 0 and sys.schedule(n - 1) >= depth:
            n -= 1
        return n
    for n in range(sys.budget):
        if sys.schedule(n) >= depth:
            return n
    raise LimitBudgetExceeded(f"schedule does not reach {depth} within {sys.budget} stages")


def limit_tree(sys: InverseSystem, depth: int) -> Limit:
    """The limit up to ``depth``, read off the first stabilized stage.

    Past that stage every transition is bijective on the requested levels,
    so its nodes stand for the threads through all later stages.
    """
    n = stabilization_stage(sys, depth)
    rep = sys.stage(n)
    tree = level_restrict(rep, depth)
    to_rep = {x: x for x in tree.nodes}
    projections = {n: TreeMorphism(tree, level_restrict(rep, depth), to_rep)}
    for i in range(n - 1, -1, -1):
        f = sys.transition(i)
        above = projections[i + 1].mapping
        projections[i] = TreeMorphism(
            tree, level_restrict(sys.stage(i), depth), {x: f.mapping[y] for x, y in above.items()})
    # later stages are reached by inverting the depth-fixing transitions
    top = (sys.stage_count - 1) if sys.stage_count is not None else n
    for i in range(n, top):
        f = sys.transition(i)
        inverse = {}
        for lvl in range(depth + 1):
            inverse.update(level_inverse(f, lvl))
        projections[i + 1] = TreeMorphism(
            tree, level_restrict(sys.stage(i + 1), depth),
            {x: inverse[y] for x, y in projections[i].mapping.items()})
    return Limit(tree, n, projections)


def compatible_tuples(sys: InverseSystem, n: int, last: int) -> set[tuple[Node, ...]]:
    """Inverse limit of the level-n node sets of stages 0..last, as explicit threads."""
    threads = [(x,) for x in sys.stage(0).level(n)]
    for i in range(1, last + 1):
        f = sys.transition(i - 1)
        level = sys.stage(i).level(n)
        threads = [t + (y,) for t in threads for y in level if f.mapping[y] == t[-1]]
    return set(threads)


def level_functor_check(sys: InverseSystem, n: int, depth: int | None = None) -> bool:
    """Level n of the limit is the limit of the level-n sets."""
    depth = n if depth is None else max(depth, n)
    lim = limit_tree(sys, depth)
    last = max(lim.projections)
    threads = compatible_tuples(sys, n, last)
    image = {tuple(lim.projections[i].mapping[x] for i in range(last + 1)) for x in lim.tree.level(n)}
    return len(image) == len(lim.tree.level(n)) and image == threads


def enumerate_morphisms(source: Tree, target: Tree):
    """Every length-preserving isotone map from source to target."""
    order = list(source.sorted_nodes)

    def rec(i: int, mapping: dict):
        if i == len(order):
            yield TreeMorphism(source, target, dict(mapping))
            return
        x = order[i]
        if not x:
            options = [()] if () in target else []
        else:
            parent = mapping[x[:-1]]
            options = [parent + (a,) for a in target.children(parent)]
        for y in options:
            mapping[x] = y
            yield from rec(i + 1, mapping)
        mapping.pop(x, None)

    yield from rec(0, {})
