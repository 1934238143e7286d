"""Markov triples and the tree of solutions rooted at (1, 1, 1)."""
from __future__ import annotations

from typing import Iterator, NamedTuple

LEFT, RIGHT = "L", "R"


class RootHasNoParent(ValueError):
    pass


class NotMarkov(ValueError):
    pass


def is_markov(a: int, b: int, c: int) -> bool:
    return a * a + b * b + c * c == 3 * a * b * c


class MarkovTriple(NamedTuple):
    a1: int
    a2: int
    a3: int

    @classmethod
    def of(cls, a, b, c) -> "MarkovTriple":
        if min(a, b, c) < 1 or not is_markov(a, b, c):
            raise NotMarkov(f"({a}, {b}, {c}) is not a Markov triple")
        return cls(*sorted((a, b, c)))

    def to_json(self):
        return list(self)


ROOT = MarkovTriple(1, 1, 1)


def _child(t: MarkovTriple, sel: str) -> MarkovTriple:
    a1, a2, a3 = t
    if sel == LEFT:
        return MarkovTriple(*sorted((3 * a2 * a3 - a1, a2, a3)))
    if sel == RIGHT:
        return MarkovTriple(*sorted((a1, 3 * a1 * a3 - a2, a3)))
    raise ValueError(f"unknown selector {sel!r}")


def selectors(t: MarkovTriple) -> tuple[str, ...]:
    """Child selectors of ``t``; the degenerate nodes have a single child."""
    if t.a1 == t.a2:
        return (LEFT,)
    return (LEFT, RIGHT)


def children(t: MarkovTriple) -> tuple[MarkovTriple, ...]:
    """Children in canonical order: replacing the smaller entry first."""
    return tuple(_child(t, sel) for sel in selectors(t))


def child(t: MarkovTriple, sel: str) -> MarkovTriple:
    if sel not in selectors(t):
        raise ValueError(f"{t} has no child {sel!r}")
    return _child(t, sel)


def parent(t: MarkovTriple) -> MarkovTriple:
    a1, a2, a3 = t
    if t == ROOT:
        raise RootHasNoParent("(1, 1, 1) is the root")
    return MarkovTriple(*sorted((a1, a2, 3 * a1 * a2 - a3)))


def path_to(t: MarkovTriple) -> tuple[str, ...]:
    """The TreePath from the root to ``t``."""
    t = MarkovTriple.of(*t)
    path = []
    while t != ROOT:
        p = parent(t)
        for sel in selectors(p):
            if _child(p, sel) == t:
                path.append(sel)
                break
        t = p
    return tuple(reversed(path))


def follow(path, start: MarkovTriple = ROOT) -> MarkovTriple:
    t = start
    for sel in path:
        t = child(t, sel)
    return t


def grade(t: MarkovTriple) -> int:
    return len(path_to(t))


class Node(NamedTuple):
    triple: MarkovTriple
    d: int
    path: tuple

    def to_json(self):
        return {"triple": list(self.triple), "d": self.d, "path": list(self.path)}


def walk(depth: int) -> Iterator[Node]:
    """Breadth-first traversal of all nodes with grading at most ``depth``."""
    level = [Node(ROOT, 0, ())]
    while level and level[0].d <= depth:
        yield from level
        level = [
            Node(_child(n.triple, sel), n.d + 1, n.path + (sel,))
            for n in level
            for sel in selectors(n.triple)
        ]


def enumerate_tree(depth: int) -> list[tuple[MarkovTriple, int]]:
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return [(n.triple, n.d) for n in walk(depth)]


def meet(s: MarkovTriple, t: MarkovTriple) -> MarkovTriple:
    """Deepest common ancestor."""
    ps, pt = path_to(s), path_to(t)
    k = 0
    while k < min(len(ps), len(pt)) and ps[k] == pt[k]:
        k += 1
    return follow(ps[:k])
