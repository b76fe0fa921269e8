"""Turn a Hamilton path into a Hamilton cycle with endpoint stubs.

Each round a uniform vertex x is presented. An endpoint closes the cycle
directly. If the vertex before x holds a stub to the tail, the edge {x, head}
closes it (and symmetrically for the vertex after x holding a stub to the
head). Otherwise x gets a stub to the head or the tail, chosen by a coin.
Birthday-paradox reasoning puts the number of rounds at Theta(sqrt(n)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .process import ProcessState

TO_HEAD = 1
TO_TAIL = 2


@dataclass
class ClosureResult:
    cycle: list[int]
    rounds_used: int
    edges: list[tuple[int, int]] = field(default_factory=list)


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def close_path(order: Sequence[int], rng) -> ClosureResult:
    """Close the Hamilton path `order` (vertex ids 0..n-1 in path order)."""
    n = len(order)
    if n < 3:
        raise ValueError("closing a cycle needs n >= 3")
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    head, tail = order[0], order[-1]
    stubs = [0] * n  # by path position
    edges = []
    rounds = 0
    while True:
        rounds += 1
        x = rng.randrange(n)
        i = pos[x]
        if i == 0 or i == n - 1:
            edges.append(_edge(head, tail))
            return ClosureResult(list(order), rounds, edges)
        if stubs[i - 1] & TO_TAIL:
            edges.append(_edge(x, head))
            cycle = list(order[:i]) + list(reversed(order[i:]))
            return ClosureResult(cycle, rounds, edges)
        if stubs[i + 1] & TO_HEAD:
            edges.append(_edge(x, tail))
            cycle = list(order[: i + 1]) + list(reversed(order[i + 1 :]))
            return ClosureResult(cycle, rounds, edges)
        side = TO_HEAD if rng.randrange(2) == 0 else TO_TAIL
        if not stubs[i] & side:
            stubs[i] |= side
            edges.append(_edge(x, head if side == TO_HEAD else tail))


def close_cycle(state: ProcessState, rng) -> ClosureResult:
    """Close the completed path of `state`, recording the new edges on it."""
    if state.P != state.n:
        raise ValueError(f"path has {state.P} of {state.n} vertices")
    result = close_path(state.path_order(), rng)
    for a, b in result.edges:
        state._add_edge(a, b)
    state.t += result.rounds_used
    return result
