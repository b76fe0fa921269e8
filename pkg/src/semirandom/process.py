"""Exact simulation of the paired-stub Hamilton path strategy.

Each round presents a uniformly random vertex and the strategy reacts with one
of six cases:

* C1  clear path vertex: grow a new stub (one stubedge to a random non-path vertex)
* C2  stub below the degree cap: add another stubedge
* C3  stubneighbor: splice the stubend (or its pair) into the path
* C4  blocked vertex or saturated stub: do nothing
* C5  isolated vertex: pair it with another isolated vertex
* C6  paired vertex: append the pair to the path tail

The path is a doubly linked list over vertex ids, so splicing is O(1). Stubedges
are indexed by root and by end, so the deletion cascade when a stubend joins
the path touches only the affected edges.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

# Internal vertex kinds. Path vertices carry one of STUB/NEIGHBOR/BLOCKED/FREE;
# FREE vertices are split into clear and artificially blocked by join order.
ISOLATED, PAIRED, STUB, NEIGHBOR, BLOCKED, FREE, JOINING = range(7)

NIL = -1


class Case(str, enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"
    FALLBACK = "Fallback"


class Role(str, enum.Enum):
    ISOLATED = "isolated"
    PAIRED = "paired"
    STUB = "stub"
    STUB_NEIGHBOR = "stubneighbor"
    BLOCKED_STRUCTURAL = "blocked"
    BLOCKED_ARTIFICIAL = "blocked-artificial"
    CLEAR = "clear"


class StopMode(str, enum.Enum):
    MAIN_PHASE = "main-phase"
    FULL_CYCLE = "full-cycle"


class ProcessFinished(RuntimeError):
    """Raised when stepping a process whose stop condition already holds."""


@dataclass(frozen=True)
class Config:
    n: int
    cap: int = 3
    pairing_enabled: bool = True
    stop_mode: StopMode = StopMode.FULL_CYCLE
    epsilon: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.cap not in (2, 3):
            raise ValueError(f"cap must be 2 or 3, got {self.cap!r}")
        object.__setattr__(self, "stop_mode", StopMode(self.stop_mode))
        if self.stop_mode is StopMode.MAIN_PHASE and not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if self.stop_mode is StopMode.FULL_CYCLE and self.n < 3:
            raise ValueError("full-cycle mode needs n >= 3")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "cap": self.cap,
            "pairing_enabled": self.pairing_enabled,
            "stop_mode": self.stop_mode.value,
            "epsilon": self.epsilon,
            "seed": self.seed,
        }


class TrajectoryRow(NamedTuple):
    """Counters normalized by n at scaled time tau = t / n."""

    tau: float
    p: float
    v1: float
    v2: float
    s1: float
    s2: float
    s3: float


@dataclass(slots=True)
class EventRecord:
    t: int
    v: int
    case: Case
    dP: int = 0
    dV1: int = 0
    dV2: int = 0
    dS1: int = 0
    dS2: int = 0
    dS3: int = 0
    # chosen stubend and its partner (C3), or the pair partner (C5/C6)
    w: int = NIL
    w2: int = NIL
    created: Optional[tuple] = None
    deleted: list = field(default_factory=list)
    # stubend-hit statistics: non-path count before the round, stubedges
    # exposed to deletion, and how many of them were deleted
    n_nonpath: int = 0
    n_exposed: int = 0
    n_hits: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "t": self.t,
                "v": self.v,
                "case": self.case.value,
                "dP": self.dP,
                "dV1": self.dV1,
                "dV2": self.dV2,
                "dS1": self.dS1,
                "dS2": self.dS2,
                "dS3": self.dS3,
            }
        )


class _Fenwick:
    """Prefix counts over join stamps, used to rank free path vertices."""

    __slots__ = ("tree",)

    def __init__(self, size: int):
        self.tree = [0] * (size + 1)

    def add(self, i: int, delta: int) -> None:
        tree = self.tree
        i += 1
        size = len(tree)
        while i < size:
            tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        """Sum over indices [0, i)."""
        tree = self.tree
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s


class ProcessState:
    """Mutable state of one run; see the module docstring for the cases."""

    def __init__(self, config: Config, track_edges: bool = True):
        n = config.n
        self.config = config
        self.n = n
        self.cap = config.cap
        self.t = 0

        self.nxt = [NIL] * n
        self.prv = [NIL] * n
        self.head = NIL
        self.tail = NIL
        self.P = 0

        self.kind = [ISOLATED] * n
        self.partner = [NIL] * n
        self.nonpath = list(range(n))
        self.npos = list(range(n))
        self.isolated = list(range(n))
        self.ipos = list(range(n))
        self.V2 = 0

        # stubedges: root -> list of ends, end -> list of roots (multisets)
        self.out: dict[int, list[int]] = {}
        self.inc: dict[int, list[int]] = {}
        self.s_count = [0] * (self.cap + 1)
        self.n_stubedges = 0

        self.stamp = [NIL] * n
        self._next_stamp = 0
        self.free = _Fenwick(n)
        self.n_free = 0

        self.graph_edges: Optional[set] = set() if track_edges else None
        self.edges_added = 0

    # ------------------------------------------------------------------
    # counters and queries

    @property
    def V1(self) -> int:
        return len(self.isolated)

    @property
    def V(self) -> int:
        return len(self.nonpath)

    @property
    def S(self) -> int:
        return sum(self.s_count)

    def counters(self) -> tuple:
        """(P, V1, V2, S1, S2, S3)."""
        sc = self.s_count
        return (self.P, len(self.isolated), self.V2, sc[1], sc[2], sc[3] if self.cap == 3 else 0)

    def clear_target(self) -> int:
        return max(0, self.P - 5 * sum(self.s_count))

    def degree(self, v: int) -> int:
        ends = self.out.get(v)
        return len(ends) if ends else 0

    def is_finished(self) -> bool:
        if self.config.stop_mode is StopMode.FULL_CYCLE:
            return self.P == self.n
        return self.P >= (1.0 - self.config.epsilon) * self.n

    def _is_clear(self, x: int) -> bool:
        target = self.P - 5 * sum(self.s_count)
        if target <= 0:
            return False
        return self.free.prefix(self.stamp[x]) < target

    def role(self, v: int) -> Role:
        k = self.kind[v]
        if k == ISOLATED:
            return Role.ISOLATED
        if k == PAIRED:
            return Role.PAIRED
        if k == STUB:
            return Role.STUB
        if k == NEIGHBOR:
            return Role.STUB_NEIGHBOR
        if k == BLOCKED:
            return Role.BLOCKED_STRUCTURAL
        return Role.CLEAR if self._is_clear(v) else Role.BLOCKED_ARTIFICIAL

    def stub_root_of(self, v: int) -> int:
        """The unique stub adjacent to the stubneighbor v."""
        a = self.prv[v]
        if a != NIL and a in self.out:
            return a
        return self.nxt[v]

    def path_order(self) -> list[int]:
        order = []
        x = self.head
        nxt = self.nxt
        while x != NIL:
            order.append(x)
            x = nxt[x]
        return order

    def row(self) -> TrajectoryRow:
        n = self.n
        P, V1, V2, S1, S2, S3 = self.counters()
        return TrajectoryRow(self.t / n, P / n, V1 / n, V2 / n, S1 / n, S2 / n, S3 / n)

    def copy(self) -> "ProcessState":
        new = ProcessState.__new__(ProcessState)
        new.__dict__.update(self.__dict__)
        for name in ("nxt", "prv", "kind", "partner", "nonpath", "npos",
                     "isolated", "ipos", "s_count", "stamp"):
            setattr(new, name, list(getattr(self, name)))
        new.out = {k: list(v) for k, v in self.out.items()}
        new.inc = {k: list(v) for k, v in self.inc.items()}
        new.free = _Fenwick(0)
        new.free.tree = list(self.free.tree)
        new.graph_edges = set(self.graph_edges) if self.graph_edges is not None else None
        return new

    # ------------------------------------------------------------------
    # classification and the round driver

    def classify(self, v: int) -> Case:
        k = self.kind[v]
        if k == ISOLATED:
            if self.config.pairing_enabled and len(self.isolated) >= 2:
                return Case.C5
            return Case.FALLBACK
        if k == PAIRED:
            return Case.C6
        if k == NEIGHBOR:
            return Case.C3
        if k == STUB:
            return Case.C2 if len(self.out[v]) < self.cap else Case.C4
        if k == FREE and self._is_clear(v):
            return Case.C1
        return Case.C4

    def step(self, rng) -> EventRecord:
        if self.is_finished():
            raise ProcessFinished(f"process finished at t={self.t}")
        v = rng.randrange(self.n)
        event = self.present(v, rng)
        self.t += 1
        return event

    def present(self, v: int, rng) -> EventRecord:
        """Apply the strategy's response to presented vertex v (t is not advanced)."""
        case = self.classify(v)
        if case is Case.C1:
            return self.apply_c1(v, rng)
        if case is Case.C2:
            return self.apply_c2(v, rng)
        if case is Case.C3:
            return self.apply_c3(v, rng)
        if case is Case.C5:
            return self.apply_c5(v, rng)
        if case is Case.C6:
            return self.apply_c6(v)
        if case is Case.FALLBACK:
            return self.append_single(v)
        return self.apply_c4(v)

    def _finish(self, event: EventRecord, before: tuple) -> EventRecord:
        after = self.counters()
        event.dP = after[0] - before[0]
        event.dV1 = after[1] - before[1]
        event.dV2 = after[2] - before[2]
        event.dS1 = after[3] - before[3]
        event.dS2 = after[4] - before[4]
        event.dS3 = after[5] - before[5]
        return event

    # ------------------------------------------------------------------
    # the six cases

    def apply_c1(self, v: int, rng) -> EventRecord:
        before = self.counters()
        V = len(self.nonpath)
        if V == 0:
            return EventRecord(self.t, v, Case.C4)
        w = self.nonpath[rng.randrange(V)]
        self._add_stubedge(v, w)
        self._relabel_around(v, 2)
        event = EventRecord(self.t, v, Case.C1, w=w, created=(v, w))
        return self._finish(event, before)

    def apply_c2(self, v: int, rng) -> EventRecord:
        before = self.counters()
        V = len(self.nonpath)
        if V == 0:
            return EventRecord(self.t, v, Case.C4)
        w = self.nonpath[rng.randrange(V)]
        self._add_stubedge(v, w)
        event = EventRecord(self.t, v, Case.C2, w=w, created=(v, w))
        return self._finish(event, before)

    def apply_c3(self, v: int, rng) -> EventRecord:
        before = self.counters()
        V = len(self.nonpath)
        u = self.stub_root_of(v)
        ends = self.out[u]
        d = len(ends)
        w = ends.pop(rng.randrange(d))
        self._shift_degree(d, d - 1)
        if d == 1:
            del self.out[u]
        roots = self.inc[w]
        roots.remove(u)
        if not roots:
            del self.inc[w]
        self.n_stubedges -= 1
        exposed = self.n_stubedges

        if self.kind[w] == PAIRED:
            w2 = self.partner[w]
            targets = (w, w2)
        else:
            w2 = NIL
            targets = (w,)
        deleted, vanished = self._delete_into(targets)
        for x in targets:
            self._join_path(x)
        self._insert_between(u, v, targets)
        self._add_edge(v, targets[-1])

        self._relabel_around(w, 4)
        if d == 1:
            vanished.append(u)
        for r in vanished:
            self._relabel_around(r, 2)

        event = EventRecord(self.t, v, Case.C3, w=w, w2=w2, deleted=deleted,
                            n_nonpath=V, n_exposed=exposed, n_hits=len(deleted))
        return self._finish(event, before)

    def apply_c4(self, v: int) -> EventRecord:
        return EventRecord(self.t, v, Case.C4)

    def apply_c5(self, v: int, rng) -> EventRecord:
        before = self.counters()
        iso = self.isolated
        idx = rng.randrange(len(iso) - 1)
        if idx >= self.ipos[v]:
            idx += 1
        v2 = iso[idx]
        self._drop_isolated(v)
        self._drop_isolated(v2)
        self.kind[v] = self.kind[v2] = PAIRED
        self.partner[v] = v2
        self.partner[v2] = v
        self.V2 += 2
        self._add_edge(v, v2)
        event = EventRecord(self.t, v, Case.C5, w2=v2)
        return self._finish(event, before)

    def apply_c6(self, v: int) -> EventRecord:
        before = self.counters()
        V = len(self.nonpath)
        exposed = self.n_stubedges
        v2 = self.partner[v]
        deleted, vanished = self._delete_into((v, v2))
        self._join_path(v)
        self._join_path(v2)
        if self.tail != NIL:
            self._add_edge(self.tail, v)
        self._append_tail(v)
        self._append_tail(v2)
        self._relabel_around(v, 3)
        for r in vanished:
            self._relabel_around(r, 2)
        event = EventRecord(self.t, v, Case.C6, w2=v2, deleted=deleted,
                            n_nonpath=V, n_exposed=exposed, n_hits=len(deleted))
        return self._finish(event, before)

    def append_single(self, v: int) -> EventRecord:
        """Fallback: append a lone isolated vertex to the path tail."""
        before = self.counters()
        deleted, vanished = self._delete_into((v,))
        self._join_path(v)
        if self.tail != NIL:
            self._add_edge(self.tail, v)
        self._append_tail(v)
        self._relabel_around(v, 3)
        for r in vanished:
            self._relabel_around(r, 2)
        event = EventRecord(self.t, v, Case.FALLBACK, deleted=deleted)
        return self._finish(event, before)

    def delete_stubedges_into(self, targets) -> list[int]:
        """Remove every stubedge ending in targets; return the affected roots."""
        deleted, vanished = self._delete_into(tuple(targets))
        for r in vanished:
            self._relabel_around(r, 2)
        roots = []
        for r, _ in deleted:
            if r not in roots:
                roots.append(r)
        return roots

    def rebalance_labels(self) -> None:
        """Recompute every path label from the stub positions.

        Clear versus artificially blocked needs no stored state: the oldest
        max(0, P - 5S) free vertices by join order are clear.
        """
        x = self.head
        while x != NIL:
            self._relabel(x)
            x = self.nxt[x]

    # ------------------------------------------------------------------
    # internals

    def _add_edge(self, a: int, b: int) -> None:
        self.edges_added += 1
        if self.graph_edges is not None:
            self.graph_edges.add((a, b) if a < b else (b, a))

    def _shift_degree(self, old: int, new: int) -> None:
        sc = self.s_count
        if old:
            sc[old] -= 1
        if new:
            sc[new] += 1

    def _add_stubedge(self, r: int, e: int) -> None:
        ends = self.out.get(r)
        if ends is None:
            ends = self.out[r] = []
        d = len(ends)
        ends.append(e)
        self.inc.setdefault(e, []).append(r)
        self._shift_degree(d, d + 1)
        self.n_stubedges += 1
        self._add_edge(r, e)

    def _delete_into(self, targets: tuple) -> tuple[list, list]:
        deleted = []
        vanished = []
        out = self.out
        for x in targets:
            roots = self.inc.pop(x, None)
            if not roots:
                continue
            for r in roots:
                ends = out[r]
                d = len(ends)
                ends.remove(x)
                self._shift_degree(d, d - 1)
                if d == 1:
                    del out[r]
                    vanished.append(r)
                deleted.append((r, x))
            self.n_stubedges -= len(roots)
        return deleted, vanished

    def _drop_isolated(self, x: int) -> None:
        iso = self.isolated
        i = self.ipos[x]
        last = iso.pop()
        if last != x:
            iso[i] = last
            self.ipos[last] = i
        self.ipos[x] = NIL

    def _join_path(self, x: int) -> None:
        np_ = self.nonpath
        i = self.npos[x]
        last = np_.pop()
        if last != x:
            np_[i] = last
            self.npos[last] = i
        self.npos[x] = NIL
        if self.kind[x] == ISOLATED:
            self._drop_isolated(x)
        else:
            self.V2 -= 1
            self.partner[x] = NIL
        self.kind[x] = JOINING
        self.stamp[x] = self._next_stamp
        self._next_stamp += 1
        self.P += 1

    def _append_tail(self, x: int) -> None:
        if self.tail == NIL:
            self.head = self.tail = x
            return
        self.nxt[self.tail] = x
        self.prv[x] = self.tail
        self.tail = x

    def _insert_between(self, a: int, b: int, xs: tuple) -> None:
        """Splice xs between adjacent path vertices a and b, in order from a to b."""
        nxt, prv = self.nxt, self.prv
        if nxt[a] == b:
            left, right, seq = a, b, xs
        else:
            left, right, seq = b, a, xs[::-1]
        cur = left
        for x in seq:
            nxt[cur] = x
            prv[x] = cur
            cur = x
        nxt[cur] = right
        prv[right] = cur

    def _structural(self, x: int) -> int:
        out = self.out
        if x in out:
            return STUB
        a = self.prv[x]
        b = self.nxt[x]
        if (a != NIL and a in out) or (b != NIL and b in out):
            return NEIGHBOR
        if a != NIL:
            a2 = self.prv[a]
            if a2 != NIL and a2 in out:
                return BLOCKED
        if b != NIL:
            b2 = self.nxt[b]
            if b2 != NIL and b2 in out:
                return BLOCKED
        return FREE

    def _relabel(self, x: int) -> None:
        new = self._structural(x)
        old = self.kind[x]
        if new == old:
            return
        if old == FREE:
            self.free.add(self.stamp[x], -1)
            self.n_free -= 1
        elif new == FREE:
            self.free.add(self.stamp[x], 1)
            self.n_free += 1
        self.kind[x] = new

    def _relabel_around(self, x: int, radius: int) -> None:
        self._relabel(x)
        prv, nxt = self.prv, self.nxt
        y = x
        for _ in range(radius):
            y = prv[y]
            if y == NIL:
                break
            self._relabel(y)
        y = x
        for _ in range(radius):
            y = nxt[y]
            if y == NIL:
                break
            self._relabel(y)


def default_sample_every(n: int, rows: int = 1000) -> int:
    """Sampling stride giving about `rows` rows over a run of roughly 2n rounds."""
    return max(1, math.ceil(2 * n / rows))


def run_main_phase(
    state: ProcessState,
    rng,
    sample_every: Optional[int] = None,
    on_event: Optional[Callable[[EventRecord], None]] = None,
) -> list[TrajectoryRow]:
    """Step until the stop condition; return rows at multiples of sample_every plus the final state."""
    if sample_every is None:
        sample_every = default_sample_every(state.n)
    rows = [state.row()] if state.t % sample_every == 0 else []
    step = state.step
    while not state.is_finished():
        event = step(rng)
        if on_event is not None:
            on_event(event)
        if state.t % sample_every == 0:
            rows.append(state.row())
    if state.t % sample_every != 0 or not rows:
        rows.append(state.row())
    return rows
