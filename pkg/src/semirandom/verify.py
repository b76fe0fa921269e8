"""Independent checks on a running process.

``check_invariants`` audits a state from scratch (it recomputes labels from
stub positions rather than trusting the incremental bookkeeping).
``expected_step_exact`` enumerates every presented vertex and every internal
choice on copies of the state, and ``expectation_formulas`` evaluates the
closed-form one-round drift; tests compare the two.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .process import (
    BLOCKED,
    FREE,
    ISOLATED,
    NEIGHBOR,
    NIL,
    PAIRED,
    STUB,
    Case,
    EventRecord,
    ProcessState,
)


@dataclass(frozen=True)
class Violation:
    invariant: str
    t: int
    detail: str

    def to_json(self) -> str:
        return json.dumps({"invariant": self.invariant, "t": self.t, "detail": self.detail})


def check_invariants(state: ProcessState) -> list[Violation]:
    out: list[Violation] = []
    t = state.t
    n = state.n

    def bad(name, detail):
        out.append(Violation(name, t, detail))

    # path links
    order = []
    seen = set()
    x = state.head
    prev = NIL
    while x != NIL and x not in seen:
        if state.prv[x] != prev:
            bad("path links", f"prev[{x}]={state.prv[x]} but walked from {prev}")
        seen.add(x)
        order.append(x)
        prev = x
        x = state.nxt[x]
    if x != NIL:
        bad("path links", f"cycle in next pointers at {x}")
    if order and order[-1] != state.tail:
        bad("path links", f"walk ends at {order[-1]}, tail is {state.tail}")
    if not order and state.tail != NIL:
        bad("path links", "empty walk but tail set")
    if len(order) != state.P:
        bad("path count", f"walked {len(order)} path vertices, P={state.P}")
    pos = {v: i for i, v in enumerate(order)}

    # non-path bookkeeping
    iso = [v for v in range(n) if state.kind[v] == ISOLATED]
    paired = [v for v in range(n) if state.kind[v] == PAIRED]
    if len(iso) != state.V1:
        bad("isolated count", f"{len(iso)} isolated vertices, V1={state.V1}")
    if len(paired) != state.V2:
        bad("paired count", f"{len(paired)} paired vertices, V2={state.V2}")
    if state.P + state.V1 + state.V2 != n:
        bad("conservation", f"P+V1+V2={state.P + state.V1 + state.V2} != n={n}")
    if set(state.nonpath) != set(iso) | set(paired) or len(state.nonpath) != len(iso) + len(paired):
        bad("non-path index", "nonpath list disagrees with vertex kinds")
    for i, v in enumerate(state.nonpath):
        if state.npos[v] != i:
            bad("non-path index", f"npos[{v}]={state.npos[v]}, expected {i}")
    for i, v in enumerate(state.isolated):
        if state.ipos[v] != i:
            bad("isolated index", f"ipos[{v}]={state.ipos[v]}, expected {i}")
    for v in order:
        if state.kind[v] in (ISOLATED, PAIRED):
            bad("path kinds", f"path vertex {v} marked non-path")
    for v in paired:
        w = state.partner[v]
        if w == v or w == NIL or state.kind[w] != PAIRED or state.partner[w] != v:
            bad("pairing", f"partner of {v} is {w}")

    # stubedges
    counts = [0] * (state.cap + 1)
    edge_total = 0
    for r, ends in state.out.items():
        d = len(ends)
        if not 1 <= d <= state.cap:
            bad("stub degree", f"root {r} has degree {d}")
        else:
            counts[d] += 1
        if r not in pos:
            bad("stubroot off path", f"root {r} is not on the path")
        for e in ends:
            edge_total += 1
            if e in pos:
                bad("stubend on path", f"stubedge ({r}, {e}) ends on the path")
    if counts[1:] != state.s_count[1:]:
        bad("stub census", f"degree histogram {counts[1:]} vs counters {state.s_count[1:]}")
    if edge_total != state.n_stubedges:
        bad("stub census", f"{edge_total} stubedges, counter {state.n_stubedges}")
    by_root = sorted((r, e) for r, ends in state.out.items() for e in ends)
    by_end = sorted((r, e) for e, roots in state.inc.items() for r in roots)
    if by_root != by_end:
        bad("stubedge index", "by-root and by-end indexes disagree")

    # labels, recomputed from stub positions
    stub_pos = sorted(pos[r] for r in state.out if r in pos)
    for a, b in zip(stub_pos, stub_pos[1:]):
        if b - a < 3:
            bad("stub spacing", f"stubs at path positions {a} and {b}")
    stub_set = set(stub_pos)
    P = len(order)
    n_free = 0
    for i, v in enumerate(order):
        if i in stub_set:
            want = STUB
        elif (i - 1) in stub_set or (i + 1) in stub_set:
            want = NEIGHBOR
        elif (i - 2) in stub_set or (i + 2) in stub_set:
            want = BLOCKED
        else:
            want = FREE
        if state.kind[v] != want:
            bad("labels", f"vertex {v} at position {i} has kind {state.kind[v]}, expected {want}")
        if want == FREE:
            n_free += 1
    if n_free != state.n_free or state.free.prefix(n) != n_free:
        bad("free index", f"{n_free} free vertices, counter {state.n_free}")
    S = sum(counts)
    target = max(0, P - 5 * S)
    n_clear = sum(1 for v in order if state.kind[v] == FREE and state._is_clear(v))
    if n_clear != target:
        bad("clear count", f"{n_clear} clear vertices, expected max(0, P-5S)={target}")
    return out


class ExpectationVector(NamedTuple):
    dP: Fraction
    dV1: Fraction
    dV2: Fraction
    dS1: Fraction
    dS2: Fraction
    dS3: Fraction


class _ScriptedRng:
    """Stand-in RNG that returns a fixed choice, for enumerating branches."""

    def __init__(self, choice: int):
        self.choice = choice

    def randrange(self, k: int) -> int:
        if not 0 <= self.choice < k:
            raise ValueError(f"scripted choice {self.choice} outside range({k})")
        return self.choice


def expected_step_exact(state: ProcessState) -> ExpectationVector:
    """Exact one-round expectation of the counter deltas by full enumeration.

    Stubend choices in C1/C2 and the partner choice in C5 do not change any
    counter, so a single branch stands in for each of them. C3 enumerates every
    stubedge of the root, since the realized stubend decides the cascade.
    """
    if state.V < 2:
        raise ValueError("enumeration needs at least 2 non-path vertices")
    n = state.n
    acc = [Fraction(0)] * 6
    for v in range(n):
        case = state.classify(v)
        if case is Case.C4:
            continue
        if case is Case.C3:
            d = state.degree(state.stub_root_of(v))
            branches = [(k, Fraction(1, n * d)) for k in range(d)]
        else:
            branches = [(0, Fraction(1, n))]
        for choice, weight in branches:
            ev = state.copy().present(v, _ScriptedRng(choice))
            if ev.case is not case:
                raise AssertionError(f"copy classified {v} as {ev.case}, expected {case}")
            for i, d in enumerate((ev.dP, ev.dV1, ev.dV2, ev.dS1, ev.dS2, ev.dS3)):
                if d:
                    acc[i] += weight * d
    return ExpectationVector(*acc)


def expectation_formulas(state: ProcessState) -> ExpectationVector:
    """Closed-form one-round drift of the counters, without the O(1/n) terms."""
    P, V1, V2, S1, S2, S3 = (Fraction(c) for c in state.counters())
    n = state.n
    V = V1 + V2
    if V == 0:
        raise ValueError("drift undefined with no non-path vertices")
    S = S1 + S2 + S3
    dP = 2 * V2 / n + 2 * S / n * (V1 + 2 * V2) / V
    dV1 = -2 * V1 / n - 2 * S / n * V1 / V
    dV2 = -2 * V2 / n + 2 * V1 / n - 2 * S / n * 2 * V2 / V
    kill = 2 * S / n * (V1 + 2 * V2) / V**2 + V2 / n * 2 / V
    if state.cap == 3:
        dS1 = (P - 5 * S) / n - S1 / n - 2 * S1 / n + 2 * S2 / n + kill * (2 * S2 - S1)
        dS2 = S1 / n - S2 / n - 2 * S2 / n + 2 * S3 / n + kill * (3 * S3 - 2 * S2)
        dS3 = S2 / n - 2 * S3 / n - kill * 3 * S3
    else:
        dS1 = (P - 5 * S) / n - S1 / n - 2 * S1 / n + 2 * S2 / n + kill * (2 * S2 - S1)
        dS2 = S1 / n - 2 * S2 / n - kill * 2 * S2
        dS3 = Fraction(0)
    return ExpectationVector(dP, dV1, dV2, dS1, dS2, dS3)


def verify_hamilton_cycle(order, edges, n: int) -> bool:
    """True iff order visits each of 0..n-1 once and every consecutive pair (with wrap) is an edge."""
    order = list(order)
    if len(order) != n or n < 3 or set(order) != set(range(n)):
        return False
    for a, b in zip(order, order[1:] + order[:1]):
        if ((a, b) if a < b else (b, a)) not in edges:
            return False
    return True


LEMMA_CLASSES = ("C3-isolated", "C3-paired", "C6")


class Lemma32Result(NamedTuple):
    empirical: float
    expected: float
    z: float
    events: int
    exposed: int


class StubendHitTally:
    """Pools stubend-hit indicators per event class.

    For C6 and paired C3 each exposed stubedge should be hit with probability
    2/V; for isolated C3 with probability 1/V.
    """

    def __init__(self):
        # class -> [events, exposed, hits, expected hits, variance]
        self.acc = {c: [0, 0, 0, 0.0, 0.0] for c in LEMMA_CLASSES}

    def add(self, event: EventRecord) -> None:
        if event.case is Case.C6:
            cls, k = "C6", 2
        elif event.case is Case.C3:
            cls, k = ("C3-paired", 2) if event.w2 != NIL else ("C3-isolated", 1)
        else:
            return
        p = k / event.n_nonpath
        a = self.acc[cls]
        a[0] += 1
        a[1] += event.n_exposed
        a[2] += event.n_hits
        a[3] += event.n_exposed * p
        a[4] += event.n_exposed * p * (1 - p)

    def merge(self, other: "StubendHitTally") -> None:
        for c in LEMMA_CLASSES:
            self.acc[c] = [x + y for x, y in zip(self.acc[c], other.acc[c])]

    def result(self, cls: str, min_events: int = 10_000) -> Lemma32Result:
        events, exposed, hits, mean, var = self.acc[cls]
        if events < min_events or exposed == 0:
            raise ValueError(f"{cls}: {events} events, need at least {min_events}")
        return Lemma32Result(hits / exposed, mean / exposed, (hits - mean) / math.sqrt(var), events, exposed)


def lemma32_statistic(events: Iterable[EventRecord], cls: str, min_events: int = 10_000) -> Lemma32Result:
    tally = StubendHitTally()
    for ev in events:
        tally.add(ev)
    return tally.result(cls, min_events)
