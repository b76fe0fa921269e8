import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import ScriptedRng, make_state
from semirandom.process import (
    Case,
    Config,
    ProcessFinished,
    ProcessState,
    Role,
    StopMode,
    run_main_phase,
)
from semirandom.verify import check_invariants


def roles(state, vertices):
    return [state.role(v) for v in vertices]


S, N, B, A, C = (Role.STUB, Role.STUB_NEIGHBOR, Role.BLOCKED_STRUCTURAL,
                 Role.BLOCKED_ARTIFICIAL, Role.CLEAR)


# --- construction ---------------------------------------------------------

def test_new_state_counters():
    s = ProcessState(Config(n=4))
    assert s.counters() == (0, 4, 0, 0, 0, 0)
    assert s.t == 0 and s.S == 0


def test_single_vertex_state_and_rejection():
    s = ProcessState(Config(n=1, stop_mode=StopMode.MAIN_PHASE, epsilon=0.5))
    assert s.V1 == 1
    with pytest.raises(ValueError):
        Config(n=1, stop_mode=StopMode.FULL_CYCLE)


def test_large_initial_state():
    s = ProcessState(Config(n=100_000, seed=7))
    assert s.counters() == (0, 100_000, 0, 0, 0, 0)
    assert s.t == 0


@pytest.mark.parametrize("kwargs", [
    dict(n=0), dict(n=-3), dict(n=10, cap=4),
    dict(n=10, stop_mode=StopMode.MAIN_PHASE, epsilon=0.0),
    dict(n=10, stop_mode=StopMode.MAIN_PHASE, epsilon=1.0),
    dict(n=10, seed=-1),
])
def test_invalid_config_rejected(kwargs):
    with pytest.raises(ValueError):
        Config(**kwargs)


# --- classify -------------------------------------------------------------

def test_classify_isolated_pairs_when_two_left():
    s = make_state(5, path=[0, 1, 2])
    assert s.classify(3) is Case.C5


def test_classify_saturated_stub_is_noop():
    s = make_state(12, path=range(7), stubs={3: [8, 9, 10]})
    assert s.role(3) is S and s.degree(3) == 3
    assert s.classify(3) is Case.C4


def test_classify_lone_isolated_is_fallback():
    s = make_state(6, path=[0, 1, 2], pairs=[(3, 4)])
    assert s.V1 == 1
    assert s.classify(5) is Case.FALLBACK


# --- step -----------------------------------------------------------------

def test_step_last_pair_extends_path_by_two():
    s = make_state(8, path=range(6), pairs=[(6, 7)])
    ev = s.step(ScriptedRng(7))
    assert ev.case is Case.C6
    assert ev.dP == 2 and s.P == 8
    assert s.t == 1
    assert s.path_order()[-2:] == [7, 6]


def test_step_on_finished_process_raises():
    s = make_state(4, path=range(4))
    with pytest.raises(ProcessFinished):
        s.step(random.Random(0))


def test_noop_round_still_advances_clock():
    s = make_state(12, path=range(7), stubs={3: [8, 9, 10]})
    ev = s.step(ScriptedRng(3))
    assert ev.case is Case.C4 and s.t == 1


# --- C1 -------------------------------------------------------------------

def test_c1_interior_pattern():
    # path a-b-v-c-d = 0-1-2-3-4
    s = make_state(8, path=range(5))
    assert s.role(2) is C
    ev = s.apply_c1(2, ScriptedRng(0))
    assert ev.case is Case.C1 and ev.dS1 == 1
    assert roles(s, range(5)) == [B, N, S, N, B]
    assert ev.created[0] == 2 and ev.created[1] in (5, 6, 7)
    assert check_invariants(s) == []


def test_c1_distance_three_gives_snns():
    s = make_state(14, path=range(10), stubs={2: [12]})
    assert s.role(5) is C
    s.apply_c1(5, ScriptedRng(0))
    assert roles(s, range(2, 6)) == [S, N, N, S]
    assert check_invariants(s) == []


def test_c1_distance_four_gives_snbns():
    s = make_state(14, path=range(10), stubs={2: [12]})
    s.apply_c1(6, ScriptedRng(0))
    assert roles(s, range(2, 7)) == [S, N, B, N, S]
    assert check_invariants(s) == []


def test_c1_at_path_head_blocks_artificially():
    s = make_state(14, path=range(10))
    s.apply_c1(0, ScriptedRng(0))
    assert roles(s, range(3)) == [S, N, B]
    # 7 free vertices remain but only P - 5S = 5 may be clear
    assert sum(s.role(v) is C for v in range(10)) == 5
    assert sum(s.role(v) is A for v in range(10)) == 2
    assert check_invariants(s) == []


# --- C2 -------------------------------------------------------------------

def test_c2_degree_one_to_two():
    s = make_state(12, path=range(7), stubs={3: [8]})
    ev = s.apply_c2(3, ScriptedRng(0))
    assert s.degree(3) == 2
    assert (ev.dS1, ev.dS2, ev.dS3) == (-1, 1, 0)


def test_c2_cap_two_saturated():
    s = make_state(12, path=range(7), stubs={3: [8, 9]}, cap=2)
    assert s.classify(3) is Case.C4
    ev = s.present(3, ScriptedRng())
    assert (ev.dP, ev.dV1, ev.dV2, ev.dS1, ev.dS2, ev.dS3) == (0,) * 6


def test_c2_degree_two_to_three():
    s = make_state(12, path=range(7), stubs={3: [8, 9]})
    ev = s.apply_c2(3, ScriptedRng(0))
    assert s.degree(3) == 3
    assert (ev.dS2, ev.dS3) == (-1, 1)


# --- C3 -------------------------------------------------------------------

def test_c3_isolated_stubend():
    # a-u-v-b = 0-1-2-3, stub u=1 -> w=4
    s = make_state(8, path=range(4), stubs={1: [4]})
    ev = s.apply_c3(2, ScriptedRng(0))
    assert ev.case is Case.C3 and ev.w == 4
    assert s.path_order() == [0, 1, 4, 2, 3]
    assert (ev.dP, ev.dV1, ev.dS1) == (1, -1, -1)
    assert s.S == 0
    assert all(s.role(v) in (C, A) for v in s.path_order())
    assert (2, 4) in s.graph_edges
    assert check_invariants(s) == []


def test_c3_paired_stubend():
    s = make_state(8, path=range(4), pairs=[(4, 5)], stubs={1: [4]})
    ev = s.apply_c3(0, ScriptedRng(0))  # v = a, on the left of u
    assert s.path_order() == [0, 5, 4, 1, 2, 3]
    assert (ev.dP, ev.dV2) == (2, -2)
    assert (0, 5) in s.graph_edges
    assert check_invariants(s) == []


def test_c3_cascade_removes_other_stub():
    # u=1 and r=6 both point at w=10
    s = make_state(12, path=range(9), stubs={1: [10], 6: [10]})
    ev = s.apply_c3(2, ScriptedRng(0))
    assert ev.deleted == [(6, 10)]
    assert s.S == 0 and s.n_stubedges == 0
    assert (ev.n_exposed, ev.n_hits) == (1, 1)
    assert check_invariants(s) == []


def test_c3_chosen_edge_is_uniform_over_root_edges():
    s = make_state(12, path=range(5), stubs={2: [7, 8, 9]})
    picked = {s.copy().apply_c3(3, ScriptedRng(k)).w for k in range(3)}
    assert picked == {7, 8, 9}


def test_c3_keeps_stub_when_degree_remains():
    s = make_state(12, path=range(5), stubs={2: [7, 8]})
    ev = s.apply_c3(3, ScriptedRng(1))
    assert ev.w == 8
    assert s.path_order() == [0, 1, 2, 8, 3, 4]
    assert roles(s, [2, 8, 3]) == [S, N, B]
    assert (ev.dS1, ev.dS2) == (1, -1)
    assert check_invariants(s) == []


# --- C4 -------------------------------------------------------------------

def test_c4_artificial_block_no_change():
    s = make_state(14, path=range(10))
    s.apply_c1(0, ScriptedRng(0))
    v = next(x for x in range(10) if s.role(x) is A)
    before = s.counters()
    ev = s.present(v, ScriptedRng())
    assert ev.case is Case.C4 and s.counters() == before


def test_c4_saturated_stub_no_change():
    s = make_state(12, path=range(7), stubs={3: [8, 9, 10]})
    ev = s.apply_c4(3)
    assert (ev.dP, ev.dS3) == (0, 0)


# --- C5 and fallback ------------------------------------------------------

def test_c5_pairs_the_last_two_isolated():
    s = make_state(10, path=[0, 1, 2, 4, 5, 6, 7, 8])
    ev = s.apply_c5(3, ScriptedRng(0))
    assert ev.w2 == 9 and s.partner[3] == 9 and s.partner[9] == 3
    assert (s.V1, s.V2) == (0, 2)
    assert (ev.dV1, ev.dV2) == (-2, 2)


def test_lone_isolated_is_appended():
    s = make_state(6, path=[0, 1, 2], pairs=[(4, 5)])
    ev = s.present(3, ScriptedRng())
    assert ev.case is Case.FALLBACK and ev.dP == 1
    assert s.tail == 3


def test_pairing_disabled_appends_isolated():
    s = ProcessState(Config(n=6, pairing_enabled=False))
    ev = s.present(4, ScriptedRng())
    assert ev.case is Case.FALLBACK
    assert s.path_order() == [4]


# --- C6 -------------------------------------------------------------------

def test_c6_starts_empty_path():
    s = make_state(5, pairs=[(1, 2)])
    s.apply_c6(1)
    assert (s.head, s.tail) == (1, 2)
    assert s.path_order() == [1, 2]


def test_c6_deletes_stubs_into_pair():
    s = make_state(12, path=range(7), pairs=[(8, 9)], stubs={1: [8, 10], 5: [9]})
    ev = s.apply_c6(9)
    assert sorted(ev.deleted) == [(1, 8), (5, 9)]
    assert s.degree(1) == 1 and s.degree(5) == 0
    assert check_invariants(s) == []


def test_c6_after_tail_stub_labels_structurally():
    s = make_state(10, path=range(5), pairs=[(6, 7)], stubs={4: [8]})
    s.apply_c6(6)
    assert s.path_order()[-3:] == [4, 6, 7]
    assert roles(s, [4, 6, 7]) == [S, N, B]
    assert check_invariants(s) == []


# --- delete_stubedges_into -----------------------------------------------

def test_delete_into_untargeted_vertex_is_noop():
    s = make_state(10, path=range(5), stubs={2: [6]})
    assert s.delete_stubedges_into({7}) == []
    assert s.degree(2) == 1


def test_delete_into_pair_removes_two_edge_root():
    s = make_state(12, path=range(7), pairs=[(8, 9)], stubs={3: [8, 9]})
    assert s.delete_stubedges_into({8, 9}) == [3]
    assert s.S == 0
    assert s.role(3) in (C, A)


def test_delete_into_degree_three_root():
    s = make_state(12, path=range(7), stubs={3: [8, 9, 10]})
    before = s.counters()
    s.delete_stubedges_into({9})
    after = s.counters()
    assert (after[4] - before[4], after[5] - before[5]) == (1, -1)


# --- rebalance_labels -----------------------------------------------------

def test_rebalance_one_interior_stub():
    s = make_state(12, path=range(10), stubs={4: [11]})
    assert sum(s.role(v) is C for v in range(10)) == 5
    assert sum(s.role(v) is A for v in range(10)) == 0


def test_rebalance_shared_block():
    s = make_state(14, path=range(10), stubs={2: [11], 6: [12]})
    assert roles(s, range(9)) == [B, N, S, N, B, N, S, N, B]
    assert s.role(9) is A
    assert s.clear_target() == 0


def test_rebalance_deficit_rule():
    # P=5, S=1: nothing may be clear, so the free vertex 4 is blocked
    s = make_state(8, path=range(5), stubs={1: [6]})
    assert s.clear_target() == 0
    assert s.role(4) is A


def test_artificial_blocks_are_latest_joined():
    s = make_state(16, path=range(12))
    s.apply_c1(0, ScriptedRng(0))
    # 9 free vertices (3..11), 7 may be clear: the two newest are blocked
    assert roles(s, [10, 11]) == [A, A]
    assert all(s.role(v) is C for v in range(3, 10))


# --- whole runs -----------------------------------------------------------

def test_full_run_ends_with_full_path():
    s = ProcessState(Config(n=1000, seed=3))
    rows = run_main_phase(s, random.Random(3))
    assert rows[-1].p == 1.0 and rows[-1].v1 == 0 and rows[-1].v2 == 0
    assert s.n_stubedges == 0


def test_rows_conserve_vertices():
    s = ProcessState(Config(n=1000, seed=4))
    rows = run_main_phase(s, random.Random(4), sample_every=7)
    for r in rows:
        assert round((r.p + r.v1 + r.v2) * 1000) == 1000
    assert all(round(r.tau * 1000) % 7 == 0 for r in rows[:-1])


def test_main_phase_stops_at_threshold():
    s = ProcessState(Config(n=2000, stop_mode=StopMode.MAIN_PHASE, epsilon=0.05))
    run_main_phase(s, random.Random(0))
    assert s.P >= 0.95 * 2000 and s.P < 2000


def test_same_seed_same_run():
    a = ProcessState(Config(n=500))
    b = ProcessState(Config(n=500))
    assert run_main_phase(a, random.Random(9)) == run_main_phase(b, random.Random(9))
    assert a.path_order() == b.path_order()


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(3, 60),
    cap=st.sampled_from([2, 3]),
    pairing=st.booleans(),
    seed=st.integers(0, 2**32),
)
def test_invariants_hold_every_round(n, cap, pairing, seed):
    s = ProcessState(Config(n=n, cap=cap, pairing_enabled=pairing))
    rng = random.Random(seed)
    steps = 0
    while not s.is_finished():
        before = s.counters()
        ev = s.step(rng)
        steps += 1
        after = s.counters()
        assert (ev.dP, ev.dV1, ev.dV2, ev.dS1, ev.dS2, ev.dS3) == tuple(a - b for a, b in zip(after, before))
        assert check_invariants(s) == []
        assert s.edges_added <= s.t
    assert s.t == steps
    assert s.P == n


def test_event_json_fields():
    import json
    s = make_state(8, path=range(5))
    rec = json.loads(s.apply_c1(2, ScriptedRng(0)).to_json())
    assert list(rec) == ["t", "v", "case", "dP", "dV1", "dV2", "dS1", "dS2", "dS3"]
    assert rec["case"] == "C1" and rec["dS1"] == 1
