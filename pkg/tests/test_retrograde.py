import json
import struct

import numpy as np
import pytest

from krk import engine, mutations
from krk.model import generalized
from krk.retrograde import (
    closure_check,
    replay_worst_game,
    retrograde_verify,
    write_depth_dump,
)


@pytest.fixture(scope="module")
def result4():
    return retrograde_verify(generalized(4))


def test_n4_all_winning(result4):
    assert result4.all_winning
    assert result4.total_positions == 1312
    assert result4.closure_ok
    assert sum(result4.per_depth) == result4.total_positions
    assert result4.max_plies % 2 == 1
    assert abs(result4.max_plies - 21) <= 2.1  # paper's 21, +-10% tie-break band


def test_depth_zero_and_one_match_mate_kinds(result4):
    spec = generalized(4)
    hist = engine.classify_histogram(spec)
    assert result4.per_depth[0] == hist["ImmediateMate"]
    assert result4.per_depth[1] == hist["ReadyToMate"]


def test_report_json_fields(result4):
    payload = json.loads(result4.to_json())
    assert set(payload) == {
        "n", "variant", "mode", "all_winning", "total_positions",
        "max_plies", "per_depth", "elapsed_ms",
    }


def test_closure_check():
    assert closure_check(generalized(4))


def test_relation_mode_also_wins():
    r = retrograde_verify(generalized(4), mode="relation")
    assert r.all_winning
    assert r.total_positions == 1312
    # the non-deterministic bound can only be worse than the function's
    assert r.max_plies >= 19


def test_worst_case_replay(result4):
    spec = generalized(4)
    rng = np.random.default_rng(7)
    depth = result4._depth_table
    packs = result4._packed
    for i in rng.choice(len(packs), size=200, replace=False):
        plies = replay_worst_game(result4, spec, int(packs[i]))
        assert plies == 2 * int(depth[i]) + 1


def test_depth_dump_format(result4, tmp_path):
    spec = generalized(4)
    path = tmp_path / "krk4.dtm"
    write_depth_dump(result4, spec, str(path))
    blob = path.read_bytes()
    assert blob[:4] == b"KRKD"
    n, width = struct.unpack("<II", blob[4:12])
    assert (n, width) == (4, 14)
    table = np.frombuffer(blob[12:], dtype="<u2")
    assert len(table) == 1 << width
    assert int((table != 0xFFFF).sum()) == 1312


def test_all_winning_is_order_independent():
    # reversed within-direction rook enumeration must not change the verdict
    orig = engine._rook_targets_naive
    engine._rook_targets_naive = lambda p, n: list(reversed(orig(p, n)))
    try:
        r = retrograde_verify(generalized(4))
    finally:
        engine._rook_targets_naive = orig
    assert r.all_winning


def test_mutations_break_verification():
    with mutations.enabled(mutations.SQUEEZE_DROP_EXPOSURE):
        r = retrograde_verify(generalized(4))
        assert not (r.all_winning and r.closure_ok)
    with mutations.enabled(mutations.ROOK_HOME_DROP_STALEMATE):
        r = retrograde_verify(generalized(4))
        assert not (r.all_winning and r.closure_ok)
    assert retrograde_verify(generalized(4)).all_winning
