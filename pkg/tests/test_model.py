import pytest
from hypothesis import given, settings, strategies as st

from krk.model import (
    BoardSpec,
    Variant,
    classic8,
    generalized,
    pos,
    pack,
    pack_str,
    unpack,
    well_formed,
    legal_position,
    legal_successors,
    is_legal_move,
    checkmate,
    stalemate,
    wr_attacks_bk,
    enumerate_legal,
)

SPEC8 = generalized(8)
SPEC4 = generalized(4)


def test_board_spec_invariants():
    with pytest.raises(ValueError):
        BoardSpec(3)
    with pytest.raises(ValueError):
        BoardSpec(9, Variant.CLASSIC8)
    assert classic8().n == 8
    assert generalized(16).coord_bits == 4
    assert generalized(16).packed_width == 26


def test_well_formed_examples():
    assert well_formed(pos((3, 2), (5, 4), (2, 6), True), SPEC8)
    assert not well_formed(pos((0, 0), (0, 0), None, True), SPEC8)
    assert not well_formed(pos((4, 0), (0, 0), (1, 1), True), SPEC4)


def test_legal_position_examples():
    assert not legal_position(pos((0, 0), (1, 1), (5, 5), True), SPEC8)  # kings touch
    # black in check is fine when black is on turn, not when white is
    p = pos((2, 0), (0, 0), (0, 5), False)
    assert legal_position(p, SPEC8)
    assert not legal_position(pos((2, 0), (0, 0), (0, 5), True), SPEC8)


def test_rook_attack_blocking():
    assert wr_attacks_bk(pos((2, 0), (0, 0), (0, 5), False))
    assert not wr_attacks_bk(pos((0, 3), (0, 0), (0, 5), False))  # king blocks
    assert not wr_attacks_bk(pos((2, 0), (0, 0), None, False))


def test_black_king_rook_capture():
    p = pos((4, 4), (0, 0), (1, 1), False)
    succs = legal_successors(p, SPEC8)
    assert len(succs) == 1
    assert succs[0].wr is None and tuple(succs[0].bk) == (1, 1)


def test_white_successors_include_checking_rook_moves():
    # the spec's n=4 example claims 6 successors, but rook moves that give
    # check are legal; the true count is 8 (see decisions ledger)
    p = pos((0, 0), (2, 2), (3, 3), True)
    succs = legal_successors(p, SPEC4)
    kings = [s for s in succs if s.wk != p.wk]
    rooks = [s for s in succs if s.wr != p.wr]
    assert len(kings) == 2
    assert len(rooks) == 6
    assert len(succs) == 8


def test_closure_exhaustive_n4():
    for p in enumerate_legal(SPEC4, white_to_move=True):
        for s in legal_successors(p, SPEC4):
            assert legal_position(s, SPEC4)
            assert s.white_to_move != p.white_to_move


def test_is_legal_move():
    p = pos((4, 4), (0, 0), (1, 1), False)
    q = pos((4, 4), (1, 1), None, True)
    assert is_legal_move(p, q, SPEC8)
    null = pos((4, 4), (0, 0), (1, 1), True)
    assert not is_legal_move(p, null, SPEC8)


def test_checkmate_and_stalemate():
    mate = pos((2, 0), (0, 0), (0, 5), False)
    assert checkmate(mate, SPEC8)
    assert not stalemate(mate, SPEC8)
    # the spec's stalemate example is not actually stalemate: the white king
    # blocks its own rook's rank, so the black king escapes to (0,1)
    bogus = pos((2, 1), (0, 0), (5, 1), False)
    assert not stalemate(bogus, SPEC8)
    assert [tuple(s.bk) for s in legal_successors(bogus, SPEC8)] == [(0, 1)]
    real = pos((0, 2), (0, 0), (1, 4), False)
    assert stalemate(real, SPEC8)
    assert not checkmate(real, SPEC8)
    assert not checkmate(pos((2, 0), (0, 0), (5, 5), True), SPEC8)


def test_paper_bitvector_example():
    p = pos((3, 2), (2, 6), (5, 4), True)
    assert pack_str(p, SPEC8) == "01101010110001011010"


def test_unpack_rejects_out_of_range():
    spec5 = generalized(5)
    bad = pack(pos((7, 2), (2, 1), (5, 4), True), SPEC8)
    with pytest.raises(ValueError):
        unpack(bad, spec5)


@settings(max_examples=300, deadline=None)
@given(st.integers(4, 64), st.data())
def test_pack_roundtrip(n, data):
    spec = generalized(n)
    sq = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    wk = data.draw(sq)
    bk = data.draw(sq.filter(lambda s: s != wk))
    wr = data.draw(st.one_of(st.none(), sq.filter(lambda s: s not in (wk, bk))))
    p = pos(wk, bk, wr, data.draw(st.booleans()))
    assert unpack(pack(p, spec), spec) == p


def test_enumeration_counts_and_order():
    packed = [pack(p, SPEC4) for p in enumerate_legal(SPEC4, white_to_move=True)]
    assert len(packed) == 1312
    assert packed == sorted(packed)
    assert sum(1 for _ in enumerate_legal(SPEC4)) == 3496  # both sides


def test_white_moves_never_lose_rook():
    for p in list(enumerate_legal(SPEC4, white_to_move=True))[::97]:
        for s in legal_successors(p, SPEC4):
            assert s.wr is not None
