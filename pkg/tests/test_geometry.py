import pytest
from hypothesis import given, strategies as st

from krk import geometry as geo
from krk.model import Square, generalized, pos, enumerate_legal
from krk.symmetry import Reflection, reflect

SPEC8 = generalized(8)

sq8 = st.builds(Square, st.integers(0, 7), st.integers(0, 7))


def test_distances():
    assert geo.manhattan(Square(3, 2), Square(5, 4)) == 4
    assert geo.manhattan(Square(0, 7), Square(7, 0)) == 14
    assert geo.chebyshev(Square(3, 2), Square(5, 4)) == 2
    assert geo.chebyshev(Square(0, 0), Square(3, 5)) == 5
    assert geo.chebyshev(Square(4, 4), Square(4, 4)) == 0


@given(sq8, sq8)
def test_manhattan_dominates_chebyshev(a, b):
    assert geo.manhattan(a, b) >= geo.chebyshev(a, b) >= 0


def test_room_paper_values():
    assert geo.room(pos((0, 0), (3, 6), (3, 3), True), SPEC8) == 15  # in line
    assert geo.room(pos((0, 0), (2, 6), (5, 4), True), SPEC8) == 8
    assert geo.room(pos((4, 4), (0, 0), (1, 1), True), SPEC8) == 2


def test_room_requires_rook():
    with pytest.raises(geo.RookCapturedError):
        geo.room(pos((0, 0), (3, 6), None, True), SPEC8)


def test_room_bounds_exhaustive_n5():
    spec = generalized(5)
    for p in enumerate_legal(spec, white_to_move=True):
        r = geo.room(p, spec)
        in_line = p.wr.x == p.bk.x or p.wr.y == p.bk.y
        if in_line:
            assert r == 2 * spec.n - 1
        else:
            assert 2 <= r <= 2 * spec.n - 2


def test_critical_square():
    assert geo.critical_square(pos((0, 0), (2, 6), (5, 4), True)) == Square(4, 5)
    assert geo.critical_square(pos((0, 0), (3, 6), (3, 3), True)) == Square(3, 4)
    assert geo.critical_square(pos((0, 0), (6, 5), (2, 5), True)) == Square(3, 5)


def test_critical_square_is_adjacent_to_rook():
    for p in list(enumerate_legal(generalized(5), white_to_move=True))[::43]:
        assert geo.chebyshev(geo.critical_square(p), p.wr) == 1


def test_exposure_offsets():
    # white to move needs a two-step head start for black
    assert geo.wr_exposed(pos((0, 0), (4, 4), (5, 5), True))
    assert not geo.wr_exposed(pos((3, 3), (7, 7), (5, 5), True))  # dW=2, dB=2
    # black to move only one
    assert geo.wr_exposed(pos((2, 2), (7, 7), (5, 5), False))  # 3 >= 2+1
    assert not geo.wr_exposed(pos((3, 3), (7, 7), (5, 5), False))  # 2 >= 3 no


def test_divides():
    assert geo.wr_divides(pos((0, 0), (6, 2), (3, 5), True))
    assert geo.wr_divides(pos((2, 0), (2, 7), (2, 5), True))  # via rank only
    assert geo.wr_divides(pos((0, 0), (0, 2), (0, 1), True))


def test_l_pattern():
    assert geo.l_pattern(pos((4, 4), (6, 4), (4, 5), True))
    assert geo.l_pattern(pos((4, 4), (4, 6), (5, 4), True))
    assert not geo.l_pattern(pos((4, 4), (7, 4), (4, 5), True))


def test_l_pattern_extended_covers_plain():
    p = pos((4, 4), (6, 4), (4, 5), True)
    assert geo.l_pattern_extended(p)
    stretched = pos((4, 4), (7, 4), (4, 5), True)
    assert geo.l_pattern_extended(stretched)
    offset = pos((4, 4), (6, 5), (4, 3), True)
    assert geo.l_pattern_extended(offset)
    assert not geo.l_pattern_extended(pos((4, 4), (4, 4 + 4), (5, 4), True))


def test_kings_same_edge():
    assert geo.kings_same_edge(pos((0, 3), (0, 6), (4, 4), True), SPEC8)
    assert not geo.kings_same_edge(pos((7, 3), (0, 6), (4, 4), True), SPEC8)
    assert not geo.kings_same_edge(pos((3, 3), (0, 6), (4, 4), True), SPEC8)


def test_towards_bk_edge():
    bk = Square(0, 4)
    assert geo.towards_bk_edge(Square(3, 4), Square(2, 4), bk, SPEC8)
    assert not geo.towards_bk_edge(Square(3, 4), Square(3, 5), bk, SPEC8)
    assert not geo.towards_bk_edge(Square(3, 4), Square(2, 4), Square(3, 3), SPEC8)


def test_reflection_invariance_exhaustive_n4():
    spec = generalized(4)
    preds = [
        lambda p: geo.room(p, spec),
        geo.wr_exposed,
        geo.wr_divides,
        geo.l_pattern,
        lambda p: geo.kings_same_edge(p, spec),
    ]
    for p in enumerate_legal(spec, white_to_move=True):
        for axis in Reflection:
            q = reflect(p, axis, spec)
            for f in preds:
                assert f(q) == f(p)
