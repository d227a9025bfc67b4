"""Auxiliary numeric notions used by the strategy: distances, room,
critical square, rook exposure, division, L-pattern, edge tests."""

from __future__ import annotations

from .model import BoardSpec, KRKPosition, Square


class RookCapturedError(ValueError):
    """Raised when a rook-dependent notion is queried with the rook gone."""


def manhattan(a: Square, b: Square) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def chebyshev(a: Square, b: Square) -> int:
    return max(abs(a.x - b.x), abs(a.y - b.y))


def _require_rook(p: KRKPosition) -> Square:
    if p.wr is None:
        raise RookCapturedError("rook has been captured")
    return p.wr


def unconfined_room(spec: BoardSpec) -> int:
    return 2 * spec.n - 1


def room(p: KRKPosition, spec: BoardSpec) -> int:
    """Half-perimeter of the rectangle the rook confines the black king to.

    Sentinel 2n-1 when rook and black king share a file or rank (the king is
    not confined to a rectangle then).
    """
    wr = _require_rook(p)
    bk = p.bk
    if wr.x == bk.x or wr.y == bk.y:
        return unconfined_room(spec)
    x = wr.x if wr.x > bk.x else (spec.n - 1) - wr.x
    y = wr.y if wr.y > bk.y else (spec.n - 1) - wr.y
    return x + y


def critical_square(p: KRKPosition) -> Square:
    """Square adjacent to the rook in the direction of the black king."""
    wr = _require_rook(p)
    bk = p.bk
    if wr == bk:
        raise ValueError("rook and black king on the same square")
    x = wr.x if wr.x == bk.x else (wr.x - 1 if wr.x > bk.x else wr.x + 1)
    y = wr.y if wr.y == bk.y else (wr.y - 1 if wr.y > bk.y else wr.y + 1)
    return Square(x, y)


def wr_exposed(p: KRKPosition) -> bool:
    """Black can win the race to the rook.

    With white on turn the white king may move first, hence the offset 2;
    with black on turn the offset is 1.
    """
    wr = _require_rook(p)
    d_own = chebyshev(wr, p.wk)
    d_opp = chebyshev(wr, p.bk)
    offset = 2 if p.white_to_move else 1
    return d_own >= d_opp + offset


def wr_divides(p: KRKPosition) -> bool:
    """Rook file or rank strictly between the kings' files or ranks."""
    wr = _require_rook(p)
    wk, bk = p.wk, p.bk
    return (
        min(wk.x, bk.x) < wr.x < max(wk.x, bk.x)
        or min(wk.y, bk.y) < wr.y < max(wk.y, bk.y)
    )


def l_pattern(p: KRKPosition) -> bool:
    """Kings two apart on a line, rook adjacent to the white king
    perpendicular to that line."""
    wr = _require_rook(p)
    wk, bk = p.wk, p.bk
    row_form = (
        wk.y == bk.y and abs(wk.x - bk.x) == 2 and wr.x == wk.x and abs(wr.y - wk.y) == 1
    )
    col_form = (
        wk.x == bk.x and abs(wk.y - bk.y) == 2 and wr.y == wk.y and abs(wr.x - wk.x) == 1
    )
    return row_form or col_form


def l_pattern_extended(p: KRKPosition) -> bool:
    """L-pattern loosened for white-to-move positions: after black's reply
    the kings may sit 2 or 3 apart with a lateral offset of one, the rook
    still perpendicular-adjacent to the white king."""
    wr = _require_rook(p)
    wk, bk = p.wk, p.bk
    row = (
        abs(wk.x - bk.x) in (2, 3)
        and abs(wk.y - bk.y) <= 1
        and wr.x == wk.x
        and abs(wr.y - wk.y) == 1
    )
    col = (
        abs(wk.y - bk.y) in (2, 3)
        and abs(wk.x - bk.x) <= 1
        and wr.y == wk.y
        and abs(wr.x - wk.x) == 1
    )
    return row or col


def kings_same_edge(p: KRKPosition, spec: BoardSpec) -> bool:
    edge = (0, spec.n - 1)
    return (p.wk.x == p.bk.x and p.wk.x in edge) or (
        p.wk.y == p.bk.y and p.wk.y in edge
    )


def towards_bk_edge(wk_from: Square, wk_to: Square, bk: Square, spec: BoardSpec) -> bool:
    """True iff the move strictly reduces the distance to some edge line
    holding the black king (a cornered king lies on two edges)."""
    last = spec.n - 1
    if bk.x == 0 and wk_to.x < wk_from.x:
        return True
    if bk.x == last and (last - wk_to.x) < (last - wk_from.x):
        return True
    if bk.y == 0 and wk_to.y < wk_from.y:
        return True
    if bk.y == last and (last - wk_to.y) < (last - wk_from.y):
        return True
    return False
