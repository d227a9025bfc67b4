"""Chess rules for the KRK fragment on an n-by-n board.

Positions hold the two kings, an optional white rook (None once captured)
and the side to move.  Everything here is a pure function over immutable
values; the vectorized counterparts live in engine.py and are cross-checked
against this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Optional


class Variant(str, Enum):
    CLASSIC8 = "classic8"
    GENERALIZED = "generalized"


class Square(NamedTuple):
    x: int  # file
    y: int  # rank


@dataclass(frozen=True)
class BoardSpec:
    """Board dimension plus the strategy-variant switch."""

    n: int
    variant: Variant = Variant.GENERALIZED

    def __post_init__(self) -> None:
        if self.n < 4:
            raise ValueError(f"board dimension must be >= 4, got {self.n}")
        if self.variant == Variant.CLASSIC8 and self.n != 8:
            raise ValueError("classic8 variant is only defined for n=8")

    @property
    def coord_bits(self) -> int:
        return max(1, (self.n - 1).bit_length())

    @property
    def packed_width(self) -> int:
        return 2 + 6 * self.coord_bits

    def on_board(self, sq: Square) -> bool:
        return 0 <= sq.x < self.n and 0 <= sq.y < self.n


def classic8() -> BoardSpec:
    return BoardSpec(8, Variant.CLASSIC8)


def generalized(n: int) -> BoardSpec:
    return BoardSpec(n, Variant.GENERALIZED)


@dataclass(frozen=True)
class KRKPosition:
    wk: Square
    bk: Square
    wr: Optional[Square]  # None = rook captured
    white_to_move: bool

    @property
    def rook_captured(self) -> bool:
        return self.wr is None


def pos(wk, bk, wr, white_to_move: bool) -> KRKPosition:
    """Shorthand constructor taking plain (x, y) tuples."""
    return KRKPosition(
        Square(*wk), Square(*bk), None if wr is None else Square(*wr), white_to_move
    )


KING_STEPS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]


def well_formed(p: KRKPosition, spec: BoardSpec) -> bool:
    """All present pieces on board and on distinct squares."""
    if not (spec.on_board(p.wk) and spec.on_board(p.bk)):
        return False
    if p.wk == p.bk:
        return False
    if p.wr is not None:
        if not spec.on_board(p.wr) or p.wr == p.wk or p.wr == p.bk:
            return False
    return True


def _adjacent(a: Square, b: Square) -> bool:
    return max(abs(a.x - b.x), abs(a.y - b.y)) == 1


def _wk_blocks_line(wr: Square, wk: Square, target: Square) -> bool:
    """White king strictly between rook and target on their shared rank/file."""
    if wr.x == target.x and wk.x == wr.x:
        return min(wr.y, target.y) < wk.y < max(wr.y, target.y)
    if wr.y == target.y and wk.y == wr.y:
        return min(wr.x, target.x) < wk.x < max(wr.x, target.x)
    return False


def wr_attacks_bk(p: KRKPosition) -> bool:
    """Rook gives check: shared line, white king not blocking it."""
    if p.wr is None:
        return False
    if p.wr.x != p.bk.x and p.wr.y != p.bk.y:
        return False
    return not _wk_blocks_line(p.wr, p.wk, p.bk)


def _wr_attacks_square(wr: Square, wk: Square, sq: Square) -> bool:
    if sq == wr:
        return False
    if wr.x != sq.x and wr.y != sq.y:
        return False
    return not _wk_blocks_line(wr, wk, sq)


def in_check(p: KRKPosition) -> bool:
    """Side on turn is in check (white can only be checked by the adjacent king)."""
    if p.white_to_move:
        return _adjacent(p.wk, p.bk)
    return _adjacent(p.wk, p.bk) or wr_attacks_bk(p)


def legal_position(p: KRKPosition, spec: BoardSpec) -> bool:
    """Well-formed and the side NOT on turn is not in check."""
    if not well_formed(p, spec):
        return False
    if _adjacent(p.wk, p.bk):
        return False  # whoever is not on turn would be in check
    if p.white_to_move:
        return not wr_attacks_bk(p)  # black may not stand in check already
    return True  # black cannot check the white king other than king-to-king


def legal_successors(p: KRKPosition, spec: BoardSpec) -> list[KRKPosition]:
    """All positions reachable by one legal move of the side on turn."""
    if not legal_position(p, spec):
        raise ValueError("legal_successors requires a legal position")
    out: list[KRKPosition] = []
    if p.white_to_move:
        for dx, dy in KING_STEPS:
            t = Square(p.wk.x + dx, p.wk.y + dy)
            if not spec.on_board(t) or t == p.wr or t == p.bk:
                continue
            q = KRKPosition(t, p.bk, p.wr, False)
            if legal_position(q, spec):
                out.append(q)
        if p.wr is not None:
            for t in rook_targets(p, spec):
                q = KRKPosition(p.wk, p.bk, t, False)
                if legal_position(q, spec):
                    out.append(q)
    else:
        for dx, dy in KING_STEPS:
            t = Square(p.bk.x + dx, p.bk.y + dy)
            if not spec.on_board(t) or t == p.wk:
                continue
            wr = None if t == p.wr else p.wr
            q = KRKPosition(p.wk, t, wr, True)
            if legal_position(q, spec):
                out.append(q)
    return out


def rook_targets(p: KRKPosition, spec: BoardSpec) -> list[Square]:
    """Rook destinations in the pinned enumeration order.

    All horizontal targets by ascending file, then all vertical targets by
    ascending rank; squares past a blocking king are excluded.
    """
    assert p.wr is not None
    wr, wk, bk = p.wr, p.wk, p.bk
    out = []
    for x in range(spec.n):
        if x == wr.x:
            continue
        t = Square(x, wr.y)
        if t == wk or t == bk:
            continue
        if _wk_blocks_line(wr, wk, t):
            continue
        if bk.y == wr.y and min(wr.x, x) < bk.x < max(wr.x, x):
            continue
        out.append(t)
    for y in range(spec.n):
        if y == wr.y:
            continue
        t = Square(wr.x, y)
        if t == wk or t == bk:
            continue
        if _wk_blocks_line(wr, wk, t):
            continue
        if bk.x == wr.x and min(wr.y, y) < bk.y < max(wr.y, y):
            continue
        out.append(t)
    return out


def white_move_targets(p: KRKPosition, spec: BoardSpec) -> list[tuple[str, Square]]:
    """White's move enumeration: king moves 1-8, then rook moves.

    King steps come in lexicographic (dx, dy) order; rook targets follow
    rook_targets order.  Off-board or occupied king targets are skipped, so
    indices are positional within this list.
    """
    out: list[tuple[str, Square]] = []
    for dx, dy in KING_STEPS:
        t = Square(p.wk.x + dx, p.wk.y + dy)
        if spec.on_board(t) and t != p.wr and t != p.bk:
            out.append(("K", t))
    if p.wr is not None:
        for t in rook_targets(p, spec):
            out.append(("R", t))
    return out


def apply_white(p: KRKPosition, piece: str, target: Square) -> KRKPosition:
    if piece == "K":
        return KRKPosition(target, p.bk, p.wr, False)
    return KRKPosition(p.wk, p.bk, target, False)


def is_legal_move(p1: KRKPosition, p2: KRKPosition, spec: BoardSpec) -> bool:
    if not legal_position(p1, spec):
        return False
    return p2 in legal_successors(p1, spec)


def checkmate(p: KRKPosition, spec: BoardSpec) -> bool:
    if p.white_to_move or not legal_position(p, spec):
        return False
    return wr_attacks_bk(p) and not legal_successors(p, spec)


def stalemate(p: KRKPosition, spec: BoardSpec) -> bool:
    if p.white_to_move or not legal_position(p, spec):
        return False
    return not wr_attacks_bk(p) and not legal_successors(p, spec)


# --- packed encoding ---------------------------------------------------------
#
# Layout, most significant first: wk.x wk.y wr.x wr.y bk.x bk.y (coord_bits
# each), then the white-to-move bit, then the rook-captured bit.  A captured
# rook packs as zeroed coordinates with the captured bit set.


def pack(p: KRKPosition, spec: BoardSpec) -> int:
    if not well_formed(p, spec):
        raise ValueError("pack requires a well-formed position")
    b = spec.coord_bits
    wrx, wry = (0, 0) if p.wr is None else (p.wr.x, p.wr.y)
    v = p.wk.x
    for c in (p.wk.y, wrx, wry, p.bk.x, p.bk.y):
        v = (v << b) | c
    return (v << 2) | (int(p.white_to_move) << 1) | int(p.wr is None)


def unpack(bits: int, spec: BoardSpec) -> KRKPosition:
    b = spec.coord_bits
    if not 0 <= bits < (1 << spec.packed_width):
        raise ValueError("packed value out of range")
    captured = bool(bits & 1)
    wtm = bool((bits >> 1) & 1)
    v = bits >> 2
    mask = (1 << b) - 1
    coords = []
    for _ in range(6):
        coords.append(v & mask)
        v >>= b
    bky, bkx, wry, wrx, wky, wkx = coords
    for c in (wkx, wky, bkx, bky):
        if c >= spec.n:
            raise ValueError(f"coordinate {c} exceeds board size {spec.n}")
    if captured:
        return KRKPosition(Square(wkx, wky), Square(bkx, bky), None, wtm)
    if wrx >= spec.n or wry >= spec.n:
        raise ValueError(f"rook coordinate exceeds board size {spec.n}")
    return KRKPosition(Square(wkx, wky), Square(bkx, bky), Square(wrx, wry), wtm)


def pack_str(p: KRKPosition, spec: BoardSpec) -> str:
    """Zero-padded binary string of the packed position."""
    return format(pack(p, spec), f"0{spec.packed_width}b")


def enumerate_legal(
    spec: BoardSpec,
    white_to_move: Optional[bool] = None,
    rook_present: Optional[bool] = True,
) -> Iterator[KRKPosition]:
    """Legal positions matching the filters, in ascending packed order.

    Pure-Python reference; engine.count_legal handles large boards.
    """
    n = spec.n
    squares = [Square(x, y) for x in range(n) for y in range(n)]
    found = []
    for wk in squares:
        for bk in squares:
            if wk == bk or _adjacent(wk, bk):
                continue
            if rook_present is not True:
                for wtm in (True, False):
                    if white_to_move is not None and wtm != white_to_move:
                        continue
                    p = KRKPosition(wk, bk, None, wtm)
                    found.append((pack(p, spec), p))
            if rook_present is not False:
                for wr in squares:
                    if wr == wk or wr == bk:
                        continue
                    for wtm in (True, False):
                        if white_to_move is not None and wtm != white_to_move:
                            continue
                        p = KRKPosition(wk, bk, wr, wtm)
                        if legal_position(p, spec):
                            found.append((pack(p, spec), p))
    found.sort(key=lambda t: t[0])
    for _, p in found:
        yield p
