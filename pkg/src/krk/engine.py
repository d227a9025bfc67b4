"""Vectorized sweeps over bit-packed KRK position sets.

All heavy verification paths (position counting, move-kind classification,
retrograde tables, equivalence sweeps) run here on numpy arrays indexed by
packed position value.  Semantics are pinned by the scalar reference in
model.py / strategy.py; tests cross-check the two exhaustively on small
boards and against the published counts on 8x8.
"""

from __future__ import annotations

from typing import Iterator, Optional

import numpy as np

from . import mutations
from .model import KING_STEPS, BoardSpec, Variant
from .strategy import MoveKind, cascade

CHUNK = 1 << 21

KIND_CODE = {k: i for i, k in enumerate(MoveKind)}
CODE_KIND = {i: k for k, i in KIND_CODE.items()}
NO_KIND = 255


class Pos:
    """Column-oriented batch of positions (coordinates as int16 arrays)."""

    __slots__ = ("wkx", "wky", "wrx", "wry", "bkx", "bky")

    def __init__(self, wkx, wky, wrx, wry, bkx, bky):
        self.wkx, self.wky = wkx, wky
        self.wrx, self.wry = wrx, wry
        self.bkx, self.bky = bkx, bky

    def __len__(self):
        return len(self.wkx)

    def take(self, idx) -> "Pos":
        return Pos(
            self.wkx[idx], self.wky[idx], self.wrx[idx], self.wry[idx],
            self.bkx[idx], self.bky[idx],
        )


def unpack_coords(packed: np.ndarray, spec: BoardSpec):
    """Split packed values into coordinate columns plus turn/captured flags."""
    b = spec.coord_bits
    mask = (1 << b) - 1
    cap = (packed & 1).astype(bool)
    wtm = ((packed >> 1) & 1).astype(bool)
    v = packed >> 2
    bky = (v & mask).astype(np.int16); v = v >> b
    bkx = (v & mask).astype(np.int16); v = v >> b
    wry = (v & mask).astype(np.int16); v = v >> b
    wrx = (v & mask).astype(np.int16); v = v >> b
    wky = (v & mask).astype(np.int16); v = v >> b
    wkx = (v & mask).astype(np.int16)
    return Pos(wkx, wky, wrx, wry, bkx, bky), wtm, cap


def pack_coords(p: Pos, wtm, cap, spec: BoardSpec) -> np.ndarray:
    b = spec.coord_bits
    v = p.wkx.astype(np.int64)
    for c in (p.wky, p.wrx, p.wry, p.bkx, p.bky):
        v = (v << b) | c.astype(np.int64)
    return (v << 2) | (np.asarray(wtm, dtype=np.int64) << 1) | np.asarray(cap, dtype=np.int64)


def _cheb(ax, ay, bx, by):
    return np.maximum(np.abs(ax - bx), np.abs(ay - by))


def _between(a, lo1, lo2):
    return (np.minimum(lo1, lo2) < a) & (a < np.maximum(lo1, lo2))


def _attacks(wrx, wry, wkx, wky, sx, sy):
    """Rook attacks square s, with only the white king able to block."""
    on_file = (wrx == sx) & ~((wkx == sx) & _between(wky, wry, sy))
    on_rank = (wry == sy) & ~((wky == sy) & _between(wkx, wrx, sx))
    return (on_file | on_rank) & ~((wrx == sx) & (wry == sy))


# --- black-to-move primitives -------------------------------------------------


def _bk_step_valid(q: Pos, dx: int, dy: int, n: int):
    """Black king step by (dx, dy): validity and whether it captures the rook."""
    tx, ty = q.bkx + dx, q.bky + dy
    on = (tx >= 0) & (tx < n) & (ty >= 0) & (ty < n)
    away = _cheb(tx, ty, q.wkx, q.wky) >= 2
    captures = (tx == q.wrx) & (ty == q.wry)
    safe = captures | ~_attacks(q.wrx, q.wry, q.wkx, q.wky, tx, ty)
    return on & away & safe, captures


def _bk_confinable(q: Pos, n: int):
    """Necessary condition for the black king to be out of moves.

    With all 8 neighbour squares on the board and the white king at Chebyshev
    distance >= 3, the rook's one file and one rank cover at most 6 of the 8
    neighbours, so some move always remains.
    """
    on_edge = (q.bkx == 0) | (q.bkx == n - 1) | (q.bky == 0) | (q.bky == n - 1)
    return on_edge | (_cheb(q.bkx, q.bky, q.wkx, q.wky) <= 2)


def bk_cannot_move(q: Pos, n: int):
    out = np.zeros(len(q.bkx), dtype=bool)
    idx = np.flatnonzero(_bk_confinable(q, n))
    if len(idx) == 0:
        return out
    sub = q.take(idx)
    can = np.zeros(len(idx), dtype=bool)
    for dx, dy in KING_STEPS:
        valid, _ = _bk_step_valid(sub, dx, dy, n)
        can |= valid
    out[idx] = ~can
    return out


def mate_mask(q: Pos, n: int):
    out = _attacks(q.wrx, q.wry, q.wkx, q.wky, q.bkx, q.bky)
    idx = np.flatnonzero(out)
    if len(idx):
        out[idx] = bk_cannot_move(q.take(idx), n)
    return out


def stalemate_mask(q: Pos, n: int):
    out = ~_attacks(q.wrx, q.wry, q.wkx, q.wky, q.bkx, q.bky)
    idx = np.flatnonzero(out)
    if len(idx):
        out[idx] = bk_cannot_move(q.take(idx), n)
    return out


def black_replies(q: Pos, spec: BoardSpec):
    """Packed white-to-move successors of black-to-move positions.

    Returns (valid, captures, packed) stacked over the 8 king steps; packed
    entries are only meaningful where valid.
    """
    n = spec.n
    valids, caps, packs = [], [], []
    for dx, dy in KING_STEPS:
        valid, captures = _bk_step_valid(q, dx, dy, n)
        tx = np.clip(q.bkx + dx, 0, n - 1)
        ty = np.clip(q.bky + dy, 0, n - 1)
        wrx = np.where(captures, 0, q.wrx)
        wry = np.where(captures, 0, q.wry)
        packed = pack_coords(Pos(q.wkx, q.wky, wrx, wry, tx, ty), True, captures, spec)
        valids.append(valid); caps.append(captures); packs.append(packed)
    return np.stack(valids), np.stack(caps), np.stack(packs)


# --- geometry -----------------------------------------------------------------


def room_of(wrx, wry, bkx, bky, n: int):
    inline = (wrx == bkx) | (wry == bky)
    x = np.where(wrx > bkx, wrx, (n - 1) - wrx)
    y = np.where(wry > bky, wry, (n - 1) - wry)
    return np.where(inline, 2 * n - 1, x + y)


def _critical(wrx, wry, bkx, bky):
    cx = np.where(wrx == bkx, wrx, np.where(wrx > bkx, wrx - 1, wrx + 1))
    cy = np.where(wry == bky, wry, np.where(wry > bky, wry - 1, wry + 1))
    return cx, cy


def _exposed(q: Pos, offset: int):
    return _cheb(q.wrx, q.wry, q.wkx, q.wky) >= _cheb(q.wrx, q.wry, q.bkx, q.bky) + offset


def _divides(q: Pos):
    return _between(q.wrx, q.wkx, q.bkx) | _between(q.wry, q.wky, q.bky)


def _l_pattern(q: Pos):
    row = (
        (q.wky == q.bky) & (np.abs(q.wkx - q.bkx) == 2)
        & (q.wrx == q.wkx) & (np.abs(q.wry - q.wky) == 1)
    )
    col = (
        (q.wkx == q.bkx) & (np.abs(q.wky - q.bky) == 2)
        & (q.wry == q.wky) & (np.abs(q.wrx - q.wkx) == 1)
    )
    return row | col


def _kings_same_edge(q: Pos, n: int):
    lo, hi = 0, n - 1
    return ((q.wkx == q.bkx) & ((q.wkx == lo) | (q.wkx == hi))) | (
        (q.wky == q.bky) & ((q.wky == lo) | (q.wky == hi))
    )


def _towards_bk_edge(fx, fy, tx, ty, bkx, bky, n: int):
    hi = n - 1
    return (
        ((bkx == 0) & (tx < fx))
        | ((bkx == hi) & (tx > fx))
        | ((bky == 0) & (ty < fy))
        | ((bky == hi) & (ty > fy))
    )


# --- white moves and kind conditions -------------------------------------------


def _rook_move_valid(p: Pos, tx, ty, n: int):
    on = (tx >= 0) & (tx < n) & (ty >= 0) & (ty < n)
    horiz = (ty == p.wry) & (tx != p.wrx)
    vert = (tx == p.wrx) & (ty != p.wry)
    blocked_h = ((p.wky == p.wry) & _between(p.wkx, p.wrx, tx)) | (
        (p.bky == p.wry) & _between(p.bkx, p.wrx, tx)
    )
    blocked_v = ((p.wkx == p.wrx) & _between(p.wky, p.wry, ty)) | (
        (p.bkx == p.wrx) & _between(p.bky, p.wry, ty)
    )
    free = (horiz & ~blocked_h) | (vert & ~blocked_v)
    not_occupied = ~((tx == p.wkx) & (ty == p.wky)) & ~((tx == p.bkx) & (ty == p.bky))
    return on & free & not_occupied


def _king_move_valid(p: Pos, tx, ty, n: int):
    on = (tx >= 0) & (tx < n) & (ty >= 0) & (ty < n)
    step = _cheb(tx, ty, p.wkx, p.wky) == 1
    not_rook = ~((tx == p.wrx) & (ty == p.wry))
    apart = _cheb(tx, ty, p.bkx, p.bky) >= 2
    return on & step & not_rook & apart


def _succ(p: Pos, piece: str, tx, ty) -> Pos:
    z = np.zeros_like(p.wkx)
    tx = tx + z  # broadcast scalars
    ty = ty + z
    if piece == "K":
        return Pos(tx, ty, p.wrx, p.wry, p.bkx, p.bky)
    return Pos(p.wkx, p.wky, tx, ty, p.bkx, p.bky)


def _rook_can_mate(r: Pos, spec: BoardSpec, use_candidates: bool):
    """A mating rook move exists from the white-to-move batch r."""
    n = spec.n
    if use_candidates:
        targets = [(0, r.wry), (n - 1, r.wry), (r.wrx, 0), (r.wrx, n - 1)]
    else:
        targets = [(x, r.wry) for x in range(n)] + [(r.wrx, y) for y in range(n)]
    out = np.zeros(len(r), dtype=bool)
    for tx, ty in targets:
        z = np.zeros_like(r.wrx)
        tx, ty = tx + z, ty + z
        valid = _rook_move_valid(r, tx, ty, n)
        out |= valid & mate_mask(Pos(r.wkx, r.wky, tx, ty, r.bkx, r.bky), n)
    return out


def _rtm_scaffold(q: Pos, n: int):
    """Necessary geometry for mate on the move after next.

    Any checkmate has the black king on an edge with the white king exactly
    two lines away, aligned within one square; one black reply earlier that
    means: some edge within 1 of the black king, white king at distance 2
    from it and within 2 along it.
    """
    hi = n - 1
    out = np.zeros(len(q.bkx), dtype=bool)
    for cross_bk, cross_wk, along_bk, along_wk in (
        (q.bkx, q.wkx, q.bky, q.wky),
        (hi - q.bkx, hi - q.wkx, q.bky, q.wky),
        (q.bky, q.wky, q.bkx, q.wkx),
        (hi - q.bky, hi - q.wky, q.bkx, q.wkx),
    ):
        out |= (cross_bk <= 1) & (cross_wk == 2) & (np.abs(along_wk - along_bk) <= 2)
    return out


def _ready_to_mate_cond(q: Pos, spec: BoardSpec, use_candidates: bool):
    n = spec.n
    out = np.zeros(len(q.bkx), dtype=bool)
    idx = np.flatnonzero(_rtm_scaffold(q, n))
    if len(idx) == 0:
        return out
    sub = q.take(idx)
    ok = ~stalemate_mask(sub, n)
    for dx, dy in KING_STEPS:
        live = np.flatnonzero(ok)
        if len(live) == 0:
            break
        s = sub.take(live)
        valid, captures = _bk_step_valid(s, dx, dy, n)
        tx = np.clip(s.bkx + dx, 0, n - 1)
        ty = np.clip(s.bky + dy, 0, n - 1)
        reply = Pos(s.wkx, s.wky, s.wrx, s.wry, tx, ty)
        mate_next = ~captures & _rook_can_mate(reply, spec, use_candidates)
        ok[live] = ~valid | mate_next
    out[idx] = ok
    return out


def guarded_ok(q: Pos):
    """Rook adjacent to the black king only if the white king guards it."""
    return (_cheb(q.wrx, q.wry, q.bkx, q.bky) > 1) | (
        _cheb(q.wrx, q.wry, q.wkx, q.wky) == 1
    )


def _and_not_stalemate(cheap, q: Pos, n: int):
    out = cheap.copy()
    idx = np.flatnonzero(cheap)
    if len(idx):
        out[idx] = ~stalemate_mask(q.take(idx), n)
    return out


def _edge_clause(q: Pos, spec: BoardSpec):
    n = spec.n
    room_q = room_of(q.wrx, q.wry, q.bkx, q.bky, n)
    if spec.variant == Variant.CLASSIC8:
        on_edge = (q.wkx == 0) | (q.wkx == n - 1) | (q.wky == 0) | (q.wky == n - 1)
        base = ~on_edge
    else:
        base = ~_kings_same_edge(q, n)
    return (room_q > 3) | base


def _cond(kind: MoveKind, p: Pos, piece: str, q: Pos, spec: BoardSpec,
          use_candidates: bool = True):
    """move_cond on a batch: q = successor of p after a valid white move."""
    n = spec.n
    if kind == MoveKind.IMMEDIATE_MATE:
        if piece != "R":
            return np.zeros(len(p), dtype=bool)
        return mate_mask(q, n)

    if kind == MoveKind.READY_TO_MATE:
        return _ready_to_mate_cond(q, spec, use_candidates)

    if kind == MoveKind.SQUEEZE:
        if piece != "R":
            return np.zeros(len(p), dtype=bool)
        room_p = room_of(p.wrx, p.wry, p.bkx, p.bky, n)
        room_q = room_of(q.wrx, q.wry, q.bkx, q.bky, n)
        cheap = (room_q < room_p) & _divides(q)
        if not mutations.active(mutations.SQUEEZE_DROP_EXPOSURE):
            cheap &= ~_exposed(q, 1)
        return _and_not_stalemate(cheap, q, n)

    if kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG,
                MoveKind.KEEP_ROOM_DIAG, MoveKind.KEEP_ROOM_NON_DIAG):
        if piece != "K":
            return np.zeros(len(p), dtype=bool)
        diag = (np.abs(q.wkx - p.wkx) == 1) & (np.abs(q.wky - p.wky) == 1)
        want_diag = kind in (MoveKind.APPROACH_DIAG, MoveKind.KEEP_ROOM_DIAG)
        ok = diag == want_diag
        if kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG):
            cx, cy = _critical(q.wrx, q.wry, q.bkx, q.bky)
            closer = (np.abs(q.wkx - cx) + np.abs(q.wky - cy)) < (
                np.abs(p.wkx - cx) + np.abs(p.wky - cy)
            )
            ok &= closer & (_divides(q) | _l_pattern(q))
        else:
            keeps = _cheb(q.wkx, q.wky, q.wrx, q.wry) <= _cheb(p.wkx, p.wky, p.wrx, p.wry)
            ok &= keeps & _divides(q)
        ok &= ~_exposed(q, 1) & _edge_clause(q, spec)
        return _and_not_stalemate(ok, q, n)

    if kind == MoveKind.ROOK_HOME:
        if piece != "R":
            return np.zeros(len(p), dtype=bool)
        dx = q.wrx - q.wkx
        dy = q.wry - q.wky
        # arrival ONTO a king-adjacent line, on the black king's side of it
        # (either side when the kings are aligned on that axis)
        via_file = (np.abs(dx) == 1) & (q.wrx != p.wrx) & (
            (dx * (q.bkx - q.wkx) > 0) | (q.bkx == q.wkx)
        )
        via_rank = (np.abs(dy) == 1) & (q.wry != p.wry) & (
            (dy * (q.bky - q.wky) > 0) | (q.bky == q.wky)
        )
        # an exposed post is tolerable only while actually homing in on the king
        homing = (np.abs(q.wrx - q.wkx) + np.abs(q.wry - q.wky)) < (
            np.abs(p.wrx - p.wkx) + np.abs(p.wry - p.wky)
        )
        safe = ~_exposed(q, 1) | homing
        ok = (via_file | via_rank) & safe & guarded_ok(q)
        if mutations.active(mutations.ROOK_HOME_DROP_STALEMATE):
            return ok
        return _and_not_stalemate(ok, q, n)

    if kind == MoveKind.ROOK_SAFE:
        if piece != "R":
            return np.zeros(len(p), dtype=bool)
        hi = n - 1
        new_edge = (
            ((q.wrx == 0) & (p.wrx != 0))
            | ((q.wrx == hi) & (p.wrx != hi))
            | ((q.wry == 0) & (p.wry != 0))
            | ((q.wry == hi) & (p.wry != hi))
        )
        d_bk = _cheb(q.wrx, q.wry, q.bkx, q.bky)
        both_next = (_cheb(q.wrx, q.wry, q.wkx, q.wky) == 1) & (d_bk == 1)
        return _and_not_stalemate(new_edge & (both_next | (d_bk > 2)), q, n)

    if kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
        if piece != "R":
            return np.zeros(len(p), dtype=bool)
        hi = n - 1
        shared = (
            ((q.wkx == 0) & (q.wrx == 0))
            | ((q.wkx == hi) & (q.wrx == hi))
            | ((q.wky == 0) & (q.wry == 0))
            | ((q.wky == hi) & (q.wry == hi))
        )
        return shared & (_cheb(q.wrx, q.wry, q.bkx, q.bky) == 2)

    raise ValueError(kind)


def _king_targets(p: Pos):
    return [("K", p.wkx + dx, p.wky + dy) for dx, dy in KING_STEPS]


def _rook_targets_naive(p: Pos, n: int):
    return [("R", np.full_like(p.wrx, x), p.wry) for x in range(n)] + [
        ("R", p.wrx, np.full_like(p.wry, y)) for y in range(n)
    ]


def _targets(kind: MoveKind, p: Pos, spec: BoardSpec, use_candidates: bool):
    n = spec.n
    if not use_candidates:
        if kind in (MoveKind.IMMEDIATE_MATE, MoveKind.SQUEEZE, MoveKind.ROOK_HOME,
                    MoveKind.ROOK_SAFE, MoveKind.ROOK_SAFE_SMALL_BOARDS):
            return _rook_targets_naive(p, n)
        if kind == MoveKind.READY_TO_MATE:
            return _king_targets(p) + _rook_targets_naive(p, n)
        return _king_targets(p)
    hi = n - 1
    rook_edges = [("R", np.full_like(p.wrx, 0), p.wry), ("R", np.full_like(p.wrx, hi), p.wry),
                  ("R", p.wrx, np.full_like(p.wry, 0)), ("R", p.wrx, np.full_like(p.wry, hi))]
    if kind == MoveKind.IMMEDIATE_MATE or kind == MoveKind.ROOK_SAFE:
        return rook_edges
    bk_lines = [("R", p.bkx + 1, p.wry), ("R", p.bkx - 1, p.wry),
                ("R", p.wrx, p.bky + 1), ("R", p.wrx, p.bky - 1)]
    if kind == MoveKind.READY_TO_MATE:
        wk_lines = [("R", p.wkx, p.wry), ("R", p.wrx, p.wky)]
        return _king_targets(p) + rook_edges + bk_lines + wk_lines
    if kind == MoveKind.SQUEEZE:
        wk, bk, wr = (p.wkx, p.wky), (p.bkx, p.bky), (p.wrx, p.wry)
        return [
            ("R", (wk[0] + bk[0]) // 2, wr[1]),
            ("R", (wk[0] + bk[0] + 1) // 2, wr[1]),
            ("R", wr[0], (wk[1] + bk[1]) // 2),
            ("R", wr[0], (wk[1] + bk[1] + 1) // 2),
            ("R", bk[0] + wk[1] - wr[1], wr[1]),
            ("R", wr[0], bk[0] + wk[1] - wr[0]),
            ("R", wk[0] + bk[1] - wr[1], wr[1]),
            ("R", wr[0], wk[0] + bk[1] - wr[0]),
            ("R", bk[0] - wk[1] + wr[1], wr[1]),
            ("R", wr[0], wr[0] - bk[0] + wk[1]),
            ("R", wk[0] - bk[1] + wr[1], wr[1]),
            ("R", wr[0], wr[0] - wk[0] + bk[1]),
            ("R", bk[0] + 1, wr[1]),
            ("R", bk[0] - 1, wr[1]),
            ("R", wr[0], bk[1] + 1),
            ("R", wr[0], bk[1] - 1),
            ("R", bk[0] + 2, wr[1]),
            ("R", bk[0] - 2, wr[1]),
            ("R", wr[0], bk[1] + 2),
            ("R", wr[0], bk[1] - 2),
        ]
    if kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG,
                MoveKind.KEEP_ROOM_DIAG, MoveKind.KEEP_ROOM_NON_DIAG):
        return _king_targets(p)
    if kind == MoveKind.ROOK_HOME:
        return [
            ("R", p.wkx - 1, p.wry), ("R", p.wkx + 1, p.wry),
            ("R", p.wrx, p.wky - 1), ("R", p.wrx, p.wky + 1),
            ("R", p.wkx, p.wry), ("R", p.wrx, p.wky),
        ] + rook_edges + bk_lines
    if kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
        out = []
        for edge_coord, fixed in (("x", 0), ("x", hi), ("y", 0), ("y", hi)):
            wk_on = (p.wkx == fixed) if edge_coord == "x" else (p.wky == fixed)
            if edge_coord == "x":
                tx = np.full_like(p.wrx, fixed)
                out.append(("R", tx, np.where(wk_on, p.wry, -1)))
                for d in (-2, -1, 0, 1, 2):
                    out.append(("R", tx, np.where(wk_on, p.bky + d, -1)))
            else:
                ty = np.full_like(p.wry, fixed)
                out.append(("R", np.where(wk_on, p.wrx, -1), ty))
                for d in (-2, -1, 0, 1, 2):
                    out.append(("R", np.where(wk_on, p.bkx + d, -1), ty))
        return out
    raise ValueError(kind)


def exists_move(kind: MoveKind, p: Pos, spec: BoardSpec, use_candidates: bool = True):
    """Some legal white move of this kind exists (vectorized no_move negation)."""
    n = spec.n
    out = np.zeros(len(p), dtype=bool)
    for piece, tx, ty in _targets(kind, p, spec, use_candidates):
        todo = np.flatnonzero(~out)
        if len(todo) == 0:
            break
        sub = p.take(todo)
        stx, sty = tx[todo], ty[todo]
        if piece == "R":
            valid = _rook_move_valid(sub, stx, sty, n)
        else:
            valid = _king_move_valid(sub, stx, sty, n)
        if not valid.any():
            continue
        v = np.flatnonzero(valid)
        q = _succ(sub.take(v), piece, stx[v], sty[v])
        ok = _cond(kind, sub.take(v), piece, q, spec, use_candidates)
        out[todo[v[ok]]] = True
    return out


def classify_batch(p: Pos, spec: BoardSpec, use_candidates: bool = True) -> np.ndarray:
    """Cascade classification; NO_KIND marks strategy-incomplete positions."""
    codes = np.full(len(p), NO_KIND, dtype=np.uint8)
    active = np.arange(len(p))
    for kind in cascade(spec):
        if len(active) == 0:
            break
        hit = exists_move(kind, p.take(active), spec, use_candidates)
        codes[active[hit]] = KIND_CODE[kind]
        active = active[~hit]
    return codes


def choose_moves(p: Pos, codes: np.ndarray, spec: BoardSpec):
    """Deterministic strategy move per position under the pinned ordering.

    Returns successor coordinate columns (black to move; bk unchanged).
    """
    n = spec.n
    qwkx, qwky = p.wkx.copy(), p.wky.copy()
    qwrx, qwry = p.wrx.copy(), p.wry.copy()
    done = np.zeros(len(p), dtype=bool)
    for kind in MoveKind:
        members = np.flatnonzero(codes == KIND_CODE[kind])
        if len(members) == 0:
            continue
        sub = p.take(members)
        if kind == MoveKind.SQUEEZE:
            score = np.full(len(members), np.iinfo(np.int32).max, dtype=np.int32)
        elif kind == MoveKind.ROOK_HOME:
            score = np.full(len(members), np.iinfo(np.int32).max, dtype=np.int32)
        else:
            score = None
        chosen = np.zeros(len(members), dtype=bool)
        targets = _king_targets(sub) + _rook_targets_naive(sub, n)
        for piece, tx, ty in targets:
            if piece == "R":
                valid = _rook_move_valid(sub, tx, ty, n)
            else:
                valid = _king_move_valid(sub, tx, ty, n)
            if score is None:
                valid &= ~chosen
            if not valid.any():
                continue
            vidx = np.flatnonzero(valid)
            q = _succ(sub, piece, tx, ty).take(vidx)
            ok = _cond(kind, sub.take(vidx), piece, q, spec)
            if not ok.any():
                continue
            sel = vidx[ok]
            if score is None:
                rows = members[sel]
                qwkx[rows], qwky[rows] = q.wkx[ok], q.wky[ok]
                qwrx[rows], qwry[rows] = q.wrx[ok], q.wry[ok]
                chosen[sel] = True
                done[rows] = True
            else:
                if kind == MoveKind.SQUEEZE:
                    s = room_of(q.wrx[ok], q.wry[ok], q.bkx[ok], q.bky[ok], n)
                else:
                    s = np.abs(q.wrx[ok] - q.bkx[ok]) + np.abs(q.wry[ok] - q.bky[ok])
                better = s < score[sel]
                rows = members[sel[better]]
                score[sel[better]] = s[better]
                qwkx[rows], qwky[rows] = q.wkx[ok][better], q.wky[ok][better]
                qwrx[rows], qwry[rows] = q.wrx[ok][better], q.wry[ok][better]
                done[rows] = True
    labeled = codes != NO_KIND
    assert bool(done[labeled].all()), "classified position without a chosen move"
    return Pos(qwkx, qwky, qwrx, qwry, p.bkx, p.bky)


# --- position sets -------------------------------------------------------------


def _space(spec: BoardSpec) -> int:
    return 1 << spec.packed_width


def _chunk_masks(spec: BoardSpec, start: int, stop: int):
    packed = np.arange(start, stop, dtype=np.int64)
    p, wtm, cap = unpack_coords(packed, spec)
    n = spec.n
    on = (
        (p.wkx < n) & (p.wky < n) & (p.bkx < n) & (p.bky < n)
    )
    wf_rook = (p.wrx < n) & (p.wry < n) & ~(
        (p.wrx == p.wkx) & (p.wry == p.wky)
    ) & ~((p.wrx == p.bkx) & (p.wry == p.bky))
    # captured positions use the single canonical encoding with zeroed rook bits
    wf = on & ~((p.wkx == p.bkx) & (p.wky == p.bky)) & np.where(
        cap, (p.wrx == 0) & (p.wry == 0), wf_rook
    )
    apart = _cheb(p.wkx, p.wky, p.bkx, p.bky) >= 2
    checked = ~cap & _attacks(p.wrx, p.wry, p.wkx, p.wky, p.bkx, p.bky)
    legal = wf & apart & ~(wtm & checked)
    return packed, p, wtm, cap, wf, legal


def iter_legal_chunks(
    spec: BoardSpec,
    white_to_move: Optional[bool] = None,
    rook_present: Optional[bool] = True,
) -> Iterator[np.ndarray]:
    """Packed values of matching legal positions, ascending, in chunks."""
    for start in range(0, _space(spec), CHUNK):
        packed, p, wtm, cap, wf, legal = _chunk_masks(
            spec, start, min(start + CHUNK, _space(spec))
        )
        keep = legal
        if white_to_move is not None:
            keep = keep & (wtm == white_to_move)
        if rook_present is not None:
            keep = keep & (cap != rook_present)
        if keep.any():
            yield packed[keep]


def legal_packed(spec: BoardSpec, white_to_move=None, rook_present=True) -> np.ndarray:
    chunks = list(iter_legal_chunks(spec, white_to_move, rook_present))
    if not chunks:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(chunks)


def count_legal(spec: BoardSpec, white_to_move=None, rook_present=True) -> int:
    return sum(len(c) for c in iter_legal_chunks(spec, white_to_move, rook_present))


def wellformed_packed(spec: BoardSpec, rook_present: Optional[bool] = None) -> np.ndarray:
    """Packed values of all well-formed positions (canonical encodings)."""
    out = []
    for start in range(0, _space(spec), CHUNK):
        packed, p, wtm, cap, wf, legal = _chunk_masks(
            spec, start, min(start + CHUNK, _space(spec))
        )
        keep = wf
        if rook_present is not None:
            keep = keep & (cap != rook_present)
        out.append(packed[keep])
    return np.concatenate(out)


def classify_packed(spec: BoardSpec, packed: np.ndarray, use_candidates=True) -> np.ndarray:
    p, wtm, cap = unpack_coords(packed, spec)
    assert bool(wtm.all()) and not bool(cap.any())
    return classify_batch(p, spec, use_candidates)


def classify_histogram(spec: BoardSpec, use_candidates=True) -> dict[str, int]:
    packed = legal_packed(spec, white_to_move=True, rook_present=True)
    codes = classify_packed(spec, packed, use_candidates)
    out = {}
    for kind in cascade(spec):
        c = int((codes == KIND_CODE[kind]).sum())
        if c:
            out[kind.value] = c
    bad = int((codes == NO_KIND).sum())
    if bad:
        out["none"] = bad
    return out


# --- symmetry (vectorized) ------------------------------------------------------


def _transform_pos(p: Pos, swap: bool, fx: bool, fy: bool, n: int) -> Pos:
    cols = []
    for x, y in ((p.wkx, p.wky), (p.wrx, p.wry), (p.bkx, p.bky)):
        tx, ty = (y, x) if swap else (x, y)
        if fx:
            tx = n - 1 - tx
        if fy:
            ty = n - 1 - ty
        cols += [tx, ty]
    return Pos(cols[0], cols[1], cols[2], cols[3], cols[4], cols[5])


def _is_canonical_vec(p: Pos, cap, n: int):
    def lex3(a1, a2, a3, b1, b2, b3):
        return (a1 < b1) | ((a1 == b1) & ((a2 < b2) | ((a2 == b2) & (a3 <= b3))))

    wr_x = np.where(cap, 0, 2 * p.wrx + 1)  # neutral when captured
    wr_y = np.where(cap, 0, 2 * p.wry + 1)
    c1 = lex3(2 * p.bkx + 1, 2 * p.wkx + 1, wr_x, n, n, n)
    c2 = lex3(2 * p.bky + 1, 2 * p.wky + 1, wr_y, n, n, n)
    c3 = lex3(p.bkx, p.wkx, np.where(cap, 0, p.wrx), p.bky, p.wky, np.where(cap, 0, p.wry))
    return c1 & c2 & c3


def canonize_batch(p: Pos, wtm, cap, spec: BoardSpec) -> Pos:
    """Minimal-pack canonical image per row under the 8 reflections."""
    n = spec.n
    best_pack = None
    best: Optional[Pos] = None
    for swap in (False, True):
        for fx in (False, True):
            for fy in (False, True):
                t = _transform_pos(p, swap, fx, fy, n)
                t = Pos(t.wkx, t.wky, np.where(cap, 0, t.wrx), np.where(cap, 0, t.wry),
                        t.bkx, t.bky)
                canon = _is_canonical_vec(t, cap, n)
                packed = pack_coords(t, wtm, cap, spec)
                key = np.where(canon, packed, np.iinfo(np.int64).max)
                if best_pack is None:
                    best_pack, best = key, t
                else:
                    upd = key < best_pack
                    best_pack = np.where(upd, key, best_pack)
                    best = Pos(*(np.where(upd, a, b) for a, b in zip(
                        (t.wkx, t.wky, t.wrx, t.wry, t.bkx, t.bky),
                        (best.wkx, best.wky, best.wrx, best.wry, best.bkx, best.bky),
                    )))
    assert best_pack is not None and int(best_pack.max()) < np.iinfo(np.int64).max
    return best


def mate_opt_mask(p: Pos, wtm, cap, spec: BoardSpec):
    c = canonize_batch(p, wtm, cap, spec)
    def pat(bk_lo, wr_lo, wk_two, bk_ot, wr_ot, wk_ot):
        return (
            (bk_lo == 0) & (wr_lo == 0) & (wk_two == 2)
            & (np.abs(bk_ot - wr_ot) > 1)
            & np.where(bk_ot == 0, np.abs(wk_ot - bk_ot) <= 1, wk_ot == bk_ot)
        )
    on_file = pat(c.bkx, c.wrx, c.wkx, c.bky, c.wry, c.wky)
    on_rank = pat(c.bky, c.wry, c.wky, c.bkx, c.wrx, c.wkx)
    return ~wtm & ~cap & (on_file | on_rank)


def stalemate_opt_mask(p: Pos, wtm, cap, spec: BoardSpec):
    c = canonize_batch(p, wtm, cap, spec)
    corner = (c.bkx == 0) & (c.bky == 0)
    wall = (c.wkx == 0) & (c.wky == 2) & (c.wrx == 1) & (c.wry >= 1)
    cage = (
        (c.wrx == 1) & (c.wry == 1)
        & (((c.wkx == 1) | (c.wkx == 2)) & (c.wky == 2))
    )
    return ~wtm & ~cap & corner & (wall | cage)
