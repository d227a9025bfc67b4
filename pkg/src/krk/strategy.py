"""The Bratko-style strategy for white.

Move kinds form a strict priority cascade; the kind played in a position is
the first one with any satisfying move.  Each kind's condition constrains
the position reached by the move.  Two interchangeable no-move tests exist:
a naive scan over every legal white move, and a size-bounded candidate scan
whose target count does not grow with the board (the basis for symbolic-n
encodings); their equivalence is enforced by tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import geometry as geo
from . import mutations
from .model import (
    KING_STEPS,
    BoardSpec,
    KRKPosition,
    Square,
    Variant,
    apply_white,
    legal_position,
    legal_successors,
    rook_targets,
    well_formed,
    white_move_targets,
    wr_attacks_bk,
)
from .symmetry import canonize


class MoveKind(Enum):
    """Strategy move kinds in cascade-priority order."""

    IMMEDIATE_MATE = "ImmediateMate"
    READY_TO_MATE = "ReadyToMate"
    SQUEEZE = "Squeeze"
    APPROACH_DIAG = "ApproachDiag"
    APPROACH_NON_DIAG = "ApproachNonDiag"
    KEEP_ROOM_DIAG = "KeepRoomDiag"
    KEEP_ROOM_NON_DIAG = "KeepRoomNonDiag"
    ROOK_HOME = "RookHome"
    ROOK_SAFE = "RookSafe"
    ROOK_SAFE_SMALL_BOARDS = "RookSafeSmallBoards"


BASIC_MOVES = frozenset(
    {
        MoveKind.SQUEEZE,
        MoveKind.APPROACH_DIAG,
        MoveKind.APPROACH_NON_DIAG,
        MoveKind.KEEP_ROOM_DIAG,
        MoveKind.KEEP_ROOM_NON_DIAG,
    }
)
MATE_MOVES = frozenset({MoveKind.IMMEDIATE_MATE, MoveKind.READY_TO_MATE})

KING_KINDS = frozenset(
    {
        MoveKind.APPROACH_DIAG,
        MoveKind.APPROACH_NON_DIAG,
        MoveKind.KEEP_ROOM_DIAG,
        MoveKind.KEEP_ROOM_NON_DIAG,
    }
)


def cascade(spec: BoardSpec) -> tuple[MoveKind, ...]:
    kinds = tuple(MoveKind)
    if spec.variant == Variant.CLASSIC8:
        return kinds[:-1]  # no RookSafeSmallBoards in the classic cascade
    return kinds


@dataclass(frozen=True)
class StrategyMove:
    to: KRKPosition
    kind: MoveKind


class StrategyUndefinedError(RuntimeError):
    """No cascade kind applies: a strategy-completeness counterexample."""


def _require_strategy_input(p: KRKPosition, spec: BoardSpec) -> None:
    if p.wr is None:
        raise geo.RookCapturedError("strategy needs the rook on the board")
    if not p.white_to_move or not legal_position(p, spec):
        raise ValueError("strategy input must be a legal white-to-move position")


# --- fast primitives on raw squares -----------------------------------------


def _bk_escape_squares(q: KRKPosition, spec: BoardSpec):
    """Legal black king destinations from a black-to-move position."""
    wk, bk, wr = q.wk, q.bk, q.wr
    for dx, dy in KING_STEPS:
        t = Square(bk.x + dx, bk.y + dy)
        if not spec.on_board(t) or t == wk:
            continue
        if max(abs(t.x - wk.x), abs(t.y - wk.y)) <= 1:
            continue
        if wr is not None and t != wr and _attacks(wr, wk, t):
            continue
        yield t


def _attacks(wr: Square, wk: Square, sq: Square) -> bool:
    if wr.x == sq.x:
        return not (wk.x == sq.x and min(wr.y, sq.y) < wk.y < max(wr.y, sq.y))
    if wr.y == sq.y:
        return not (wk.y == sq.y and min(wr.x, sq.x) < wk.x < max(wr.x, sq.x))
    return False


def _bk_cannot_move(q: KRKPosition, spec: BoardSpec) -> bool:
    for _ in _bk_escape_squares(q, spec):
        return False
    return True


def _is_mate(q: KRKPosition, spec: BoardSpec) -> bool:
    return wr_attacks_bk(q) and _bk_cannot_move(q, spec)


def _is_stalemate(q: KRKPosition, spec: BoardSpec) -> bool:
    return not wr_attacks_bk(q) and _bk_cannot_move(q, spec)


def _rook_can_mate(p: KRKPosition, spec: BoardSpec) -> bool:
    """Immediate mate by a rook move exists from the white-to-move p."""
    if p.wr is None:
        return False
    for t in rook_targets(p, spec):
        if _is_mate(KRKPosition(p.wk, p.bk, t, False), spec):
            return True
    return False


# --- per-kind move conditions ------------------------------------------------


def _edge_clause(q: KRKPosition, spec: BoardSpec) -> bool:
    """Extra restriction on king moves once the room is small (<= 3).

    The classic form keeps the white king off every edge; the generalized
    form only keeps the kings off a shared edge (on small boards the white
    king cannot avoid edges entirely).
    """
    if geo.room(q, spec) > 3:
        return True
    if spec.variant == Variant.CLASSIC8:
        edge = (0, spec.n - 1)
        return q.wk.x not in edge and q.wk.y not in edge
    return not geo.kings_same_edge(q, spec)


def _diag_step(p: KRKPosition, q: KRKPosition) -> bool:
    return abs(q.wk.x - p.wk.x) == 1 and abs(q.wk.y - p.wk.y) == 1


def _ready_to_mate_cond(q: KRKPosition, spec: BoardSpec) -> bool:
    if _is_stalemate(q, spec):
        return False
    for t in _bk_escape_squares(q, spec):
        wr = None if t == q.wr else q.wr
        reply = KRKPosition(q.wk, t, wr, True)
        if not _rook_can_mate(reply, spec):
            return False
    return True


def move_cond(kind: MoveKind, p: KRKPosition, q: KRKPosition, spec: BoardSpec) -> bool:
    """Side conditions of one strategy move kind.

    p is assumed to be a legal white-to-move position with the rook present
    and q one of its legal successors.
    """
    if p.wr is None:
        raise geo.RookCapturedError("strategy needs the rook on the board")
    king_moved = q.wk != p.wk

    if kind == MoveKind.IMMEDIATE_MATE:
        return not king_moved and _is_mate(q, spec)

    if kind == MoveKind.READY_TO_MATE:
        return _ready_to_mate_cond(q, spec)

    if kind == MoveKind.SQUEEZE:
        return (
            not king_moved
            and geo.room(q, spec) < geo.room(p, spec)
            and (not geo.wr_exposed(q) or mutations.active(mutations.SQUEEZE_DROP_EXPOSURE))
            and geo.wr_divides(q)
            and not _is_stalemate(q, spec)
        )

    if kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG):
        if not king_moved:
            return False
        if _diag_step(p, q) != (kind == MoveKind.APPROACH_DIAG):
            return False
        return (
            geo.manhattan(q.wk, geo.critical_square(q))
            < geo.manhattan(p.wk, geo.critical_square(p))
            and not geo.wr_exposed(q)
            and (geo.wr_divides(q) or geo.l_pattern(q))
            and _edge_clause(q, spec)
            and not _is_stalemate(q, spec)
        )

    if kind in (MoveKind.KEEP_ROOM_DIAG, MoveKind.KEEP_ROOM_NON_DIAG):
        if not king_moved:
            return False
        if _diag_step(p, q) != (kind == MoveKind.KEEP_ROOM_DIAG):
            return False
        return (
            geo.chebyshev(q.wk, q.wr) <= geo.chebyshev(p.wk, p.wr)
            and not geo.wr_exposed(q)
            and geo.wr_divides(q)
            and _edge_clause(q, spec)
            and not _is_stalemate(q, spec)
        )

    if kind == MoveKind.ROOK_HOME:
        homing = geo.manhattan(q.wr, q.wk) < geo.manhattan(p.wr, p.wk)
        return (
            not king_moved
            and _divide_attempt(p, q)
            and (not geo.wr_exposed(q) or homing)
            and (geo.chebyshev(q.wr, q.bk) > 1 or geo.chebyshev(q.wr, q.wk) == 1)
            and (not _is_stalemate(q, spec)
                 or mutations.active(mutations.ROOK_HOME_DROP_STALEMATE))
        )

    if kind == MoveKind.ROOK_SAFE:
        if king_moved:
            return False
        if not _lands_on_new_edge(p.wr, q.wr, spec):
            return False
        guarded = geo.chebyshev(q.wr, q.wk) == 1 and geo.chebyshev(q.wr, q.bk) == 1
        return (guarded or geo.chebyshev(q.wr, q.bk) > 2) and not _is_stalemate(q, spec)

    if kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
        # small-board fallback: flee onto an edge the white king occupies,
        # settling at chase distance 2 from the black king (a longer flight
        # does not exist there, which is why RookSafe came up empty)
        return (
            not king_moved
            and _on_shared_edge(q.wk, q.wr, spec)
            and geo.chebyshev(q.wr, q.bk) == 2
        )

    raise ValueError(f"unknown move kind {kind}")


def _divide_attempt(p: KRKPosition, q: KRKPosition) -> bool:
    """Rook moves ONTO a file or rank adjacent to the white king, on the
    black king's side of it (or either side when the kings are aligned on
    that axis).  Sliding along a line the rook already occupies does not
    count, which is what bounds consecutive RookHome moves."""
    dx = q.wr.x - q.wk.x
    dy = q.wr.y - q.wk.y
    via_file = (
        abs(dx) == 1
        and q.wr.x != p.wr.x
        and (dx * (q.bk.x - q.wk.x) > 0 or q.bk.x == q.wk.x)
    )
    via_rank = (
        abs(dy) == 1
        and q.wr.y != p.wr.y
        and (dy * (q.bk.y - q.wk.y) > 0 or q.bk.y == q.wk.y)
    )
    return via_file or via_rank


def _lands_on_new_edge(wr_from: Square, wr_to: Square, spec: BoardSpec) -> bool:
    last = spec.n - 1
    for value, coord in ((0, "x"), (last, "x"), (0, "y"), (last, "y")):
        on_to = getattr(wr_to, coord) == value
        on_from = getattr(wr_from, coord) == value
        if on_to and not on_from:
            return True
    return False


def _on_shared_edge(wk: Square, wr: Square, spec: BoardSpec) -> bool:
    last = spec.n - 1
    return (
        (wk.x == 0 and wr.x == 0)
        or (wk.x == last and wr.x == last)
        or (wk.y == 0 and wr.y == 0)
        or (wk.y == last and wr.y == last)
    )


# --- candidate squares --------------------------------------------------------


def _rook_edge_candidates(p: KRKPosition, spec: BoardSpec) -> list[Square]:
    wr = p.wr
    last = spec.n - 1
    return [Square(0, wr.y), Square(last, wr.y), Square(wr.x, 0), Square(wr.x, last)]


def _rook_bk_line_candidates(p: KRKPosition) -> list[Square]:
    wr, bk = p.wr, p.bk
    return [
        Square(bk.x + 1, wr.y),
        Square(bk.x - 1, wr.y),
        Square(wr.x, bk.y + 1),
        Square(wr.x, bk.y - 1),
    ]


def _squeeze_candidates(p: KRKPosition, spec: BoardSpec) -> list[Square]:
    wk, bk, wr = p.wk, p.bk, p.wr
    return [
        # rook file midway between the kings' files (both roundings), and rank analogue
        Square((wk.x + bk.x) // 2, wr.y),
        Square((wk.x + bk.x + 1) // 2, wr.y),
        Square(wr.x, (wk.y + bk.y) // 2),
        Square(wr.x, (wk.y + bk.y + 1) // 2),
        # anti-diagonal equalities wr.x + wr.y = bk.x + wk.y and = wk.x + bk.y
        Square(bk.x + wk.y - wr.y, wr.y),
        Square(wr.x, bk.x + wk.y - wr.x),
        Square(wk.x + bk.y - wr.y, wr.y),
        Square(wr.x, wk.x + bk.y - wr.x),
        # diagonal equalities wr.x - wr.y = bk.x - wk.y and = wk.x - bk.y
        Square(bk.x - wk.y + wr.y, wr.y),
        Square(wr.x, wr.x - bk.x + wk.y),
        Square(wk.x - bk.y + wr.y, wr.y),
        Square(wr.x, wr.x - wk.x + bk.y),
        # lines immediately next to the black king; the +/-2 variants arise
        # when the closest square would stalemate or expose the rook
        Square(bk.x + 1, wr.y),
        Square(bk.x - 1, wr.y),
        Square(wr.x, bk.y + 1),
        Square(wr.x, bk.y - 1),
        Square(bk.x + 2, wr.y),
        Square(bk.x - 2, wr.y),
        Square(wr.x, bk.y + 2),
        Square(wr.x, bk.y - 2),
    ]


def _rook_home_candidates(p: KRKPosition, spec: BoardSpec) -> list[Square]:
    # arrivals onto a king-adjacent line, plus slides along one the rook is
    # already on (to an edge or to the black king's vicinity)
    wk, wr = p.wk, p.wr
    return (
        [
            Square(wk.x - 1, wr.y),
            Square(wk.x + 1, wr.y),
            Square(wr.x, wk.y - 1),
            Square(wr.x, wk.y + 1),
        ]
        + _rook_edge_candidates(p, spec)
        + _rook_bk_line_candidates(p)
        + [Square(wk.x, wr.y), Square(wr.x, wk.y)]
    )


def _rook_safe_small_candidates(p: KRKPosition, spec: BoardSpec) -> list[Square]:
    wk, wr, bk = p.wk, p.wr, p.bk
    last = spec.n - 1
    out = []
    for on_edge, line in (
        (wk.x == 0, ("x", 0)),
        (wk.x == last, ("x", last)),
        (wk.y == 0, ("y", 0)),
        (wk.y == last, ("y", last)),
    ):
        if not on_edge:
            continue
        axis, v = line
        if axis == "x":
            out.append(Square(v, wr.y))  # arrival from the side
            out += [Square(v, bk.y + d) for d in (-2, -1, 0, 1, 2)]
        else:
            out.append(Square(wr.x, v))
            out += [Square(bk.x + d, v) for d in (-2, -1, 0, 1, 2)]
    return out


def candidates(kind: MoveKind, p: KRKPosition, spec: BoardSpec) -> list[tuple[str, Square]]:
    """Size-bounded candidate targets: a kind-move exists iff some candidate
    is a legal move satisfying move_cond.  Counts stay fixed as n grows."""
    if p.wr is None:
        raise geo.RookCapturedError("strategy needs the rook on the board")
    kings = [("K", Square(p.wk.x + dx, p.wk.y + dy)) for dx, dy in KING_STEPS]
    if kind == MoveKind.IMMEDIATE_MATE:
        return [("R", t) for t in _rook_edge_candidates(p, spec)]
    if kind == MoveKind.READY_TO_MATE:
        # the rook takes an edge for tempo, cuts an escape line, or tucks
        # onto the white king's own file or rank
        rooks = (
            _rook_edge_candidates(p, spec)
            + _rook_bk_line_candidates(p)
            + [Square(p.wk.x, p.wr.y), Square(p.wr.x, p.wk.y)]
        )
        return kings + [("R", t) for t in rooks]
    if kind == MoveKind.SQUEEZE:
        return [("R", t) for t in _squeeze_candidates(p, spec)]
    if kind in KING_KINDS:
        return kings
    if kind == MoveKind.ROOK_HOME:
        return [("R", t) for t in _rook_home_candidates(p, spec)]
    if kind == MoveKind.ROOK_SAFE:
        return [("R", t) for t in _rook_edge_candidates(p, spec)]
    if kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
        return [("R", t) for t in _rook_safe_small_candidates(p, spec)]
    raise ValueError(f"unknown move kind {kind}")


def _rook_move_ok(p: KRKPosition, t: Square, spec: BoardSpec) -> bool:
    wr, wk, bk = p.wr, p.wk, p.bk
    if not spec.on_board(t) or t == wr or t == wk or t == bk:
        return False
    if (t.x == wr.x) == (t.y == wr.y):
        return False
    if t.x == wr.x:
        lo, hi = min(wr.y, t.y), max(wr.y, t.y)
        if wk.x == wr.x and lo < wk.y < hi:
            return False
        if bk.x == wr.x and lo < bk.y < hi:
            return False
    else:
        lo, hi = min(wr.x, t.x), max(wr.x, t.x)
        if wk.y == wr.y and lo < wk.x < hi:
            return False
        if bk.y == wr.y and lo < bk.x < hi:
            return False
    return True


def _white_move_ok(p: KRKPosition, piece: str, t: Square, spec: BoardSpec) -> bool:
    if piece == "R":
        return _rook_move_ok(p, t, spec)
    if not spec.on_board(t) or t == p.wr or t == p.bk:
        return False
    if geo.chebyshev(t, p.wk) != 1:
        return False
    return geo.chebyshev(t, p.bk) >= 2  # kings may not touch


def no_move(
    kind: MoveKind, p: KRKPosition, spec: BoardSpec, use_candidates: bool = True
) -> bool:
    """No legal successor of p satisfies move_cond for this kind."""
    _require_strategy_input(p, spec)
    if use_candidates:
        pool = candidates(kind, p, spec)
    else:
        pool = white_move_targets(p, spec)
    for piece, t in pool:
        if not _white_move_ok(p, piece, t, spec):
            continue
        if move_cond(kind, p, apply_white(p, piece, t), spec):
            return False
    return True


def classify(p: KRKPosition, spec: BoardSpec, use_candidates: bool = True) -> MoveKind:
    """The unique cascade kind with a satisfying move."""
    _require_strategy_input(p, spec)
    for kind in cascade(spec):
        if not no_move(kind, p, spec, use_candidates=use_candidates):
            return kind
    raise StrategyUndefinedError(f"no strategy move in {p} on n={spec.n}")


def strategy_relation(
    p: KRKPosition, q: KRKPosition, kind: MoveKind, spec: BoardSpec
) -> bool:
    """q is reachable from p by a strategy move of the given kind."""
    if p.wr is None or not p.white_to_move or not legal_position(p, spec):
        return False
    if kind not in cascade(spec):
        return False
    if q not in legal_successors(p, spec):
        return False
    if not move_cond(kind, p, q, spec):
        return False
    for earlier in cascade(spec):
        if earlier == kind:
            return True
        if not no_move(earlier, p, spec):
            return False
    return False


def strategy_successors(p: KRKPosition, spec: BoardSpec) -> list[StrategyMove]:
    kind = classify(p, spec)
    out = []
    for piece, t in white_move_targets(p, spec):
        if not _white_move_ok(p, piece, t, spec):
            continue
        q = apply_white(p, piece, t)
        if move_cond(kind, p, q, spec):
            out.append(StrategyMove(q, kind))
    return out


def strategy_function(p: KRKPosition, spec: BoardSpec) -> Optional[StrategyMove]:
    """The deterministic strategy move, or None when undefined.

    Within the classified kind the move is picked by the fixed enumeration
    (king steps in lexicographic (dx, dy) order, then rook targets first
    horizontally then vertically); Squeeze minimizes the reached room and
    RookHome the rook-to-black-king Manhattan distance, ties by first index.
    """
    if p.wr is None or not p.white_to_move or not legal_position(p, spec):
        return None
    kind = classify(p, spec)
    best: Optional[KRKPosition] = None
    best_score = None
    for piece, t in white_move_targets(p, spec):
        if not _white_move_ok(p, piece, t, spec):
            continue
        q = apply_white(p, piece, t)
        if not move_cond(kind, p, q, spec):
            continue
        if kind == MoveKind.SQUEEZE:
            score = geo.room(q, spec)
        elif kind == MoveKind.ROOK_HOME:
            score = geo.manhattan(q.wr, q.bk)
        else:
            return StrategyMove(q, kind)  # first satisfying move
        if best_score is None or score < best_score:
            best, best_score = q, score
    assert best is not None
    return StrategyMove(best, kind)


# --- pattern-based mate and stalemate ----------------------------------------
#
# On a canonical position checkmate collapses to two explicit patterns (the
# black king pressed on the low edge, rook on the same edge line, king two
# files away); stalemate collapses to the single cornered pattern.  Both are
# proved equal to the naive definitions by exhaustive sweeps in the tests.


def mate_opt(p: KRKPosition, spec: BoardSpec) -> bool:
    if p.white_to_move or not well_formed(p, spec):
        return False
    if p.wr is None:
        return False
    c = canonize(p, spec)
    wk, bk, wr = c.wk, c.bk, c.wr
    on_file = (
        bk.x == 0
        and wr.x == 0
        and wk.x == 2
        and abs(bk.y - wr.y) > 1
        and (abs(wk.y - bk.y) <= 1 if bk.y == 0 else wk.y == bk.y)
    )
    on_rank = (
        bk.y == 0
        and wr.y == 0
        and wk.y == 2
        and abs(bk.x - wr.x) > 1
        and (abs(wk.x - bk.x) <= 1 if bk.x == 0 else wk.x == bk.x)
    )
    return on_file or on_rank


def stalemate_opt(p: KRKPosition, spec: BoardSpec) -> bool:
    if p.white_to_move or not well_formed(p, spec):
        return False
    if p.wr is None:
        return False
    c = canonize(p, spec)
    if c.bk != Square(0, 0):
        return False
    # king barred by its own monarch from above, rook fencing file 1
    wall = c.wk == Square(0, 2) and c.wr.x == 1 and c.wr.y >= 1
    # rook caging the corner diagonally, guarded by the king
    cage = c.wr == Square(1, 1) and c.wk in (Square(1, 2), Square(2, 2))
    return wall or cage
