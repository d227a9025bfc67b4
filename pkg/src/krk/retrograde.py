"""Retrograde verification of the strategy by backward dynamic programming.

Seeds the winning set with the positions where the strategy mates at once,
then repeatedly admits positions all of whose black replies (after the
strategy move) are already winning.  The strategy is winning on the whole
domain iff no position is left over; the loop index k is the number of black
replies survived, so the longest game takes 2*max_depth + 1 plies.
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import engine
from .engine import (
    KIND_CODE,
    NO_KIND,
    Pos,
    black_replies,
    choose_moves,
    classify_batch,
    legal_packed,
    mate_mask,
    unpack_coords,
)
from .model import BoardSpec

UNKNOWN_DEPTH = 0xFFFF
_BFS_CHUNK = 1 << 20


@dataclass
class RetrogradeResult:
    n: int
    variant: str
    mode: str
    all_winning: bool
    total_positions: int
    max_plies: int
    per_depth: list[int]
    elapsed_ms: int
    closure_ok: bool = True
    unclassified: int = 0
    stuck: list[int] = field(default_factory=list)  # sample of packed values

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "variant": self.variant,
                "mode": self.mode,
                "all_winning": self.all_winning,
                "total_positions": self.total_positions,
                "max_plies": self.max_plies,
                "per_depth": self.per_depth,
                "elapsed_ms": self.elapsed_ms,
            }
        )


class _Space:
    """Strategy successors and reply machinery shared by both modes."""

    def __init__(self, spec: BoardSpec, mode: str):
        self.spec = spec
        self.mode = mode
        self.packed = legal_packed(spec, white_to_move=True, rook_present=True)
        self.pos, _, _ = unpack_coords(self.packed, spec)
        self.codes = classify_batch(self.pos, spec)
        self.labeled = self.codes != NO_KIND
        if mode == "function":
            self.succ = choose_moves(self.pos, self.codes, spec)
            self.indptr = None
        else:
            self._build_relation_successors()

    def _build_relation_successors(self):
        spec, n = self.spec, self.spec.n
        rows, cols = [], {k: [] for k in "wkx wky wrx wry".split()}
        p = self.pos
        for kind in engine.MoveKind:
            members = np.flatnonzero(self.codes == KIND_CODE[kind])
            if len(members) == 0:
                continue
            sub = p.take(members)
            for piece, tx, ty in engine._king_targets(sub) + engine._rook_targets_naive(sub, n):
                if piece == "R":
                    valid = engine._rook_move_valid(sub, tx, ty, n)
                else:
                    valid = engine._king_move_valid(sub, tx, ty, n)
                if not valid.any():
                    continue
                v = np.flatnonzero(valid)
                q = engine._succ(sub.take(v), piece, tx[v], ty[v])
                ok = engine._cond(kind, sub.take(v), piece, q, spec)
                sel = v[ok]
                if len(sel) == 0:
                    continue
                rows.append(members[sel])
                cols["wkx"].append(q.wkx[ok]); cols["wky"].append(q.wky[ok])
                cols["wrx"].append(q.wrx[ok]); cols["wry"].append(q.wry[ok])
        rows = np.concatenate(rows)
        order = np.argsort(rows, kind="stable")
        rows = rows[order]
        qs = {k: np.concatenate(vs)[order] for k, vs in cols.items()}
        self.flat_rows = rows
        self.flat_succ = Pos(
            qs["wkx"], qs["wky"], qs["wrx"], qs["wry"],
            self.pos.bkx[rows], self.pos.bky[rows],
        )
        counts = np.bincount(rows, minlength=len(self.packed))
        self.indptr = np.concatenate([[0], np.cumsum(counts)])

    def iter_row_chunks(self, rows: np.ndarray):
        for start in range(0, len(rows), _BFS_CHUNK):
            yield rows[start:start + _BFS_CHUNK]


def closure_check(spec: BoardSpec, mode: str = "function", space: Optional[_Space] = None) -> bool:
    """Black can never capture the rook after a strategy move; every black
    reply lands back in the legal white-to-move rook-present domain."""
    space = space or _Space(spec, mode)
    succ = space.succ if mode == "function" else space.flat_succ
    if mode == "function":
        succ = succ.take(np.flatnonzero(space.labeled))
    for start in range(0, len(succ), _BFS_CHUNK):
        q = succ.take(np.arange(start, min(start + _BFS_CHUNK, len(succ))))
        valid, caps, _ = black_replies(q, spec)
        if bool((valid & caps).any()):
            return False
    return True


def retrograde_verify(spec: BoardSpec, mode: str = "function") -> RetrogradeResult:
    if mode not in ("function", "relation"):
        raise ValueError(f"mode must be function or relation, got {mode}")
    t0 = time.monotonic()
    space = _Space(spec, mode)
    closure_ok = closure_check(spec, mode, space)

    total = len(space.packed)
    depth = np.full(total, UNKNOWN_DEPTH, dtype=np.uint16)
    winning = np.zeros(1 << spec.packed_width, dtype=bool)

    if mode == "function":
        per_depth = _bfs_function(space, spec, depth, winning)
    else:
        per_depth = _bfs_relation(space, spec, depth, winning)

    solved = int((depth != UNKNOWN_DEPTH).sum())
    all_winning = solved == total
    max_plies = (2 * (len(per_depth) - 1) + 1) if per_depth else 0
    stuck = space.packed[depth == UNKNOWN_DEPTH][:16].tolist()
    elapsed = int((time.monotonic() - t0) * 1000)
    result = RetrogradeResult(
        n=spec.n,
        variant=spec.variant.value,
        mode=mode,
        all_winning=all_winning,
        total_positions=total,
        max_plies=max_plies,
        per_depth=per_depth,
        elapsed_ms=elapsed,
        closure_ok=closure_ok,
        unclassified=int((~space.labeled).sum()),
        stuck=stuck,
    )
    result._depth_table = depth  # type: ignore[attr-defined]
    result._packed = space.packed  # type: ignore[attr-defined]
    result._space = space  # type: ignore[attr-defined]
    return result


def _reply_status(q: Pos, spec: BoardSpec, winning: np.ndarray):
    """(has_any_reply, all_replies_winning) for a black-to-move batch."""
    valid, caps, packs = black_replies(q, spec)
    safe = np.clip(packs, 0, len(winning) - 1)
    ok = valid & ~caps & winning[safe]
    has = valid.any(axis=0)
    good = (ok | ~valid).all(axis=0)
    return has, good


def _bfs_function(space: _Space, spec: BoardSpec, depth, winning) -> list[int]:
    remaining = np.flatnonzero(space.labeled)
    succ = space.succ

    new = []
    for chunk in space.iter_row_chunks(remaining):
        q = succ.take(chunk)
        new.append(chunk[mate_mask(q, spec.n)])
    newly = np.concatenate(new)
    per_depth = []
    k = 0
    while len(newly):
        depth[newly] = k
        winning[space.packed[newly]] = True
        per_depth.append(int(len(newly)))
        mask = np.ones(len(remaining), dtype=bool)
        mask[np.searchsorted(remaining, newly)] = False
        remaining = remaining[mask]
        if len(remaining) == 0:
            break
        k += 1
        new = []
        for chunk in space.iter_row_chunks(remaining):
            has, good = _reply_status(succ.take(chunk), spec, winning)
            new.append(chunk[has & good])
        newly = np.concatenate(new)
    return per_depth


def _bfs_relation(space: _Space, spec: BoardSpec, depth, winning) -> list[int]:
    # Non-deterministic semantics: a position wins only if EVERY strategy
    # successor is mate or leads exclusively into winning positions.
    flat = space.flat_succ
    n = spec.n
    flat_mate = np.zeros(len(flat.wkx), dtype=bool)
    for start in range(0, len(flat.wkx), _BFS_CHUNK):
        idx = np.arange(start, min(start + _BFS_CHUNK, len(flat.wkx)))
        flat_mate[idx] = mate_mask(flat.take(idx), n)
    indptr = space.indptr
    remaining = np.flatnonzero(space.labeled)
    per_depth = []
    k = 0
    while True:
        flat_ok = flat_mate.copy()
        todo = np.flatnonzero(~flat_mate)
        for start in range(0, len(todo), _BFS_CHUNK):
            idx = todo[start:start + _BFS_CHUNK]
            has, good = _reply_status(flat.take(idx), spec, winning)
            flat_ok[idx] = has & good
        padded = np.concatenate([flat_ok.astype(np.int32), [0]])
        counts = np.add.reduceat(padded, np.minimum(indptr[:-1], len(flat_ok)))[: len(indptr) - 1]
        sizes = np.diff(indptr)
        row_ok = (counts == sizes) & (sizes > 0)
        newly = remaining[row_ok[remaining]]
        if len(newly) == 0:
            break
        depth[newly] = k
        winning[space.packed[newly]] = True
        per_depth.append(int(len(newly)))
        mask = np.ones(len(remaining), dtype=bool)
        mask[np.searchsorted(remaining, newly)] = False
        remaining = remaining[mask]
        if len(remaining) == 0:
            break
        k += 1
    return per_depth


def write_depth_dump(result: RetrogradeResult, spec: BoardSpec, path: str) -> None:
    """Binary table: magic KRKD, n, packed width, one uint16 depth per packed
    index (0xFFFF = not winning or invalid encoding)."""
    depth = result._depth_table  # type: ignore[attr-defined]
    packed = result._packed  # type: ignore[attr-defined]
    table = np.full(1 << spec.packed_width, UNKNOWN_DEPTH, dtype=np.uint16)
    table[packed] = depth
    with open(path, "wb") as fh:
        fh.write(b"KRKD")
        fh.write(struct.pack("<II", spec.n, spec.packed_width))
        table.astype("<u2").tofile(fh)


def replay_worst_game(result: RetrogradeResult, spec: BoardSpec, start_packed: int):
    """Play the strategy against a black that maximizes remaining depth.

    Returns the ply count; raises if the game does not end in checkmate or
    is inconsistent with the depth table.
    """
    space: _Space = result._space  # type: ignore[attr-defined]
    depth_of = {int(pk): int(d) for pk, d in zip(result._packed, result._depth_table)}  # type: ignore[attr-defined]
    packed = int(start_packed)
    plies = 0
    while True:
        row = int(np.searchsorted(result._packed, packed))  # type: ignore[attr-defined]
        assert result._packed[row] == packed  # type: ignore[attr-defined]
        d = depth_of[packed]
        if space.mode == "function":
            q = space.succ.take(np.array([row]))
        else:  # worst successor for white: any; pick the first
            lo, hi = space.indptr[row], space.indptr[row + 1]
            q = space.flat_succ.take(np.array([lo]))
        plies += 1
        if bool(mate_mask(q, spec.n)[0]):
            assert d == 0 or space.mode == "relation"
            return plies
        valid, caps, packs = black_replies(q, spec)
        choices = packs[valid[:, 0] & ~caps[:, 0], 0]
        assert len(choices), "stalemate or capture reached during replay"
        depths = np.array([depth_of[int(c)] for c in choices])
        assert depths.max() < d or space.mode == "relation"
        packed = int(choices[int(depths.argmax())])
        plies += 1
