"""Finite-domain checker for bounded strategy-trace conjectures.

Every conjecture has the shape Pre(p0) and Seq -> Post, where Seq is k white
strategy moves (each constrained to a set of kinds) interleaved with
arbitrary legal black replies, ending after a white or a black ply.  Checking
enumerates all compliant traces from every qualifying start, optionally only
from canonical starts (sound because every registered predicate and the
classification itself are reflection-invariant, which the test suite
verifies exhaustively).

Shallow conjectures are scanned by plain forward enumeration; the deep ones
(three or four white plies) run as vectorized reachability or lex-progress
propagations over precomputed successor tables, which keeps the 8x8 suite in
seconds instead of hours.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import engine
from . import geometry as geo
from .engine import KIND_CODE, NO_KIND
from .model import BoardSpec, KRKPosition, legal_successors, pack, unpack
from .strategy import (
    BASIC_MOVES,
    MATE_MOVES,
    MoveKind,
    strategy_function,
    strategy_successors,
)
from .symmetry import Reflection, is_canonical, reflect


class PredicateNotInvariantError(ValueError):
    pass


def _in_check(p: KRKPosition, spec: BoardSpec) -> bool:
    from .model import in_check

    return in_check(p)


def _invariant_core(p: KRKPosition, spec: BoardSpec) -> bool:
    """Bratko's running invariant: safe dividing rook, breathing room.

    White-to-move positions use the extended L-pattern: black's reply may
    have stretched the kings one square apart or sideways.
    """
    if p.wr is None:
        return False
    lp = geo.l_pattern_extended(p) if p.white_to_move else geo.l_pattern(p)
    return (
        not geo.wr_exposed(p)
        and (geo.wr_divides(p) or lp)
        and not _in_check(p, spec)
        and geo.room(p, spec) > 2
    )


def _post_two_rook_home(p: KRKPosition, spec: BoardSpec) -> bool:
    return (
        p.wr is not None
        and not geo.wr_exposed(p)
        and geo.wr_divides(p)
        and not _in_check(p, spec)
        and geo.room(p, spec) > 2
    )


PREDICATES: dict[str, Callable[[KRKPosition, BoardSpec], bool]] = {
    "rook_present": lambda p, spec: p.wr is not None,
    "room_gt_3": lambda p, spec: p.wr is not None and geo.room(p, spec) > 3,
    "room_le_3": lambda p, spec: p.wr is not None and geo.room(p, spec) <= 3,
    "invariant_core": _invariant_core,
    "after_two_rook_home": _post_two_rook_home,
}


@dataclass(frozen=True)
class LemmaSpec:
    name: str
    k: int  # number of white plies
    pre: tuple[str, ...]  # named predicates over p0 (legality is implicit)
    steps: tuple[Optional[frozenset], ...]  # allowed kinds per white ply
    ends_with: str  # "white" | "black"
    post: str  # named trace post-condition
    checker: str = "scan"  # "scan" | "reach" | "progress"
    description: str = ""


@dataclass
class Counterexample:
    start: KRKPosition
    steps: list  # [(MoveKind, after_white, after_black_or_None), ...]
    violated: str

    def to_json(self, spec: BoardSpec) -> dict:
        def enc(p):
            if p is None:
                return None
            return {
                "wk": list(p.wk),
                "bk": list(p.bk),
                "wr": None if p.wr is None else list(p.wr),
                "whiteToMove": p.white_to_move,
                "packed": pack(p, spec),
            }

        return {
            "start": enc(self.start),
            "steps": [
                {"kind": k.value, "afterWhite": enc(w), "afterBlack": enc(b)}
                for k, w, b in self.steps
            ],
            "violated": self.violated,
        }


@dataclass
class LemmaReport:
    name: str
    n: int
    variant: str
    mode: str
    use_symmetry: bool
    holds: bool
    scanned: int
    vacuous: int
    counterexamples: list
    elapsed_ms: int

    def to_json(self, spec: BoardSpec) -> str:
        return json.dumps(
            {
                "name": self.name,
                "n": self.n,
                "variant": self.variant,
                "mode": self.mode,
                "use_symmetry": self.use_symmetry,
                "holds": self.holds,
                "scanned": self.scanned,
                "vacuous": self.vacuous,
                "counterexamples": [c.to_json(spec) for c in self.counterexamples[:16]],
                "elapsed_ms": self.elapsed_ms,
            }
        )


ALL_KINDS = frozenset(MoveKind)
NON_MATE = frozenset(ALL_KINDS - MATE_MOVES)
ROOK_RETREATS = frozenset({MoveKind.ROOK_HOME, MoveKind.ROOK_SAFE})
# the small-board emergency retreat counts as a RookHome enabler as well
RETREAT_PREDECESSORS = ROOK_RETREATS | {MoveKind.ROOK_SAFE_SMALL_BOARDS}


def builtin_lemmas(spec: BoardSpec) -> list[LemmaSpec]:
    """The six published conjectures plus the basic-progress statement, the
    refined retreat-ordering triple and the two invariant preservations."""
    any3 = (None, None, None)
    basics = frozenset(BASIC_MOVES)
    return [
        LemmaSpec(
            "rook_never_capturable", 1, ("rook_present",), (None,), "black",
            "rook_survives",
            description="black cannot capture the rook after a strategy move",
        ),
        LemmaSpec(
            "immediate_mate_mates", 1, ("rook_present",),
            (frozenset({MoveKind.IMMEDIATE_MATE}),), "white", "final_is_mate",
            description="an ImmediateMate move checkmates",
        ),
        LemmaSpec(
            "ready_to_mate_mates_next", 2, ("rook_present",),
            (frozenset({MoveKind.READY_TO_MATE}), None), "white", "mate_on_second",
            description="a ReadyToMate move forces checkmate on the next move",
        ),
        LemmaSpec(
            "retreats_only_first_three", 4, ("rook_present",), (None,) * 4,
            "white", "last_not_retreat", checker="reach",
            description="RookHome and RookSafe appear only in the first three moves",
        ),
        LemmaSpec(
            "basic_progress_measure", 3, ("room_gt_3",), (basics,) * 3,
            "black", "room_then_distance_decreases", checker="progress",
            description="three basic full moves shrink the room or close in on "
            "the critical square",
        ),
        LemmaSpec(
            "small_room_forces_mate", 4, ("room_le_3",), (basics, basics, basics, None),
            "white", "last_is_mating", checker="reach",
            description="with room <= 3, three basic full moves lead to a mating move",
        ),
        LemmaSpec(
            "basic_keeps_basic_or_mate", 2, ("rook_present",), (basics, None),
            "white", "second_basic_or_mate",
            description="after a basic move only basic or mate moves follow",
        ),
        LemmaSpec(
            "rook_safe_only_first", 2, ("rook_present",), (None, None), "white",
            "second_not_rook_safe",
            description="RookSafe is playable only as the very first move",
        ),
        LemmaSpec(
            "rook_home_needs_retreat_before", 2, ("rook_present",), (None, None),
            "white", "rook_home_preceded_by_retreat",
            description="RookHome only follows RookHome or RookSafe",
        ),
        LemmaSpec(
            "no_third_rook_home", 3, ("rook_present",),
            (frozenset({MoveKind.ROOK_HOME}), frozenset({MoveKind.ROOK_HOME}), None),
            "white", "third_not_rook_home",
            description="RookHome never follows two RookHome moves",
        ),
        LemmaSpec(
            "two_rook_homes_establish_divide", 2, ("rook_present",),
            (frozenset({MoveKind.ROOK_HOME}), frozenset({MoveKind.ROOK_HOME})),
            "white", "divide_established",
            description="two RookHome moves leave a safe dividing rook",
        ),
        LemmaSpec(
            "invariant_preserved", 1, ("invariant_core",), (NON_MATE,), "black",
            "invariant_still_holds",
            description="the running invariant survives non-mating play",
        ),
    ]


# --- trace post-conditions ------------------------------------------------------


def _post_eval(post: str, start, steps, spec) -> tuple[bool, str]:
    from .model import checkmate

    if post == "rook_survives":
        for _, w, b in steps:
            if w.wr is None or (b is not None and b.wr is None):
                return False, "rook captured"
        return True, ""
    if post == "final_is_mate":
        return (checkmate(steps[-1][1], spec), "not checkmate")
    if post == "mate_on_second":
        kind, w, _ = steps[-1]
        if kind != MoveKind.IMMEDIATE_MATE:
            return False, "second move not ImmediateMate"
        return (checkmate(w, spec), "second move does not mate")
    if post == "last_not_retreat":
        return (steps[-1][0] not in ROOK_RETREATS, "retreat after three moves")
    if post == "last_is_mating":
        return (steps[-1][0] in MATE_MOVES, "no mating move after room<=3 basics")
    if post == "second_basic_or_mate":
        return (
            steps[-1][0] in BASIC_MOVES or steps[-1][0] in MATE_MOVES,
            "non-basic non-mate follow-up",
        )
    if post == "second_not_rook_safe":
        return (steps[-1][0] != MoveKind.ROOK_SAFE, "RookSafe on second move")
    if post == "rook_home_preceded_by_retreat":
        if steps[-1][0] != MoveKind.ROOK_HOME:
            return True, ""
        return (steps[0][0] in RETREAT_PREDECESSORS, "RookHome after a non-retreat")
    if post == "third_not_rook_home":
        return (steps[-1][0] != MoveKind.ROOK_HOME, "third consecutive RookHome")
    if post == "divide_established":
        return (
            PREDICATES["after_two_rook_home"](steps[-1][1], spec),
            "divide condition broken after two RookHomes",
        )
    if post == "invariant_still_holds":
        _, w, b = steps[-1]
        if not PREDICATES["invariant_core"](w, spec):
            return False, "invariant broken by white"
        return (
            PREDICATES["invariant_core"](b, spec),
            "invariant broken by black",
        )
    if post == "room_then_distance_decreases":
        p0, p3 = start, steps[-1][2]
        r0, r3 = geo.room(p0, spec), geo.room(p3, spec)
        if r3 < r0:
            return True, ""
        if r3 == r0:
            m0 = geo.manhattan(p0.wk, geo.critical_square(p0))
            m3 = geo.manhattan(p3.wk, geo.critical_square(p3))
            return (m3 < m0, "room kept but king no closer to critical square")
        return False, "room grew over three basic moves"
    raise ValueError(f"unknown post {post}")


# --- successor tables -------------------------------------------------------------


class StrategyTables:
    """Shared per-(board, mode) lookup tables for trace enumeration."""

    def __init__(self, spec: BoardSpec, mode: str):
        assert mode in ("relation", "function")
        self.spec = spec
        self.mode = mode
        self.packed = engine.legal_packed(spec, white_to_move=True, rook_present=True)
        self.pos, _, _ = engine.unpack_coords(self.packed, spec)
        self.codes = engine.classify_batch(self.pos, spec)
        if mode == "function":
            self.succ = engine.choose_moves(self.pos, self.codes, spec)
            self.succ_packed = engine.pack_coords(self.succ, False, False, spec)
        self._white_cache: dict[int, list] = {}
        self._black_cache: dict[int, list] = {}

    def row_of(self, packed: int) -> int:
        i = int(np.searchsorted(self.packed, packed))
        if i >= len(self.packed) or self.packed[i] != packed:
            raise KeyError(f"not a legal rook-present white-to-move position: {packed}")
        return i

    def kind_of(self, packed: int) -> Optional[MoveKind]:
        code = self.codes[self.row_of(packed)]
        return None if code == NO_KIND else engine.CODE_KIND[int(code)]

    def white_successors(self, packed: int) -> list[tuple[MoveKind, KRKPosition]]:
        got = self._white_cache.get(packed)
        if got is not None:
            return got
        p = unpack(packed, self.spec)
        if self.mode == "function":
            mv = strategy_function(p, self.spec)
            out = [] if mv is None else [(mv.kind, mv.to)]
        else:
            out = [(m.kind, m.to) for m in strategy_successors(p, self.spec)]
        self._white_cache[packed] = out
        return out

    def black_replies(self, q: KRKPosition) -> list[KRKPosition]:
        key = pack(q, self.spec)
        got = self._black_cache.get(key)
        if got is None:
            got = legal_successors(q, self.spec)
            self._black_cache[key] = got
        return got


_TABLES: dict = {}


def tables_for(spec: BoardSpec, mode: str) -> StrategyTables:
    key = (spec.n, spec.variant, mode)
    if key not in _TABLES:
        _TABLES[key] = StrategyTables(spec, mode)
    return _TABLES[key]


_INVARIANCE_CHECKED: set = set()


def assert_predicates_invariant(names, spec: BoardSpec) -> None:
    """Exhaustive reflection-invariance spot check at the smallest board."""
    from .model import BoardSpec as BS, Variant

    small = BS(4, Variant.GENERALIZED)
    for name in names:
        if name in _INVARIANCE_CHECKED:
            continue
        pred = PREDICATES[name]
        for packed in engine.wellformed_packed(small):
            p = unpack(int(packed), small)
            if not p.white_to_move:
                continue
            v = pred(p, small)
            for axis in Reflection:
                if pred(reflect(p, axis, small), small) != v:
                    raise PredicateNotInvariantError(f"{name} not invariant under {axis}")
        _INVARIANCE_CHECKED.add(name)


# --- checkers ---------------------------------------------------------------------


def _starts(lemma: LemmaSpec, spec: BoardSpec, tables: StrategyTables, use_symmetry):
    pre = [PREDICATES[p] for p in lemma.pre]
    for i in range(len(tables.packed)):
        pk = int(tables.packed[i])
        p = unpack(pk, spec)
        if use_symmetry and not is_canonical(p, spec):
            continue
        if all(f(p, spec) for f in pre):
            yield pk, p


def _check_scan(lemma, spec, tables, use_symmetry, collect=16):
    scanned = 0
    vacuous = 0
    bad: list[Counterexample] = []

    def extend(p: KRKPosition, pk: int, depth: int, steps: list) -> None:
        nonlocal vacuous
        if len(bad) >= collect:
            return
        kind = tables.kind_of(pk)
        allowed = lemma.steps[depth]
        if kind is None or (allowed is not None and kind not in allowed):
            vacuous += 1
            return
        for kind, q in tables.white_successors(pk):
            if allowed is not None and kind not in allowed:
                continue  # relation mode yields a single kind anyway
            last_white = depth == lemma.k - 1
            if last_white and lemma.ends_with == "white":
                ok, why = _post_eval(lemma.post, p0_holder[0],
                                     steps + [(kind, q, None)], spec)
                if not ok:
                    bad.append(Counterexample(p0_holder[0], steps + [(kind, q, None)], why))
                    if len(bad) >= collect:
                        return
                continue
            for r in tables.black_replies(q):
                new_steps = steps + [(kind, q, r)]
                if last_white:
                    ok, why = _post_eval(lemma.post, p0_holder[0], new_steps, spec)
                    if not ok:
                        bad.append(Counterexample(p0_holder[0], new_steps, why))
                        if len(bad) >= collect:
                            return
                else:
                    if r.wr is None:
                        vacuous += 1  # capture ends the strategy's world
                        continue
                    extend(r, pack(r, spec), depth + 1, new_steps)

    p0_holder = [None]
    for pk, p in _starts(lemma, spec, tables, use_symmetry):
        scanned += 1
        p0_holder[0] = p
        extend(p, pk, 0, [])
        if len(bad) >= collect:
            break
    return scanned, vacuous, bad


class _EdgeTables:
    """Full-move (white then black) successor arrays for propagation lemmas.

    Row space is the legal white-to-move rook-present positions.  For each
    row the white moves are stored flat (one per row in function mode), and
    for each flat successor its black replies as row indices (-1 when the
    reply leaves the trace domain, e.g. a rook capture).
    """

    def __init__(self, tables: StrategyTables, spec: BoardSpec):
        self.spec = spec
        self.tables = tables
        if tables.mode == "function":
            rows = np.flatnonzero(tables.codes != NO_KIND)
            self.flat_rows = rows
            self.flat_succ = tables.succ.take(rows)
            self.indptr = None
        else:
            import krk.retrograde as retro

            space = retro._Space.__new__(retro._Space)
            space.spec = spec
            space.mode = "relation"
            space.packed = tables.packed
            space.pos = tables.pos
            space.codes = tables.codes
            space.labeled = tables.codes != NO_KIND
            space._build_relation_successors()
            self.flat_rows = space.flat_rows
            self.flat_succ = space.flat_succ
            self.indptr = space.indptr
        valid, caps, packs = engine.black_replies(self.flat_succ, spec)
        reply_rows = np.searchsorted(tables.packed, packs)
        reply_rows = np.clip(reply_rows, 0, len(tables.packed) - 1)
        found = tables.packed[reply_rows] == packs
        self.reply_rows = np.where(valid & ~caps & found, reply_rows, -1)
        self.has_capture = bool((valid & caps).any())

    def rows_reaching(self, target_rows_mask: np.ndarray, kind_mask: np.ndarray):
        """Rows with some (white succ, black reply) landing in the target set."""
        safe = np.clip(self.reply_rows, 0, len(target_rows_mask) - 1)
        reply_ok = (self.reply_rows >= 0) & target_rows_mask[safe]
        flat_ok = reply_ok.any(axis=0)
        out = np.zeros(len(self.tables.packed), dtype=bool)
        if self.indptr is None:
            out[self.flat_rows] = flat_ok
        else:
            padded = np.concatenate([flat_ok.astype(np.int64), [0]])
            cs = np.concatenate([[0], np.cumsum(padded[:-1])])
            per = cs[np.minimum(self.indptr[1:], len(flat_ok))] - cs[
                np.minimum(self.indptr[:-1], len(flat_ok))
            ]
            out = per > 0
        return out & kind_mask

    def max_over_moves(self, next_score: np.ndarray, kind_mask: np.ndarray):
        """Lex-max of next_score over all full moves, -1 where no trace."""
        safe = np.clip(self.reply_rows, 0, len(next_score) - 1)
        reply_score = np.where(self.reply_rows >= 0, next_score[safe], -1)
        flat_max = reply_score.max(axis=0)
        if self.indptr is None:
            out = np.full(len(self.tables.packed), -1, dtype=np.int64)
            out[self.flat_rows] = flat_max
        else:
            padded = np.concatenate([flat_max, [-1]])
            idx = np.minimum(self.indptr[:-1], len(flat_max))
            out = np.maximum.reduceat(padded, idx)[: len(self.indptr) - 1]
            out = np.where(np.diff(self.indptr) > 0, out, -1)
        return np.where(kind_mask, out, -1)


_EDGES: dict = {}


def _edges_for(tables: StrategyTables, spec: BoardSpec) -> _EdgeTables:
    key = (spec.n, spec.variant, tables.mode)
    if key not in _EDGES:
        _EDGES[key] = _EdgeTables(tables, spec)
    return _EDGES[key]


def _kind_mask(tables: StrategyTables, allowed) -> np.ndarray:
    if allowed is None:
        return tables.codes != NO_KIND
    out = np.zeros(len(tables.codes), dtype=bool)
    for kind in allowed:
        out |= tables.codes == KIND_CODE[kind]
    return out


def _pre_mask(lemma: LemmaSpec, spec: BoardSpec, tables: StrategyTables):
    p = tables.pos
    out = np.ones(len(tables.packed), dtype=bool)
    for name in lemma.pre:
        if name == "rook_present":
            continue
        if name == "room_gt_3":
            out &= engine.room_of(p.wrx, p.wry, p.bkx, p.bky, spec.n) > 3
        elif name == "room_le_3":
            out &= engine.room_of(p.wrx, p.wry, p.bkx, p.bky, spec.n) <= 3
        else:  # pragma: no cover - built-ins only use the above
            out &= np.array(
                [PREDICATES[name](unpack(int(pk), spec), spec) for pk in tables.packed]
            )
    return out


def _canonical_mask(spec: BoardSpec, tables: StrategyTables) -> np.ndarray:
    c = engine.canonize_batch(tables.pos, True, np.zeros(len(tables.packed), bool), spec)
    cp = engine.pack_coords(c, True, False, spec)
    return cp == tables.packed


def _check_reach(lemma, spec, tables, use_symmetry, collect=16):
    edges = _edges_for(tables, spec)
    if lemma.post == "last_not_retreat":
        final_bad = _kind_mask(tables, ROOK_RETREATS)
    elif lemma.post == "last_is_mating":
        final_bad = _kind_mask(tables, ALL_KINDS - MATE_MOVES)
    else:
        raise ValueError(lemma.post)
    v = final_bad
    for depth in range(lemma.k - 2, -1, -1):
        v = edges.rows_reaching(v, _kind_mask(tables, lemma.steps[depth]))
    pre = _pre_mask(lemma, spec, tables)
    if use_symmetry:
        pre &= _canonical_mask(spec, tables)
    violating = np.flatnonzero(pre & v)
    scanned = int(pre.sum())
    bad = [
        _rebuild_reach_trace(lemma, spec, tables, int(tables.packed[i]))
        for i in violating[:collect]
    ]
    return scanned, 0, bad


def _rebuild_reach_trace(lemma, spec, tables, pk) -> Counterexample:
    # forward greedy walk to a concrete violating trace
    start = unpack(pk, spec)
    steps = []
    frontier = [(pk, steps)]
    import itertools

    def violates_from(pk: int, depth: int) -> Optional[list]:
        kind = tables.kind_of(pk)
        if kind is None:
            return None
        allowed = lemma.steps[depth]
        if allowed is not None and kind not in allowed:
            return None
        last = depth == lemma.k - 1
        for kind, q in tables.white_successors(pk):
            if last:
                ok, _ = _post_eval(lemma.post, None, [(kind, q, None)], spec)
                if not ok:
                    return [(kind, q, None)]
                continue
            for r in tables.black_replies(q):
                if r.wr is None:
                    continue
                rest = violates_from(pack(r, spec), depth + 1)
                if rest is not None:
                    return [(kind, q, r)] + rest
        return None

    trace = violates_from(pk, 0)
    assert trace is not None
    return Counterexample(start, trace, lemma.post)


def _check_progress(lemma, spec, tables, use_symmetry, collect=16):
    edges = _edges_for(tables, spec)
    p = tables.pos
    n = spec.n
    room = engine.room_of(p.wrx, p.wry, p.bkx, p.bky, n).astype(np.int64)
    cx, cy = engine._critical(p.wrx, p.wry, p.bkx, p.bky)
    manh = (np.abs(p.wkx - cx) + np.abs(p.wky - cy)).astype(np.int64)
    score = room * 256 + manh  # lexicographic (room, distance)
    basic = _kind_mask(tables, BASIC_MOVES)
    m = score
    for _ in range(lemma.k):
        m = edges.max_over_moves(m, basic)
    pre = _pre_mask(lemma, spec, tables)
    if use_symmetry:
        pre &= _canonical_mask(spec, tables)
    scanned = int(pre.sum())
    vacuous = int((pre & (m < 0)).sum())
    violating = np.flatnonzero(pre & (m >= score))
    bad = []
    for i in violating[:collect]:
        bad.append(_rebuild_progress_trace(lemma, spec, tables, int(tables.packed[i])))
    return scanned, vacuous, bad


def _rebuild_progress_trace(lemma, spec, tables, pk) -> Counterexample:
    start = unpack(pk, spec)
    r0 = geo.room(start, spec)
    m0 = geo.manhattan(start.wk, geo.critical_square(start))

    def walk(pk: int, depth: int):
        kind = tables.kind_of(pk)
        if kind is None or kind not in BASIC_MOVES:
            return None
        for kind, q in tables.white_successors(pk):
            for r in tables.black_replies(q):
                if r.wr is None:
                    continue
                if depth == lemma.k - 1:
                    r3, m3 = geo.room(r, spec), geo.manhattan(r.wk, geo.critical_square(r))
                    if (r3, m3) >= (r0, m0):
                        return [(kind, q, r)]
                else:
                    rest = walk(pack(r, spec), depth + 1)
                    if rest is not None:
                        return [(kind, q, r)] + rest
        return None

    trace = walk(pk, 0)
    assert trace is not None
    return Counterexample(start, trace, "no lexicographic progress")


def check_lemma(
    lemma: LemmaSpec,
    spec: BoardSpec,
    use_symmetry: bool = True,
    mode: str = "relation",
) -> LemmaReport:
    t0 = time.monotonic()
    if use_symmetry:
        assert_predicates_invariant(lemma.pre, spec)
    tables = tables_for(spec, mode)
    if lemma.checker == "reach":
        scanned, vacuous, bad = _check_reach(lemma, spec, tables, use_symmetry)
    elif lemma.checker == "progress":
        scanned, vacuous, bad = _check_progress(lemma, spec, tables, use_symmetry)
    else:
        scanned, vacuous, bad = _check_scan(lemma, spec, tables, use_symmetry)
    return LemmaReport(
        name=lemma.name,
        n=spec.n,
        variant=spec.variant.value,
        mode=mode,
        use_symmetry=use_symmetry,
        holds=not bad,
        scanned=scanned,
        vacuous=vacuous,
        counterexamples=bad,
        elapsed_ms=int((time.monotonic() - t0) * 1000),
    )


def clear_caches() -> None:
    _TABLES.clear()
    _EDGES.clear()


# --- equivalence and refinement ----------------------------------------------------


EQUIV_PREDICATES = ("checkmate", "mate_opt", "stalemate", "stalemate_opt")


def check_equivalence(pred_a: str, pred_b: str, spec: BoardSpec,
                      domain: str = "well_formed") -> dict:
    """Exhaustive agreement scan of two named position predicates."""
    t0 = time.monotonic()
    packed = (
        engine.wellformed_packed(spec)
        if domain == "well_formed"
        else engine.legal_packed(spec, white_to_move=None, rook_present=None)
    )
    p, wtm, cap = engine.unpack_coords(packed, spec)
    masks = {}
    for name in (pred_a, pred_b):
        if name in ("checkmate", "stalemate"):
            btm = ~wtm & ~cap
            idx = np.flatnonzero(btm)
            sub = p.take(idx)
            apart = engine._cheb(sub.wkx, sub.wky, sub.bkx, sub.bky) >= 2
            fn = engine.mate_mask if name == "checkmate" else engine.stalemate_mask
            out = np.zeros(len(packed), dtype=bool)
            out[idx] = fn(sub, spec.n) & apart
            masks[name] = out
        elif name == "mate_opt":
            masks[name] = engine.mate_opt_mask(p, wtm, cap, spec)
        elif name == "stalemate_opt":
            masks[name] = engine.stalemate_opt_mask(p, wtm, cap, spec)
        else:
            raise ValueError(f"unknown predicate {name}")
    diff = masks[pred_a] != masks[pred_b]
    bad = packed[diff][:16]
    return {
        "pred_a": pred_a,
        "pred_b": pred_b,
        "n": spec.n,
        "domain": domain,
        "holds": not bool(diff.any()),
        "scanned": int(len(packed)),
        "discrepancies": [int(b) for b in bad],
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }


def check_candidate_equivalence(spec: BoardSpec) -> dict:
    """Candidate-based no_move agrees with the naive full scan, per kind."""
    t0 = time.monotonic()
    packed = engine.legal_packed(spec, white_to_move=True, rook_present=True)
    p, _, _ = engine.unpack_coords(packed, spec)
    per_kind = {}
    holds = True
    from .strategy import cascade

    for kind in cascade(spec):
        a = engine.exists_move(kind, p, spec, use_candidates=True)
        b = engine.exists_move(kind, p, spec, use_candidates=False)
        bad = int((a != b).sum())
        per_kind[kind.value] = bad
        holds &= bad == 0
    return {
        "n": spec.n,
        "variant": spec.variant.value,
        "holds": holds,
        "scanned": int(len(packed)),
        "mismatches": per_kind,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }


def check_refinement(spec: BoardSpec) -> dict:
    """strategy_function's move always satisfies the relation: the chosen
    move's kind is the naive cascade kind and its condition holds."""
    t0 = time.monotonic()
    packed = engine.legal_packed(spec, white_to_move=True, rook_present=True)
    p, _, _ = engine.unpack_coords(packed, spec)
    codes_c = engine.classify_batch(p, spec, use_candidates=True)
    codes_n = engine.classify_batch(p, spec, use_candidates=False)
    agree = codes_c == codes_n
    defined = codes_c != NO_KIND
    succ = engine.choose_moves(p, codes_c, spec)
    move_ok = np.zeros(len(packed), dtype=bool)
    from .strategy import KING_KINDS

    for kind in MoveKind:
        rows = np.flatnonzero(codes_c == KIND_CODE[kind])
        if len(rows) == 0:
            continue
        sub, qsub = p.take(rows), succ.take(rows)
        if kind == MoveKind.READY_TO_MATE:
            piece = None  # either piece may deliver a ReadyToMate move
        else:
            piece = "K" if kind in KING_KINDS else "R"
        if piece is None:
            king_moved = (qsub.wkx != sub.wkx) | (qsub.wky != sub.wky)
            ok = np.zeros(len(rows), dtype=bool)
            for pc, mask in (("K", king_moved), ("R", ~king_moved)):
                idx = np.flatnonzero(mask)
                if len(idx):
                    ok[idx] = engine._cond(kind, sub.take(idx), pc, qsub.take(idx),
                                           spec, use_candidates=False)
            move_ok[rows] = ok
        else:
            move_ok[rows] = engine._cond(kind, sub, piece, qsub, spec,
                                         use_candidates=False)
    holds = bool((agree & defined & move_ok).all())
    bad = packed[~(agree & defined & move_ok)][:16]
    return {
        "n": spec.n,
        "variant": spec.variant.value,
        "holds": holds,
        "scanned": int(len(packed)),
        "discrepancies": [int(b) for b in bad],
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
