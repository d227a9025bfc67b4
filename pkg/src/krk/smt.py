"""Linear-integer-arithmetic encodings of the built-in conjectures over a
symbolic board size.

Each lemma becomes a quantifier-free SMT-LIB 2 script asserting its negation
(Pre and Seq and not Post) together with n >= 4; unsatisfiability establishes
the conjecture for every board size at once.  The no-move sides of the
strategy cascade are finite conjunctions over the O(1) candidate squares,
which is exactly what makes the encoding independent of n.  Terms stay
linear: products only ever multiply by integer literals, and floor/ceil
midpoints are pinned by inequalities on helper symbols instead of division.

A small structural term evaluator doubles as the ground-instance oracle: the
test suite substitutes n := 8 and checks formula satisfaction against the
concrete trace semantics on random traces.
"""

from __future__ import annotations

import re
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Optional, Union

from .model import Variant
from .strategy import BASIC_MOVES, MATE_MOVES, MoveKind
from .lemmas import RETREAT_PREDECESSORS, LemmaSpec

Term = Union[int, bool, str, tuple]

KINDS = list(MoveKind)
KIND_TAG = {
    MoveKind.IMMEDIATE_MATE: "im",
    MoveKind.READY_TO_MATE: "rtm",
    MoveKind.SQUEEZE: "sq",
    MoveKind.APPROACH_DIAG: "apd",
    MoveKind.APPROACH_NON_DIAG: "apn",
    MoveKind.KEEP_ROOM_DIAG: "krd",
    MoveKind.KEEP_ROOM_NON_DIAG: "krn",
    MoveKind.ROOK_HOME: "rh",
    MoveKind.ROOK_SAFE: "rs",
    MoveKind.ROOK_SAFE_SMALL_BOARDS: "rsb",
}

POS_FIELDS = ("wkx", "wky", "wrx", "wry", "bkx", "bky")


@dataclass
class LiaFormula:
    name: str
    int_consts: list = field(default_factory=list)
    bool_consts: list = field(default_factory=list)
    defines: list = field(default_factory=list)  # (name, params, ret, body)
    assertions: list = field(default_factory=list)

    def declare_int(self, name: str) -> str:
        self.int_consts.append(name)
        return name

    def declare_bool(self, name: str) -> str:
        self.bool_consts.append(name)
        return name


# --- term helpers -----------------------------------------------------------------


def _and(*ts: Term) -> Term:
    ts = [t for t in ts if t is not True]
    if any(t is False for t in ts):
        return False
    if not ts:
        return True
    return ("and", *ts) if len(ts) > 1 else ts[0]


def _or(*ts: Term) -> Term:
    ts = [t for t in ts if t is not False]
    if any(t is True for t in ts):
        return True
    if not ts:
        return False
    return ("or", *ts) if len(ts) > 1 else ts[0]


def _not(t: Term) -> Term:
    return ("not", t)


def _eq(a: Term, b: Term) -> Term:
    return ("=", a, b)


def _add(*ts: Term) -> Term:
    return ("+", *ts)


def _sub(a: Term, b: Term) -> Term:
    return ("-", a, b)


def _le(a, b) -> Term:
    return ("<=", a, b)


def _lt(a, b) -> Term:
    return ("<", a, b)


def _ge(a, b) -> Term:
    return (">=", a, b)


def _gt(a, b) -> Term:
    return (">", a, b)


def _ite(c, t, e) -> Term:
    return ("ite", c, t, e)


def _call(name: str, *args: Term) -> Term:
    return ("call", name, *args)


def _pos_args(prefix: str) -> list[str]:
    return [f"{prefix}{f}" for f in POS_FIELDS]


# --- the macro library --------------------------------------------------------------
#
# Macros receive explicit coordinates plus the board size n as parameters so
# that the emitted script works for a single global (declare-const n Int).


def _p(names):  # parameter list of Ints
    return [(x, "Int") for x in names]


def _library() -> list:
    P = _pos_args("")
    Q = _pos_args("q")
    d = []

    d.append(("iabs", _p(["x"]), "Int", _ite(_ge("x", 0), "x", _sub(0, "x"))))
    d.append(("imax", _p(["a", "b"]), "Int", _ite(_ge("a", "b"), "a", "b")))
    d.append(("imin", _p(["a", "b"]), "Int", _ite(_le("a", "b"), "a", "b")))
    d.append(("cheb", _p(["ax", "ay", "bx", "by"]), "Int",
              _call("imax", _call("iabs", _sub("ax", "bx")), _call("iabs", _sub("ay", "by")))))
    d.append(("manh", _p(["ax", "ay", "bx", "by"]), "Int",
              _add(_call("iabs", _sub("ax", "bx")), _call("iabs", _sub("ay", "by")))))
    d.append(("onboard", _p(["x", "y", "n"]), "Bool",
              _and(_ge("x", 0), _lt("x", "n"), _ge("y", 0), _lt("y", "n"))))
    d.append(("between", _p(["a", "u", "v"]), "Bool",
              _and(_lt(_call("imin", "u", "v"), "a"), _lt("a", _call("imax", "u", "v")))))
    # rook attacks square s, only the white king can block
    d.append(("attacks", _p(["wrx", "wry", "wkx", "wky", "sx", "sy"]), "Bool",
              _and(_not(_and(_eq("wrx", "sx"), _eq("wry", "sy"))),
                   _or(_and(_eq("wrx", "sx"),
                            _not(_and(_eq("wkx", "sx"), _call("between", "wky", "wry", "sy")))),
                       _and(_eq("wry", "sy"),
                            _not(_and(_eq("wky", "sy"), _call("between", "wkx", "wrx", "sx"))))))))
    d.append(("wellformed", _p(P + ["n"]), "Bool",
              _and(_call("onboard", "wkx", "wky", "n"),
                   _call("onboard", "wrx", "wry", "n"),
                   _call("onboard", "bkx", "bky", "n"),
                   _not(_and(_eq("wkx", "bkx"), _eq("wky", "bky"))),
                   _not(_and(_eq("wrx", "wkx"), _eq("wry", "wky"))),
                   _not(_and(_eq("wrx", "bkx"), _eq("wry", "bky"))))))
    d.append(("legalwtm", _p(P + ["n"]), "Bool",
              _and(_call("wellformed", *P, "n"),
                   _ge(_call("cheb", "wkx", "wky", "bkx", "bky"), 2),
                   _not(_call("attacks", "wrx", "wry", "wkx", "wky", "bkx", "bky")))))

    # black king step (tx,ty): legal, possibly capturing the rook
    d.append(("bkstep", _p(P + ["tx", "ty", "n"]), "Bool",
              _and(_call("onboard", "tx", "ty", "n"),
                   _eq(_call("cheb", "tx", "ty", "bkx", "bky"), 1),
                   _ge(_call("cheb", "tx", "ty", "wkx", "wky"), 2),
                   _or(_and(_eq("tx", "wrx"), _eq("ty", "wry")),
                       _not(_call("attacks", "wrx", "wry", "wkx", "wky", "tx", "ty"))))))

    steps = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]
    d.append(("bkcannotmove", _p(P + ["n"]), "Bool",
              _and(*[_not(_call("bkstep", *P, _add("bkx", dx), _add("bky", dy), "n"))
                     for dx, dy in steps])))
    d.append(("ismate", _p(P + ["n"]), "Bool",
              _and(_call("attacks", "wrx", "wry", "wkx", "wky", "bkx", "bky"),
                   _call("bkcannotmove", *P, "n"))))
    d.append(("isstalemate", _p(P + ["n"]), "Bool",
              _and(_not(_call("attacks", "wrx", "wry", "wkx", "wky", "bkx", "bky")),
                   _call("bkcannotmove", *P, "n"))))

    d.append(("rookmove", _p(P + ["tx", "ty", "n"]), "Bool",
              _and(_call("onboard", "tx", "ty", "n"),
                   _not(_and(_eq("tx", "wkx"), _eq("ty", "wky"))),
                   _not(_and(_eq("tx", "bkx"), _eq("ty", "bky"))),
                   _or(_and(_eq("ty", "wry"), _not(_eq("tx", "wrx")),
                            _not(_and(_eq("wky", "wry"), _call("between", "wkx", "wrx", "tx"))),
                            _not(_and(_eq("bky", "wry"), _call("between", "bkx", "wrx", "tx")))),
                       _and(_eq("tx", "wrx"), _not(_eq("ty", "wry")),
                            _not(_and(_eq("wkx", "wrx"), _call("between", "wky", "wry", "ty"))),
                            _not(_and(_eq("bkx", "wrx"), _call("between", "bky", "wry", "ty"))))))))
    d.append(("kingmove", _p(P + ["tx", "ty", "n"]), "Bool",
              _and(_call("onboard", "tx", "ty", "n"),
                   _eq(_call("cheb", "tx", "ty", "wkx", "wky"), 1),
                   _not(_and(_eq("tx", "wrx"), _eq("ty", "wry"))),
                   _ge(_call("cheb", "tx", "ty", "bkx", "bky"), 2))))

    d.append(("room", _p(["wrx", "wry", "bkx", "bky", "n"]), "Int",
              _ite(_or(_eq("wrx", "bkx"), _eq("wry", "bky")),
                   _sub(_add("n", "n"), 1),
                   _add(_ite(_gt("wrx", "bkx"), "wrx", _sub(_sub("n", 1), "wrx")),
                        _ite(_gt("wry", "bky"), "wry", _sub(_sub("n", 1), "wry"))))))
    d.append(("critx", _p(["wrx", "bkx"]), "Int",
              _ite(_eq("wrx", "bkx"), "wrx",
                   _ite(_gt("wrx", "bkx"), _sub("wrx", 1), _add("wrx", 1)))))
    d.append(("exposed", _p(P + ["off"]), "Bool",
              _ge(_call("cheb", "wrx", "wry", "wkx", "wky"),
                  _add(_call("cheb", "wrx", "wry", "bkx", "bky"), "off"))))
    d.append(("divides", _p(P), "Bool",
              _or(_and(_lt(_call("imin", "wkx", "bkx"), "wrx"),
                       _lt("wrx", _call("imax", "wkx", "bkx"))),
                  _and(_lt(_call("imin", "wky", "bky"), "wry"),
                       _lt("wry", _call("imax", "wky", "bky"))))))
    d.append(("lpattern", _p(P), "Bool",
              _or(_and(_eq("wky", "bky"), _eq(_call("iabs", _sub("wkx", "bkx")), 2),
                       _eq("wrx", "wkx"), _eq(_call("iabs", _sub("wry", "wky")), 1)),
                  _and(_eq("wkx", "bkx"), _eq(_call("iabs", _sub("wky", "bky")), 2),
                       _eq("wry", "wky"), _eq(_call("iabs", _sub("wrx", "wkx")), 1)))))
    d.append(("lpatternext", _p(P), "Bool",
              _or(_and(_or(_eq(_call("iabs", _sub("wkx", "bkx")), 2),
                           _eq(_call("iabs", _sub("wkx", "bkx")), 3)),
                       _le(_call("iabs", _sub("wky", "bky")), 1),
                       _eq("wrx", "wkx"), _eq(_call("iabs", _sub("wry", "wky")), 1)),
                  _and(_or(_eq(_call("iabs", _sub("wky", "bky")), 2),
                           _eq(_call("iabs", _sub("wky", "bky")), 3)),
                       _le(_call("iabs", _sub("wkx", "bkx")), 1),
                       _eq("wry", "wky"), _eq(_call("iabs", _sub("wrx", "wkx")), 1)))))
    d.append(("sameedge", _p(["wkx", "wky", "bkx", "bky", "n"]), "Bool",
              _or(_and(_eq("wkx", "bkx"), _or(_eq("wkx", 0), _eq("wkx", _sub("n", 1)))),
                  _and(_eq("wky", "bky"), _or(_eq("wky", 0), _eq("wky", _sub("n", 1)))))))

    # a mating rook move exists (the four edge-projection candidates)
    mate_next = []
    for tx, ty in ((0, "wry"), (_sub("n", 1), "wry"), ("wrx", 0), ("wrx", _sub("n", 1))):
        mate_next.append(_and(_call("rookmove", *P, tx, ty, "n"),
                              _call("ismate", "wkx", "wky", tx, ty, "bkx", "bky", "n")))
    d.append(("rookcanmate", _p(P + ["n"]), "Bool", _or(*mate_next)))

    # ready-to-mate condition on the reached position q
    every_reply = [_not(_call("isstalemate", *Q, "n"))]
    for dx, dy in steps:
        tx, ty = _add("qbkx", dx), _add("qbky", dy)
        captures = _and(_eq(tx, "qwrx"), _eq(ty, "qwry"))
        every_reply.append(
            _or(_not(_call("bkstep", *Q, tx, ty, "n")),
                _and(_not(captures),
                     _call("rookcanmate", "qwkx", "qwky", "qwrx", "qwry", tx, ty, "n"))))
    d.append(("rtmcond", _p(Q + ["n"]), "Bool", _and(*every_reply)))

    return d


def _edge_clause_term(Q, variant: Variant) -> Term:
    roomq = _call("room", Q[2], Q[3], Q[4], Q[5], "n")
    if variant == Variant.CLASSIC8:
        off_edge = _not(_or(_eq(Q[0], 0), _eq(Q[0], _sub("n", 1)),
                            _eq(Q[1], 0), _eq(Q[1], _sub("n", 1))))
    else:
        off_edge = _not(_call("sameedge", Q[0], Q[1], Q[4], Q[5], "n"))
    return _or(_gt(roomq, 3), off_edge)


def _cond_term(kind: MoveKind, P, Q, mids, variant: Variant) -> Term:
    """move_cond(kind, p, q) as a term; the moved piece is implied by the
    skeleton equalities asserted alongside."""
    q_stale = _call("isstalemate", *Q, "n")
    if kind == MoveKind.IMMEDIATE_MATE:
        return _call("ismate", *Q, "n")
    if kind == MoveKind.READY_TO_MATE:
        return _call("rtmcond", *Q, "n")
    if kind == MoveKind.SQUEEZE:
        return _and(
            _lt(_call("room", Q[2], Q[3], Q[4], Q[5], "n"),
                _call("room", P[2], P[3], P[4], P[5], "n")),
            _not(_call("exposed", *Q, 1)),
            _call("divides", *Q),
            _not(q_stale),
        )
    if kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG,
                MoveKind.KEEP_ROOM_DIAG, MoveKind.KEEP_ROOM_NON_DIAG):
        diag = _and(_eq(_call("iabs", _sub(Q[0], P[0])), 1),
                    _eq(_call("iabs", _sub(Q[1], P[1])), 1))
        want_diag = kind in (MoveKind.APPROACH_DIAG, MoveKind.KEEP_ROOM_DIAG)
        shape = diag if want_diag else _not(diag)
        if kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG):
            cx = _call("critx", Q[2], Q[4])
            cy = _call("critx", Q[3], Q[5])
            closer = _lt(_call("manh", Q[0], Q[1], cx, cy),
                         _call("manh", P[0], P[1], cx, cy))
            aim = _and(closer, _or(_call("divides", *Q), _call("lpattern", *Q)))
        else:
            aim = _and(_le(_call("cheb", Q[0], Q[1], Q[2], Q[3]),
                           _call("cheb", P[0], P[1], P[2], P[3])),
                       _call("divides", *Q))
        return _and(shape, aim, _not(_call("exposed", *Q, 1)),
                    _edge_clause_term(Q, variant), _not(q_stale))
    if kind == MoveKind.ROOK_HOME:
        dx = _sub(Q[2], Q[0])
        dy = _sub(Q[3], Q[1])
        via_file = _and(_eq(_call("iabs", dx), 1), _not(_eq(Q[2], P[2])),
                        _or(_gt(("*", dx, _sub(Q[4], Q[0])), 0), _eq(Q[4], Q[0])))
        via_rank = _and(_eq(_call("iabs", dy), 1), _not(_eq(Q[3], P[3])),
                        _or(_gt(("*", dy, _sub(Q[5], Q[1])), 0), _eq(Q[5], Q[1])))
        homing = _lt(_call("manh", Q[2], Q[3], Q[0], Q[1]),
                     _call("manh", P[2], P[3], P[0], P[1]))
        guarded = _or(_gt(_call("cheb", Q[2], Q[3], Q[4], Q[5]), 1),
                      _eq(_call("cheb", Q[2], Q[3], Q[0], Q[1]), 1))
        return _and(_or(via_file, via_rank),
                    _or(_not(_call("exposed", *Q, 1)), homing),
                    guarded, _not(q_stale))
    if kind == MoveKind.ROOK_SAFE:
        hi = _sub("n", 1)
        new_edge = _or(
            _and(_eq(Q[2], 0), _not(_eq(P[2], 0))),
            _and(_eq(Q[2], hi), _not(_eq(P[2], hi))),
            _and(_eq(Q[3], 0), _not(_eq(P[3], 0))),
            _and(_eq(Q[3], hi), _not(_eq(P[3], hi))),
        )
        dbk = _call("cheb", Q[2], Q[3], Q[4], Q[5])
        both = _and(_eq(_call("cheb", Q[2], Q[3], Q[0], Q[1]), 1), _eq(dbk, 1))
        return _and(new_edge, _or(both, _gt(dbk, 2)), _not(q_stale))
    if kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
        hi = _sub("n", 1)
        shared = _or(
            _and(_eq(Q[0], 0), _eq(Q[2], 0)),
            _and(_eq(Q[0], hi), _eq(Q[2], hi)),
            _and(_eq(Q[1], 0), _eq(Q[3], 0)),
            _and(_eq(Q[1], hi), _eq(Q[3], hi)),
        )
        # total encoding: the small-board step only exists for n <= 5
        return _and(_le("n", 5), shared,
                    _eq(_call("cheb", Q[2], Q[3], Q[4], Q[5]), 2))
    raise ValueError(kind)


# product of variables is never emitted; the only '*' is sign testing by a
# +-1 difference; keep it linear by expanding into a disjunction instead
def _sign_product_fix(term: Term) -> Term:
    if isinstance(term, tuple):
        if term[0] == "*":
            a, b = term[1], term[2]
            return _ite(_ge(_sign_product_fix(a), 1), _sign_product_fix(b),
                        _sub(0, _sign_product_fix(b)))
        return tuple(term[:1]) + tuple(_sign_product_fix(t) for t in term[1:])
    return term


def _candidates_terms(kind: MoveKind, P, mids) -> list[tuple[str, Term, Term]]:
    """Candidate targets as (piece, tx, ty) terms; mirrors strategy.candidates."""
    wkx, wky, wrx, wry, bkx, bky = P
    hi = _sub("n", 1)
    kings = [("K", _add(wkx, dx), _add(wky, dy))
             for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]
    edges = [("R", 0, wry), ("R", hi, wry), ("R", wrx, 0), ("R", wrx, hi)]
    bk_lines = [("R", _add(bkx, 1), wry), ("R", _sub(bkx, 1), wry),
                ("R", wrx, _add(bky, 1)), ("R", wrx, _sub(bky, 1))]
    wk_proj = [("R", wkx, wry), ("R", wrx, wky)]
    if kind == MoveKind.IMMEDIATE_MATE or kind == MoveKind.ROOK_SAFE:
        return edges
    if kind == MoveKind.READY_TO_MATE:
        return kings + edges + bk_lines + wk_proj
    if kind == MoveKind.SQUEEZE:
        mxf, mxc, myf, myc = mids
        return [
            ("R", mxf, wry), ("R", mxc, wry), ("R", wrx, myf), ("R", wrx, myc),
            ("R", _sub(_add(bkx, wky), wry), wry), ("R", wrx, _sub(_add(bkx, wky), wrx)),
            ("R", _sub(_add(wkx, bky), wry), wry), ("R", wrx, _sub(_add(wkx, bky), wrx)),
            ("R", _add(_sub(bkx, wky), wry), wry), ("R", wrx, _add(_sub(wrx, bkx), wky)),
            ("R", _add(_sub(wkx, bky), wry), wry), ("R", wrx, _add(_sub(wrx, wkx), bky)),
            ("R", _add(bkx, 1), wry), ("R", _sub(bkx, 1), wry),
            ("R", wrx, _add(bky, 1)), ("R", wrx, _sub(bky, 1)),
            ("R", _add(bkx, 2), wry), ("R", _sub(bkx, 2), wry),
            ("R", wrx, _add(bky, 2)), ("R", wrx, _sub(bky, 2)),
        ]
    if kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG,
                MoveKind.KEEP_ROOM_DIAG, MoveKind.KEEP_ROOM_NON_DIAG):
        return kings
    if kind == MoveKind.ROOK_HOME:
        arrivals = [("R", _sub(wkx, 1), wry), ("R", _add(wkx, 1), wry),
                    ("R", wrx, _sub(wky, 1)), ("R", wrx, _add(wky, 1))]
        return arrivals + edges + bk_lines + wk_proj
    if kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
        out = []
        for ex, ey, wk_on in (
            (0, None, _eq(wkx, 0)), (hi, None, _eq(wkx, hi)),
            (None, 0, _eq(wky, 0)), (None, hi, _eq(wky, hi)),
        ):
            if ex is not None:
                out.append(("R", ex, _ite(wk_on, wry, -1)))
                for dd in (-2, -1, 0, 1, 2):
                    out.append(("R", ex, _ite(wk_on, _add(bky, dd), -1)))
            else:
                out.append(("R", _ite(wk_on, wrx, -1), ey))
                for dd in (-2, -1, 0, 1, 2):
                    out.append(("R", _ite(wk_on, _add(bkx, dd), -1), ey))
        return out
    raise ValueError(kind)


def _succ_terms(P, piece: str, tx: Term, ty: Term):
    if piece == "K":
        return [tx, ty, P[2], P[3], P[4], P[5]]
    return [P[0], P[1], tx, ty, P[4], P[5]]


def _move_valid(P, piece: str, tx, ty) -> Term:
    fn = "kingmove" if piece == "K" else "rookmove"
    return _call(fn, *P, tx, ty, "n")


def _no_move_term(kind: MoveKind, P, mids, variant: Variant) -> Term:
    if variant == Variant.CLASSIC8 and kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
        return True
    parts = []
    for piece, tx, ty in _candidates_terms(kind, P, mids):
        q = _succ_terms(P, piece, tx, ty)
        parts.append(_not(_and(_move_valid(P, piece, tx, ty),
                               _cond_term(kind, P, q, mids, variant))))
    return _and(*parts)


def _strategy_move_term(kind: MoveKind, P, Q, mids, variant: Variant) -> Term:
    rook_kinds_skeleton = _and(_eq(Q[0], P[0]), _eq(Q[1], P[1]),
                               _call("rookmove", *P, Q[2], Q[3], "n"))
    king_skeleton = _and(_eq(Q[2], P[2]), _eq(Q[3], P[3]),
                         _call("kingmove", *P, Q[0], Q[1], "n"))
    if kind == MoveKind.READY_TO_MATE:
        skeleton = _or(rook_kinds_skeleton, king_skeleton)
    elif kind in (MoveKind.APPROACH_DIAG, MoveKind.APPROACH_NON_DIAG,
                  MoveKind.KEEP_ROOM_DIAG, MoveKind.KEEP_ROOM_NON_DIAG):
        skeleton = king_skeleton
    else:
        skeleton = rook_kinds_skeleton
    earlier = []
    for k in KINDS:
        if k == kind:
            break
        earlier.append(_no_move_term(k, P, mids, variant))
    same_bk = _and(_eq(Q[4], P[4]), _eq(Q[5], P[5]))
    return _and(same_bk, skeleton, _cond_term(kind, P, Q, mids, variant), *earlier)


def _black_move_term(Q, R, captured: str) -> Term:
    """q (black to move) to r (white to move), captured marks rook capture."""
    take = _and(_eq(R[4], Q[2]), _eq(R[5], Q[3]))
    return _and(
        _eq(R[0], Q[0]), _eq(R[1], Q[1]),
        _eq(_call("cheb", R[4], R[5], Q[4], Q[5]), 1),
        _call("onboard", R[4], R[5], "n"),
        _ge(_call("cheb", R[4], R[5], Q[0], Q[1]), 2),
        _eq(captured, take),
        _ite(captured, _and(_eq(R[2], 0), _eq(R[3], 0)),
             _and(_eq(R[2], Q[2]), _eq(R[3], Q[3]),
                  _not(_call("attacks", Q[2], Q[3], Q[0], Q[1], R[4], R[5])))),
    )


def encode_lemma_lia(lemma: LemmaSpec, variant: Variant = Variant.GENERALIZED) -> LiaFormula:
    """The negated lemma over symbolic n: satisfiable iff a counterexample
    exists on some board of size >= 4."""
    f = LiaFormula(name=lemma.name)
    f.defines = _library()
    f.declare_int("n")
    f.assertions.append(_ge("n", 4))

    def declare_pos(prefix: str) -> list[str]:
        return [f.declare_int(f"{prefix}_{c}") for c in POS_FIELDS]

    def declare_mids(i: int, P) -> tuple:
        out = []
        for tag, a, b in (("mxf", P[0], P[4]), ("myf", P[1], P[5])):
            s = _add(a, b)
            fl = f.declare_int(f"{tag}{i}")
            f.assertions.append(_and(_le(("+", fl, fl), s), _le(s, _add(("+", fl, fl), 1))))
            ce = f.declare_int(f"{tag}c{i}")
            s1 = _add(s, 1)
            f.assertions.append(_and(_le(("+", ce, ce), s1), _le(s1, _add(("+", ce, ce), 1))))
            out += [fl, ce]
        return (out[0], out[1], out[2], out[3])

    positions = [declare_pos("p0")]
    f.assertions.append(_call("legalwtm", *positions[0], "n"))
    for name in lemma.pre:
        P = positions[0]
        if name == "room_gt_3":
            f.assertions.append(_gt(_call("room", P[2], P[3], P[4], P[5], "n"), 3))
        elif name == "room_le_3":
            f.assertions.append(_le(_call("room", P[2], P[3], P[4], P[5], "n"), 3))
        elif name == "invariant_core":
            f.assertions.append(_invariant_term(P, white_to_move=True))
        elif name != "rook_present":
            raise ValueError(f"predicate {name} has no LIA encoding")

    selectors: list[dict] = []
    whites: list[list[str]] = []
    captured: list[str] = []
    for i in range(lemma.k):
        P = positions[-1]
        mids = declare_mids(i, P)
        Q = declare_pos(f"q{i}")
        whites.append(Q)
        allowed = lemma.steps[i]
        sel = {}
        arms = []
        for kind in KINDS:
            if variant == Variant.CLASSIC8 and kind == MoveKind.ROOK_SAFE_SMALL_BOARDS:
                continue
            s = f.declare_bool(f"m{i}_{KIND_TAG[kind]}")
            sel[kind] = s
            if allowed is not None and kind not in allowed:
                f.assertions.append(_not(s))
            else:
                arms.append(_and(s, _strategy_move_term(kind, P, Q, mids, variant)))
        names = list(sel.values())
        for a in range(len(names)):  # at most one kind selected
            for b in range(a + 1, len(names)):
                f.assertions.append(_not(_and(names[a], names[b])))
        f.assertions.append(_or(*arms))
        selectors.append(sel)

        last = i == lemma.k - 1
        if not (last and lemma.ends_with == "white"):
            R = declare_pos(f"p{i + 1}")
            cap = f.declare_bool(f"cap{i + 1}")
            captured.append(cap)
            positions.append(R)
            f.assertions.append(_black_move_term(Q, R, cap))
            if not last:
                f.assertions.append(_not(cap))

    f.assertions.append(_negated_post(lemma, positions, whites, selectors, captured))
    f.assertions = [_sign_product_fix(a) for a in f.assertions]
    f.defines = [(nm, ps, rt, _sign_product_fix(b)) for nm, ps, rt, b in f.defines]
    return f


def _invariant_term(P, white_to_move: bool) -> Term:
    lp = _call("lpatternext" if white_to_move else "lpattern", *P)
    incheck = False if white_to_move else _call(
        "attacks", P[2], P[3], P[0], P[1], P[4], P[5])
    return _and(
        _not(_call("exposed", *P, 2 if white_to_move else 1)),
        _or(_call("divides", *P), lp),
        _not(incheck) if incheck is not False else True,
        _gt(_call("room", P[2], P[3], P[4], P[5], "n"), 2),
    )


def _negated_post(lemma, positions, whites, selectors, captured) -> Term:
    post = lemma.post
    if post == "rook_survives":
        return captured[-1]
    if post == "final_is_mate":
        return _not(_call("ismate", *whites[-1], "n"))
    if post == "mate_on_second":
        return _not(_and(selectors[1][MoveKind.IMMEDIATE_MATE],
                         _call("ismate", *whites[1], "n")))
    if post == "last_not_retreat":
        s = selectors[-1]
        return _or(s[MoveKind.ROOK_HOME], s[MoveKind.ROOK_SAFE])
    if post == "last_is_mating":
        s = selectors[-1]
        return _not(_or(s[MoveKind.IMMEDIATE_MATE], s[MoveKind.READY_TO_MATE]))
    if post == "second_basic_or_mate":
        s = selectors[-1]
        good = [s[k] for k in KINDS if k in s and (k in BASIC_MOVES or k in MATE_MOVES)]
        return _not(_or(*good))
    if post == "second_not_rook_safe":
        return selectors[-1][MoveKind.ROOK_SAFE]
    if post == "rook_home_preceded_by_retreat":
        pred = [selectors[0][k] for k in KINDS if k in selectors[0] and k in RETREAT_PREDECESSORS]
        return _and(selectors[-1][MoveKind.ROOK_HOME], _not(_or(*pred)))
    if post == "third_not_rook_home":
        return selectors[-1][MoveKind.ROOK_HOME]
    if post == "divide_established":
        Q = whites[-1]
        cond = _and(_not(_call("exposed", *Q, 1)), _call("divides", *Q),
                    _not(_call("attacks", Q[2], Q[3], Q[0], Q[1], Q[4], Q[5])),
                    _gt(_call("room", Q[2], Q[3], Q[4], Q[5], "n"), 2))
        return _not(cond)
    if post == "invariant_still_holds":
        return _not(_and(_invariant_term(whites[-1], white_to_move=False),
                         _invariant_term(positions[-1], white_to_move=True)))
    if post == "room_then_distance_decreases":
        P0, P3 = positions[0], positions[-1]
        r0 = _call("room", P0[2], P0[3], P0[4], P0[5], "n")
        r3 = _call("room", P3[2], P3[3], P3[4], P3[5], "n")
        m0 = _call("manh", P0[0], P0[1], _call("critx", P0[2], P0[4]),
                   _call("critx", P0[3], P0[5]))
        m3 = _call("manh", P3[0], P3[1], _call("critx", P3[2], P3[4]),
                   _call("critx", P3[3], P3[5]))
        return _not(_or(_lt(r3, r0), _and(_eq(r3, r0), _lt(m3, m0))))
    raise ValueError(post)


# --- emission -----------------------------------------------------------------------


def _sexpr(t: Term) -> str:
    if t is True:
        return "true"
    if t is False:
        return "false"
    if isinstance(t, int):
        return str(t) if t >= 0 else f"(- {-t})"
    if isinstance(t, str):
        return t
    op = t[0]
    if op == "call":
        if len(t) == 2:
            return t[1]
        return "(" + t[1] + " " + " ".join(_sexpr(a) for a in t[2:]) + ")"
    return "(" + op + " " + " ".join(_sexpr(a) for a in t[1:]) + ")"


def to_smtlib(f: LiaFormula) -> str:
    lines = [
        f"; lemma {f.name}: negation over symbolic board size, unsat = lemma holds",
        "(set-logic QF_LIA)",
    ]
    for name in f.int_consts:
        lines.append(f"(declare-const {name} Int)")
    for name in f.bool_consts:
        lines.append(f"(declare-const {name} Bool)")
    for name, params, ret, body in f.defines:
        ps = " ".join(f"({p} {s})" for p, s in params)
        lines.append(f"(define-fun {name} ({ps}) {ret} {_sexpr(body)})")
    for a in f.assertions:
        lines.append(f"(assert {_sexpr(a)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def emit_smtlib(f: LiaFormula, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(to_smtlib(f))


# --- linearity ----------------------------------------------------------------------


def linearity_violations(f: LiaFormula) -> list[str]:
    """Products with more than one non-literal factor (must be empty)."""
    bad: list[str] = []

    def walk(t: Term) -> None:
        if not isinstance(t, tuple):
            return
        if t[0] == "*":
            nonconst = [a for a in t[1:] if not isinstance(a, int)]
            if len(nonconst) > 1:
                bad.append(_sexpr(t))
        start = 2 if t[0] == "call" else 1
        for a in t[start:]:
            walk(a)

    for a in f.assertions:
        walk(a)
    for _, _, _, body in f.defines:
        walk(body)
    return bad


# --- evaluation ---------------------------------------------------------------------


class Evaluator:
    """Structural term evaluator used for ground-instance cross-validation."""

    def __init__(self, f: LiaFormula):
        self.funcs = {name: (params, body) for name, params, _, body in f.defines}
        self.formula = f

    def term(self, t: Term, env: dict):
        if isinstance(t, bool) or isinstance(t, int):
            return t
        if isinstance(t, str):
            return env[t]
        op = t[0]
        if op == "call":
            params, body = self.funcs[t[1]]
            inner = {p: self.term(a, env) for (p, _), a in zip(params, t[2:])}
            return self.term(body, inner)
        if op == "ite":
            return self.term(t[2] if self.term(t[1], env) else t[3], env)
        if op == "and":
            return all(self.term(a, env) for a in t[1:])
        if op == "or":
            return any(self.term(a, env) for a in t[1:])
        if op == "not":
            return not self.term(t[1], env)
        args = [self.term(a, env) for a in t[1:]]
        if op == "+":
            return sum(args)
        if op == "-":
            return -args[0] if len(args) == 1 else args[0] - args[1]
        if op == "*":
            out = 1
            for a in args:
                out *= a
            return out
        if op == "=":
            return args[0] == args[1]
        if op == "<=":
            return args[0] <= args[1]
        if op == "<":
            return args[0] < args[1]
        if op == ">=":
            return args[0] >= args[1]
        if op == ">":
            return args[0] > args[1]
        raise ValueError(f"unknown op {op}")

    def satisfied(self, env: dict) -> bool:
        return all(self.term(a, env) for a in self.formula.assertions)


# --- ground-instance cross-validation ------------------------------------------------


def trace_environment(f: LiaFormula, lemma: LemmaSpec, n: int, start, steps,
                      variant: Variant = Variant.GENERALIZED) -> dict:
    """Assignment for every declared symbol from a concrete trace.

    steps: [(MoveKind, after_white KRKPosition, after_black KRKPosition|None)]
    Helper midpoint symbols are functionally determined and computed here.
    """
    env = {"n": n}

    def put_pos(prefix: str, p) -> None:
        wr = p.wr if p.wr is not None else type(p.wk)(0, 0)
        vals = (p.wk.x, p.wk.y, wr.x, wr.y, p.bk.x, p.bk.y)
        for fieldname, v in zip(POS_FIELDS, vals):
            env[f"{prefix}_{fieldname}"] = v

    put_pos("p0", start)
    cur = start
    for i, (kind, q, r) in enumerate(steps):
        s = cur.wk.x + cur.bk.x
        env[f"mxf{i}"], env[f"mxfc{i}"] = s // 2, (s + 1) // 2
        s = cur.wk.y + cur.bk.y
        env[f"myf{i}"], env[f"myfc{i}"] = s // 2, (s + 1) // 2
        put_pos(f"q{i}", q)
        for k, tag in KIND_TAG.items():
            name = f"m{i}_{tag}"
            if name in set(f.bool_consts):
                env[name] = k == kind
        if r is not None:
            put_pos(f"p{i + 1}", r)
            env[f"cap{i + 1}"] = r.wr is None
            cur = r
    return env


def concrete_violates(lemma: LemmaSpec, spec, start, steps) -> bool:
    """Pre and Seq and not Post, evaluated with the concrete rules."""
    from . import lemmas as lm
    from .model import legal_position
    from .strategy import (
        _white_move_ok,
        cascade,
        move_cond,
        no_move,
    )

    if start.wr is None or not start.white_to_move or not legal_position(start, spec):
        return False
    for name in lemma.pre:
        if not lm.PREDICATES[name](start, spec):
            return False
    cur = start
    for i, (kind, q, r) in enumerate(steps):
        allowed = lemma.steps[i]
        if kind not in cascade(spec) or (allowed is not None and kind not in allowed):
            return False
        if cur.wr is None:
            return False
        if q.bk != cur.bk or not legal_position(q, spec) or q.white_to_move:
            return False
        king_moved = q.wk != cur.wk
        rook_moved = q.wr != cur.wr
        if king_moved == rook_moved:
            return False
        piece = "K" if king_moved else "R"
        target = q.wk if king_moved else q.wr
        if not _white_move_ok(cur, piece, target, spec):
            return False
        if not move_cond(kind, cur, q, spec):
            return False
        for earlier in cascade(spec):
            if earlier == kind:
                break
            if not no_move(earlier, cur, spec):
                return False
        if r is not None:
            from .model import legal_successors

            if r not in legal_successors(q, spec):
                return False
            cur = r
    ok, _ = lm._post_eval(lemma.post, start, steps, spec)
    return not ok


# --- external solver ----------------------------------------------------------------


@dataclass
class SolverResult:
    status: str  # unsat | sat | unknown | unavailable | error
    model: Optional[dict] = None
    detail: str = ""


def run_solver(path: str, solver_command: Optional[str]) -> SolverResult:
    """Run an external SMT solver on an emitted file.

    The artifact never bundles a solver; with none configured the result is
    `unavailable`, which the verification suite treats as a skip.
    """
    if not solver_command:
        return SolverResult("unavailable", detail="no solver configured")
    cmd = shlex.split(solver_command) + [path]
    try:
        out = subprocess.run(cmd, capture_output=True, text=True, timeout=3600)
    except FileNotFoundError:
        return SolverResult("unavailable", detail=f"{cmd[0]} not found")
    except subprocess.TimeoutExpired:
        return SolverResult("unknown", detail="solver timeout")
    tokens = out.stdout.split()
    status = next((t for t in tokens if t in ("sat", "unsat", "unknown")), None)
    if status is None:
        return SolverResult("error", detail=(out.stdout + out.stderr)[:500])
    if status != "sat":
        return SolverResult(status)
    model = _solve_model(path, cmd)
    return SolverResult("sat", model=model)


def _solve_model(path: str, cmd: list[str]) -> Optional[dict]:
    with open(path) as fh:
        script = fh.read()
    script += "(get-model)\n"
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
        fh.write(script)
        tmp = fh.name
    out = subprocess.run(cmd[:-1] + [tmp], capture_output=True, text=True, timeout=3600)
    model = {}
    for m in re.finditer(
        r"\(define-fun\s+(\S+)\s*\(\)\s*(Int|Bool)\s+(\(- \d+\)|\d+|true|false)\s*\)",
        out.stdout,
    ):
        name, sort, val = m.groups()
        if sort == "Bool":
            model[name] = val == "true"
        else:
            model[name] = -int(val[3:-1]) if val.startswith("(") else int(val)
    return model or None
