"""Reflection group of the square board, canonical forms and orbits.

The three generating reflections are horizontal (x -> n-1-x), vertical
(y -> n-1-y) and diagonal (swap x and y); together they generate the
8-element symmetry group of the square.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from .model import BoardSpec, KRKPosition, Square, pack, well_formed


class Reflection(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    DIAGONAL = "diagonal"


def reflect_square(sq: Square, axis: Reflection, spec: BoardSpec) -> Square:
    if axis == Reflection.HORIZONTAL:
        return Square(spec.n - 1 - sq.x, sq.y)
    if axis == Reflection.VERTICAL:
        return Square(sq.x, spec.n - 1 - sq.y)
    return Square(sq.y, sq.x)


def reflect(p: KRKPosition, axis: Reflection, spec: BoardSpec) -> KRKPosition:
    wr = None if p.wr is None else reflect_square(p.wr, axis, spec)
    return KRKPosition(
        reflect_square(p.wk, axis, spec),
        reflect_square(p.bk, axis, spec),
        wr,
        p.white_to_move,
    )


def _transform_square(sq: Square, swap: bool, fx: bool, fy: bool, n: int) -> Square:
    x, y = (sq.y, sq.x) if swap else (sq.x, sq.y)
    if fx:
        x = n - 1 - x
    if fy:
        y = n - 1 - y
    return Square(x, y)


def _transform(p: KRKPosition, swap: bool, fx: bool, fy: bool, n: int) -> KRKPosition:
    wr = None if p.wr is None else _transform_square(p.wr, swap, fx, fy, n)
    return KRKPosition(
        _transform_square(p.wk, swap, fx, fy, n),
        _transform_square(p.bk, swap, fx, fy, n),
        wr,
        p.white_to_move,
    )


# (swap, flip_x, flip_y) triples enumerate the full group of the square
GROUP = [
    (swap, fx, fy) for swap in (False, True) for fx in (False, True) for fy in (False, True)
]


def orbit(p: KRKPosition, spec: BoardSpec) -> set[KRKPosition]:
    """The distinct images of p under the reflection group (at most 8)."""
    return {_transform(p, *g, spec.n) for g in GROUP}


def _lex_le(a: tuple, b: tuple) -> bool:
    return a <= b


def is_canonical(p: KRKPosition, spec: BoardSpec) -> bool:
    """Canonical-form test via the three lexicographic conditions.

    The black king is confined to the lower-left triangle; the other pieces
    only break ties on odd boards.  With the rook captured the third triple
    components are ignored.
    """
    if not well_formed(p, spec):
        raise ValueError("is_canonical requires a well-formed position")
    n = spec.n
    wk, bk, wr = p.wk, p.bk, p.wr
    if wr is None:
        xs = (2 * bk.x + 1, 2 * wk.x + 1)
        ys = (2 * bk.y + 1, 2 * wk.y + 1)
        bound = (n, n)
        dx = (bk.x, wk.x)
        dy = (bk.y, wk.y)
    else:
        xs = (2 * bk.x + 1, 2 * wk.x + 1, 2 * wr.x + 1)
        ys = (2 * bk.y + 1, 2 * wk.y + 1, 2 * wr.y + 1)
        bound = (n, n, n)
        dx = (bk.x, wk.x, wr.x)
        dy = (bk.y, wk.y, wr.y)
    return _lex_le(xs, bound) and _lex_le(ys, bound) and _lex_le(dx, dy)


def canonize(p: KRKPosition, spec: BoardSpec) -> KRKPosition:
    """Minimal-pack canonical image of p under the reflection group."""
    best: Optional[KRKPosition] = None
    best_key = None
    for g in GROUP:
        q = _transform(p, *g, spec.n)
        if not is_canonical(q, spec):
            continue
        key = pack(q, spec)
        if best_key is None or key < best_key:
            best, best_key = q, key
    assert best is not None, "every orbit contains a canonical position"
    return best
