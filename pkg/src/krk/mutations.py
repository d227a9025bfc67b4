"""Test-support switches that knock out single strategy clauses.

The verification suite proves its own teeth by checking that deleting the
exposure clause from Squeeze or the stalemate clause from RookHome makes a
lemma or the retrograde verdict fail.  Production code never activates
these.
"""

from __future__ import annotations

from contextlib import contextmanager

ACTIVE: frozenset = frozenset()

SQUEEZE_DROP_EXPOSURE = "squeeze_drop_exposure"
ROOK_HOME_DROP_STALEMATE = "rook_home_drop_stalemate"


def active(name: str) -> bool:
    return name in ACTIVE


@contextmanager
def enabled(*names: str):
    global ACTIVE
    before = ACTIVE
    ACTIVE = ACTIVE | frozenset(names)
    try:
        yield
    finally:
        ACTIVE = before
