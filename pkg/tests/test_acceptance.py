"""Acceptance gate: the verification claims this package stands on.

Each test prints one PASS/FAIL line per criterion.  Expected-failure
markers carry a pointer to the analysis of the one known-red item (Lemma 6
at room = 3, whose published form is inconsistent with the published
classification counts; see the decisions ledger outside the package).

Run with: pytest tests/test_acceptance.py -v -s
"""

import json
import os
import random

import numpy as np
import pytest

from krk import engine, mutations
from krk.model import classic8, generalized, pos, pack_str
from krk.lemmas import (
    builtin_lemmas,
    check_candidate_equivalence,
    check_equivalence,
    check_lemma,
    check_refinement,
    clear_caches,
)
from krk.retrograde import retrograde_verify

PAPER_HISTOGRAM = {
    "ImmediateMate": 1512,
    "ReadyToMate": 4676,
    "Squeeze": 116504,
    "ApproachDiag": 12160,      # the paper's count list swaps the diag labels;
    "ApproachNonDiag": 4020,    # see the decisions ledger
    "KeepRoomDiag": 3160,
    "KeepRoomNonDiag": 184,
    "RookHome": 32520,
    "RookSafe": 432,
}

PAPER_COUNTS = {4: 1312, 8: 175168, 12: 2360160, 16: 14241920}
PAPER_MAX_PLIES = {4: 21, 8: 65, 12: 109, 16: 153}

RUN_BIG = os.environ.get("KRK_ACCEPT_BIG", "1") != "0"


def _line(name: str, ok: bool, detail: str = "") -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}{': ' + detail if detail else ''}")
    return ok


def test_position_counts():
    ok = True
    ok &= _line("count n=8 both sides = 399112",
                engine.count_legal(generalized(8)) == 399112)
    ok &= _line("count n=8 white to move = 175168",
                engine.count_legal(generalized(8), white_to_move=True) == 175168)
    ok &= _line("count n=4 white to move = 1312",
                engine.count_legal(generalized(4), white_to_move=True) == 1312)
    if RUN_BIG:
        ok &= _line("count n=12 white to move = 2360160",
                    engine.count_legal(generalized(12), white_to_move=True) == 2360160)
        ok &= _line("count n=16 white to move = 14241920",
                    engine.count_legal(generalized(16), white_to_move=True) == 14241920)
    assert ok


def test_move_kind_histogram_classic8():
    hist = engine.classify_histogram(classic8())
    ok = hist == PAPER_HISTOGRAM and sum(hist.values()) == 175168
    _line("classic8 n=8 histogram, all nine counts exact", ok, json.dumps(hist))
    assert ok


@pytest.mark.parametrize("n", [4, 8] + ([12, 16] if RUN_BIG else []))
def test_retrograde_all_winning(n):
    result = retrograde_verify(generalized(n))
    ok = result.all_winning and result.closure_ok
    ok &= result.total_positions == PAPER_COUNTS[n]
    expected = PAPER_MAX_PLIES[n]
    within = abs(result.max_plies - expected) <= 0.1 * expected
    _line(
        f"retrograde n={n}: all_winning exact, max_plies {result.max_plies} "
        f"within 10% of {expected}",
        ok and within,
        f"elapsed={result.elapsed_ms}ms",
    )
    assert ok and within


def test_lemmas_shallow_n8_relation_symmetry():
    spec = generalized(8)
    names = (
        "rook_never_capturable",
        "immediate_mate_mates",
        "ready_to_mate_mates_next",
        "basic_keeps_basic_or_mate",
    )
    lemmas = {l.name: l for l in builtin_lemmas(spec)}
    ok = True
    for name in names:
        report = check_lemma(lemmas[name], spec, use_symmetry=True, mode="relation")
        ok &= _line(f"lemma {name} on n=8 (relation, wlog)", report.holds,
                    f"scanned={report.scanned}")
    assert ok


DEEP_GREEN = (
    "retreats_only_first_three",
    "basic_progress_measure",
    "rook_safe_only_first",
    "rook_home_needs_retreat_before",
    "no_third_rook_home",
    "two_rook_homes_establish_divide",
    "invariant_preserved",
)


@pytest.mark.parametrize("n,mode", [(4, "relation"), (5, "relation"), (6, "relation"),
                                    (8, "function")])
def test_lemmas_deep_and_refined(n, mode):
    spec = generalized(n)
    lemmas = {l.name: l for l in builtin_lemmas(spec)}
    ok = True
    for name in DEEP_GREEN:
        report = check_lemma(lemmas[name], spec, use_symmetry=True, mode=mode)
        ok &= _line(f"lemma {name} on n={n} ({mode})", report.holds)
    assert ok


@pytest.mark.parametrize("n,mode", [(4, "relation"), (5, "relation"), (6, "relation"),
                                    (8, "function")])
def test_lemma_six_small_room(n, mode):
    """Lemma 6 exactly as published (room <= 3).

    Known red for n >= 5: the published counts and the published Lemma 6
    come from different strategy revisions; no side-condition reading can
    satisfy both (decisions ledger, 'Honest-red: Lemma 6 at room = 3').
    Verified green in the weaker room <= 2 form by test_lemma_six_shut_cage.
    """
    spec = generalized(n)
    lemma = next(l for l in builtin_lemmas(spec) if l.name == "small_room_forces_mate")
    report = check_lemma(lemma, spec, use_symmetry=True, mode=mode)
    _line(f"lemma small_room_forces_mate on n={n} ({mode})", report.holds,
          f"counterexamples={len(report.counterexamples)}")
    if n >= 5:
        if report.holds:
            pytest.fail("Lemma 6 unexpectedly holds at n>=5; ledger entry is stale")
        pytest.xfail("room=3 wandering-king starts; see decisions ledger")
    assert report.holds


def test_lemma_six_shut_cage():
    # the same statement from a fully shut cage (room <= 2) holds everywhere
    import krk.lemmas as lm
    from krk.lemmas import LemmaSpec
    from krk.strategy import BASIC_MOVES
    from krk import geometry as geo

    lm.PREDICATES.setdefault(
        "room_le_2", lambda p, spec: p.wr is not None and geo.room(p, spec) <= 2
    )
    basics = frozenset(BASIC_MOVES)
    lemma = LemmaSpec("l6_shut_cage", 4, ("room_le_2",), (basics,) * 3 + (None,),
                      "white", "last_is_mating", checker="scan")
    ok = True
    for n, mode in ((4, "relation"), (5, "relation"), (6, "relation"), (8, "function")):
        report = check_lemma(lemma, generalized(n), use_symmetry=True, mode=mode)
        ok &= _line(f"lemma six (room<=2 form) on n={n} ({mode})", report.holds)
    assert ok


def test_equivalences_exact():
    ok = True
    for n in range(4, 9):
        spec = generalized(n)
        mate = check_equivalence("checkmate", "mate_opt", spec)
        stale = check_equivalence("stalemate", "stalemate_opt", spec)
        cand = check_candidate_equivalence(spec)
        ok &= _line(f"mate_opt == checkmate on n={n} ({mate['scanned']} positions)",
                    mate["holds"])
        ok &= _line(f"stalemate_opt == stalemate on n={n}", stale["holds"])
        ok &= _line(f"candidate no_move == naive no_move on n={n}", cand["holds"])
    assert ok


def test_refinement_function_vs_relation():
    ok = True
    for n in range(4, 11):
        report = check_refinement(generalized(n))
        ok &= _line(f"strategy_function refines strategy_relation on n={n}",
                    report["holds"], f"{report['scanned']} positions")
    assert ok


def test_packed_encoding():
    ok = _line(
        "paper's 20-bit example reproduces bit-exactly",
        pack_str(pos((3, 2), (2, 6), (5, 4), True), generalized(8))
        == "01101010110001011010",
    )
    rng = np.random.default_rng(2024)
    for n in (4, 8, 16, 33):
        spec = generalized(n)
        oversample = 1_300_000  # piece collisions get rejected below
        cols = {f: rng.integers(0, n, size=oversample).astype(np.int16)
                for f in ("wkx", "wky", "wrx", "wry", "bkx", "bky")}
        clash = (
            ((cols["wkx"] == cols["bkx"]) & (cols["wky"] == cols["bky"]))
            | ((cols["wkx"] == cols["wrx"]) & (cols["wky"] == cols["wry"]))
            | ((cols["bkx"] == cols["wrx"]) & (cols["bky"] == cols["wry"]))
        )
        keep = np.flatnonzero(~clash)[:1_000_000]
        size = len(keep)
        assert size == 1_000_000, f"undersampled at n={n}"
        cols = {f: v[keep] for f, v in cols.items()}
        p = engine.Pos(cols["wkx"], cols["wky"], cols["wrx"], cols["wry"],
                       cols["bkx"], cols["bky"])
        wtm = rng.integers(0, 2, size=size).astype(bool)
        cap = np.zeros(size, dtype=bool)
        packed = engine.pack_coords(p, wtm, cap, spec)
        q, wtm2, cap2 = engine.unpack_coords(packed, spec)
        same = (
            (q.wkx == p.wkx) & (q.wky == p.wky) & (q.wrx == p.wrx)
            & (q.wry == p.wry) & (q.bkx == p.bkx) & (q.bky == p.bky)
            & (wtm2 == wtm) & (cap2 == cap)
        )
        ok &= _line(f"pack/unpack roundtrip on {size} random positions, n={n}",
                    bool(same.all()))
    assert ok


def test_symmetry_wlog_and_invariance():
    wlog_ok = True
    for n in (4, 5):
        spec = generalized(n)
        for lemma in builtin_lemmas(spec):
            on = check_lemma(lemma, spec, use_symmetry=True, mode="relation")
            off = check_lemma(lemma, spec, use_symmetry=False, mode="relation")
            wlog_ok &= on.holds == off.holds
    ok = _line("wlog flag equality for every built-in lemma at n=4,5", wlog_ok)

    from krk import geometry as geo
    from krk.model import enumerate_legal, checkmate, stalemate
    from krk.symmetry import Reflection, reflect
    from krk.strategy import classify

    spec = generalized(4)
    sym_ok = True
    for p in enumerate_legal(spec, white_to_move=None):
        for axis in Reflection:
            q = reflect(p, axis, spec)
            sym_ok &= checkmate(q, spec) == checkmate(p, spec)
            sym_ok &= stalemate(q, spec) == stalemate(p, spec)
            if p.white_to_move and p.wr is not None:
                sym_ok &= geo.room(q, spec) == geo.room(p, spec)
                sym_ok &= geo.wr_exposed(q) == geo.wr_exposed(p)
                sym_ok &= geo.wr_divides(q) == geo.wr_divides(p)
                sym_ok &= geo.l_pattern(q) == geo.l_pattern(p)
                sym_ok &= geo.kings_same_edge(q, spec) == geo.kings_same_edge(p, spec)
                sym_ok &= classify(q, spec) == classify(p, spec)
    ok &= _line("reflection invariance, exhaustive at n=4", sym_ok)
    assert ok


def test_mutation_sensitivity():
    ok = True
    for mutation in (mutations.SQUEEZE_DROP_EXPOSURE, mutations.ROOK_HOME_DROP_STALEMATE):
        detected = None
        with mutations.enabled(mutation):
            clear_caches()
            for n in (4, 5):
                spec = generalized(n)
                r = retrograde_verify(spec)
                if not (r.all_winning and r.closure_ok):
                    detected = f"retrograde failure at n={n}"
                    break
                for lemma in builtin_lemmas(spec):
                    rep = check_lemma(lemma, spec, use_symmetry=True, mode="relation")
                    if not rep.holds:
                        detected = f"lemma {lemma.name} at n={n}"
                        break
                if detected:
                    break
        clear_caches()
        ok &= _line(f"mutation '{mutation}' detected", detected is not None,
                    detected or "nothing failed")
    assert ok


def test_smt_export_and_ground_cross_validation(tmp_path):
    from krk.smt import (
        Evaluator,
        concrete_violates,
        encode_lemma_lia,
        emit_smtlib,
        linearity_violations,
        run_solver,
        to_smtlib,
        trace_environment,
    )
    from tests.test_smt import _parse_sexprs, _genuine_trace, _garbage_trace

    spec = generalized(8)
    lemmas = builtin_lemmas(spec)
    ok = True
    solver = os.environ.get("KRK_SOLVER_CMD")
    for lemma in lemmas:
        f = encode_lemma_lia(lemma)
        text = to_smtlib(f)
        path = tmp_path / f"{lemma.name}.smt2"
        emit_smtlib(f, str(path))
        wellformed = bool(_parse_sexprs(text)) and not linearity_violations(f)
        ok &= _line(f"smt {lemma.name}: well-formed QF_LIA + linear", wellformed)
        if solver:
            res = run_solver(str(path), solver)
            ok &= _line(f"smt {lemma.name}: solver says {res.status}",
                        res.status == "unsat")
    if not solver:
        print("[SKIP] external solver: not configured (KRK_SOLVER_CMD unset), "
              "optional per the verification contract")

    # ground-instance agreement at n=8 over 100k random traces (whole suite)
    rng = random.Random(1)
    packed = engine.legal_packed(spec, white_to_move=True, rook_present=True)
    per_lemma = 100_000 // len(lemmas)
    genuine_share = 400
    total = agreements = 0
    for lemma in lemmas:
        f = encode_lemma_lia(lemma)
        ev = Evaluator(f)
        produced = 0
        while produced < per_lemma:
            if produced < genuine_share:
                t = _genuine_trace(lemma, rng, packed)
                if t is None:
                    continue
            else:
                t = _garbage_trace(lemma, rng)
            start, steps = t
            env = trace_environment(f, lemma, 8, start, steps)
            total += 1
            agreements += ev.satisfied(env) == concrete_violates(lemma, spec, start, steps)
            produced += 1
    ok &= _line(f"smt ground cross-validation: {agreements}/{total} traces agree",
                agreements == total)
    assert ok
