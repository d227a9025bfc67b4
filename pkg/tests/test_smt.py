import random

import pytest

from krk.model import generalized, unpack, legal_successors
from krk.lemmas import builtin_lemmas
from krk import engine
from krk.smt import (
    Evaluator,
    LiaFormula,
    concrete_violates,
    encode_lemma_lia,
    emit_smtlib,
    linearity_violations,
    run_solver,
    to_smtlib,
    trace_environment,
)

SPEC8 = generalized(8)


@pytest.fixture(scope="module")
def lemmas():
    return builtin_lemmas(SPEC8)


def _parse_sexprs(text: str):
    """Minimal SMT-LIB reader: tokenize and balance every command."""
    forms, stack, cur = [], [], []
    token = ""
    for line in text.splitlines():
        if line.startswith(";"):
            continue
        for ch in line + " ":
            if ch == "(":
                stack.append(cur)
                cur = []
            elif ch == ")":
                if token:
                    cur.append(token)
                    token = ""
                done = cur
                cur = stack.pop()
                cur.append(done)
            elif ch.isspace():
                if token:
                    cur.append(token)
                    token = ""
            else:
                token += ch
    assert not stack, "unbalanced parentheses"
    return cur


def test_all_lemmas_emit_wellformed_scripts(tmp_path, lemmas):
    for lemma in lemmas:
        f = encode_lemma_lia(lemma)
        text = to_smtlib(f)
        forms = _parse_sexprs(text)
        heads = [frm[0] for frm in forms]
        assert heads[0] == "set-logic" and forms[0][1] == "QF_LIA"
        assert heads[-1] == "check-sat"
        assert heads.count("assert") == len(f.assertions)
        assert not linearity_violations(f)
        path = tmp_path / f"{lemma.name}.smt2"
        emit_smtlib(f, str(path))
        emit_smtlib(f, str(path))  # re-emit is byte-identical
        assert path.read_text() == text


def test_board_size_constraint_present(lemmas):
    l2 = next(l for l in lemmas if l.name == "immediate_mate_mates")
    assert "(assert (>= n 4))" in to_smtlib(encode_lemma_lia(l2))


def test_symbol_count_scales_with_trace_length(lemmas):
    by_name = {l.name: l for l in lemmas}
    f1 = encode_lemma_lia(by_name["immediate_mate_mates"])
    f3 = encode_lemma_lia(by_name["basic_progress_measure"])
    assert len(f1.int_consts) < len(f3.int_consts)
    # one position (6 ints) + one move target position + helpers + n
    assert len(f1.int_consts) == 1 + 6 + 6 + 4


def test_no_literal_constants_beyond_strategy_smalls(lemmas):
    big = set()

    def walk(t):
        if isinstance(t, int):
            if abs(t) > 5:
                big.add(t)
        elif isinstance(t, tuple):
            for a in t[1 if t[0] != "call" else 2:]:
                walk(a)

    for lemma in lemmas:
        f = encode_lemma_lia(lemma)
        for a in f.assertions:
            walk(a)
        for _, _, _, body in f.defines:
            walk(body)
    assert not big, f"large literals leak board size: {big}"


def _genuine_trace(lemma, rng, packed):
    from krk.strategy import strategy_successors

    start = unpack(int(packed[rng.randrange(len(packed))]), SPEC8)
    steps = []
    cur = start
    for i in range(lemma.k):
        last = i == lemma.k - 1
        try:
            succ = strategy_successors(cur, SPEC8)
        except Exception:
            return None
        if not succ:
            return None
        mv = rng.choice(succ)
        r = None
        if not (last and lemma.ends_with == "white"):
            reps = legal_successors(mv.to, SPEC8)
            if not reps:
                return None
            r = rng.choice(reps)
            if r.wr is None and not last:
                return None
        steps.append((mv.kind, mv.to, r))
        if r is not None:
            cur = r
    return start, steps


def _garbage_trace(lemma, rng):
    from krk.model import KRKPosition, Square
    from krk.strategy import MoveKind

    def rpos(wtm):
        return KRKPosition(
            Square(rng.randrange(8), rng.randrange(8)),
            Square(rng.randrange(8), rng.randrange(8)),
            Square(rng.randrange(8), rng.randrange(8)),
            wtm,
        )

    start = rpos(True)
    steps = []
    for i in range(lemma.k):
        last = i == lemma.k - 1
        r = None if (last and lemma.ends_with == "white") else rpos(True)
        steps.append((rng.choice(list(MoveKind)[:9]), rpos(False), r))
    return start, steps


def test_ground_cross_validation_sampled(lemmas):
    rng = random.Random(20240809)
    packed = engine.legal_packed(SPEC8, white_to_move=True, rook_present=True)
    for lemma in lemmas:
        f = encode_lemma_lia(lemma)
        ev = Evaluator(f)
        done = 0
        while done < 25:
            t = _genuine_trace(lemma, rng, packed) if done % 2 else _garbage_trace(lemma, rng)
            if t is None:
                continue
            start, steps = t
            env = trace_environment(f, lemma, 8, start, steps)
            assert ev.satisfied(env) == concrete_violates(lemma, SPEC8, start, steps)
            done += 1


def test_inverted_post_is_satisfiable_at_n8(lemmas):
    # flipping L2's post means a genuine mating trace satisfies the formula
    l2 = next(l for l in lemmas if l.name == "immediate_mate_mates")
    f = encode_lemma_lia(l2)
    neg = LiaFormula(name="inverted", int_consts=f.int_consts,
                     bool_consts=f.bool_consts, defines=f.defines,
                     assertions=f.assertions[:-1] + [("call", "ismate",
                         *[f"q0_{c}" for c in ("wkx", "wky", "wrx", "wry", "bkx", "bky")],
                         "n")])
    ev = Evaluator(neg)
    rng = random.Random(3)
    packed = engine.legal_packed(SPEC8, white_to_move=True, rook_present=True)
    hit = False
    for _ in range(4000):
        t = _genuine_trace(l2, rng, packed)
        if t is None:
            continue
        env = trace_environment(neg, l2, 8, *t)
        if ev.satisfied(env):
            hit = True
            break
    assert hit, "no model found for the inverted lemma"


def test_run_solver_unavailable():
    assert run_solver("/nonexistent.smt2", None).status == "unavailable"
    assert run_solver("/nonexistent.smt2", "definitely-not-a-solver-binary").status == "unavailable"
