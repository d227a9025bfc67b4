"""Command-line front end: verification sweeps, SMT export, terminal play,
and the HTTP service.

Thin dispatch over the library; every verification subcommand exits nonzero
on failure (distinct code per subcommand) and emits JSON with --json.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import engine
from .model import BoardSpec, KRKPosition, Square, Variant, legal_successors
from .strategy import strategy_function
from .lemmas import (
    builtin_lemmas,
    check_candidate_equivalence,
    check_equivalence,
    check_lemma,
    check_refinement,
)
from .retrograde import retrograde_verify, write_depth_dump

EXIT_RETROGRADE = 2
EXIT_LEMMA = 3
EXIT_EQUIV = 4
EXIT_REFINE = 5
EXIT_SMT = 6


def _spec(args) -> BoardSpec:
    return BoardSpec(args.n, Variant(args.variant))


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload))
    else:
        print(human)


def cmd_count(args) -> int:
    spec = _spec(args)
    side = None if args.side == "both" else (args.side == "w")
    count = engine.count_legal(spec, white_to_move=side, rook_present=True)
    _emit(args, {"n": spec.n, "side": args.side, "count": count}, str(count))
    return 0


def cmd_classify(args) -> int:
    spec = _spec(args)
    hist = engine.classify_histogram(spec)
    total = sum(hist.values())
    if args.json:
        print(json.dumps({"n": spec.n, "variant": spec.variant.value,
                          "histogram": hist, "total": total}))
    else:
        for kind, cnt in hist.items():
            print(f"{kind:<22}{cnt:>10}")
        print(f"{'total':<22}{total:>10}")
    return 0 if "none" not in hist else EXIT_LEMMA


def cmd_retrograde(args) -> int:
    spec = _spec(args)
    result = retrograde_verify(spec, mode=args.mode)
    if args.dump:
        write_depth_dump(result, spec, args.dump)
    _emit(args, json.loads(result.to_json()),
          f"all_winning={result.all_winning} total={result.total_positions} "
          f"max_plies={result.max_plies} elapsed_ms={result.elapsed_ms}")
    return 0 if result.all_winning and result.closure_ok else EXIT_RETROGRADE


def cmd_lemma(args) -> int:
    spec = _spec(args)
    lemmas = builtin_lemmas(spec)
    if args.name:
        lemmas = [l for l in lemmas if l.name == args.name]
        if not lemmas:
            print(f"unknown lemma {args.name}", file=sys.stderr)
            return 1
    failed = False
    for lemma in lemmas:
        report = check_lemma(lemma, spec, use_symmetry=args.symmetry == "on",
                             mode=args.mode)
        failed |= not report.holds
        if args.json:
            print(report.to_json(spec))
        else:
            print(f"{lemma.name:<36} holds={report.holds} scanned={report.scanned} "
                  f"vacuous={report.vacuous} elapsed_ms={report.elapsed_ms}")
    return EXIT_LEMMA if failed else 0


def cmd_equiv(args) -> int:
    spec = _spec(args)
    reports = [
        check_equivalence("checkmate", "mate_opt", spec),
        check_equivalence("stalemate", "stalemate_opt", spec),
        check_candidate_equivalence(spec),
    ]
    ok = all(r["holds"] for r in reports)
    _emit(args, {"n": spec.n, "holds": ok, "reports": reports},
          "\n".join(f"{r.get('pred_a', 'candidates')} == {r.get('pred_b', 'naive')}: "
                    f"{r['holds']}" for r in reports))
    return 0 if ok else EXIT_EQUIV


def cmd_refine(args) -> int:
    spec = _spec(args)
    report = check_refinement(spec)
    _emit(args, report, f"function refines relation: {report['holds']} "
          f"({report['scanned']} positions)")
    return 0 if report["holds"] else EXIT_REFINE


def cmd_export_smt(args) -> int:
    from .smt import emit_smtlib, encode_lemma_lia, linearity_violations, run_solver

    os.makedirs(args.out, exist_ok=True)
    spec = BoardSpec(8, Variant.GENERALIZED)
    solver = args.solver or os.environ.get("KRK_SOLVER_CMD")
    overall = []
    for lemma in builtin_lemmas(spec):
        f = encode_lemma_lia(lemma)
        bad = linearity_violations(f)
        path = os.path.join(args.out, f"{lemma.name}.smt2")
        emit_smtlib(f, path)
        entry = {"name": lemma.name, "path": path, "linear": not bad}
        if solver:
            res = run_solver(path, solver)
            entry["solver"] = res.status
            if res.status == "sat":
                entry["model"] = res.model
        overall.append(entry)
    failed = any(not e["linear"] or e.get("solver") == "sat" for e in overall)
    if args.json:
        print(json.dumps({"lemmas": overall, "solver": solver or None}))
    else:
        for e in overall:
            print(f"{e['name']:<36} linear={e['linear']} "
                  f"solver={e.get('solver', 'not-run')} -> {e['path']}")
    return EXIT_SMT if failed else 0


def _parse_square(text: str, n: int) -> Square:
    text = text.strip().lower()
    if len(text) < 2 or not text[0].isalpha():
        raise ValueError(f"square {text!r}: use file letter + rank number, e.g. c2")
    x = ord(text[0]) - ord("a")
    y = int(text[1:]) - 1
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"square {text!r} is off the {n}x{n} board")
    return Square(x, y)


def _square_name(sq: Square) -> str:
    return f"{chr(ord('a') + sq.x)}{sq.y + 1}"


def _render(p: KRKPosition, n: int) -> str:
    rows = []
    for y in range(n - 1, -1, -1):
        row = [f"{y + 1:>2} "]
        for x in range(n):
            sq = Square(x, y)
            row.append("K " if sq == p.wk else
                       "k " if sq == p.bk else
                       "R " if sq == p.wr else ". ")
        rows.append("".join(row))
    rows.append("   " + " ".join(chr(ord("a") + x) for x in range(n)))
    return "\n".join(rows)


def cmd_play(args) -> int:
    import random

    spec = _spec(args)
    rng = random.Random(args.seed)
    packed = engine.legal_packed(spec, white_to_move=True, rook_present=True)
    from .model import unpack

    p = unpack(int(packed[rng.randrange(len(packed))]), spec)
    print(f"You are black on a {spec.n}x{spec.n} board. Enter moves like 'a1'.")
    mv = strategy_function(p, spec)
    print(f"White opens: {mv.kind.value}")
    p = mv.to
    plies = 1
    while True:
        print(_render(p, spec.n))
        replies = legal_successors(p, spec)
        if not replies:
            print("Checkmate." if p.wr is not None else "Draw?")
            return 0
        while True:
            try:
                text = input("your king to> ")
            except EOFError:
                return 0
            try:
                target = _parse_square(text, spec.n)
            except ValueError as e:
                print(e)
                continue
            chosen = next((s for s in replies if s.bk == target), None)
            if chosen is None:
                print(f"illegal: legal targets are "
                      f"{', '.join(_square_name(s.bk) for s in replies)}")
                continue
            break
        if chosen.wr is None:
            print("You captured the rook?! The strategy forbids that; bug.")
            return 1
        p = chosen
        mv = strategy_function(p, spec)
        plies += 2
        print(f"White: {mv.kind.value} "
              f"({'R' if mv.to.wr != p.wr else 'K'}"
              f"{_square_name(mv.to.wr if mv.to.wr != p.wr else mv.to.wk)})")
        p = mv.to
        from .model import checkmate

        if checkmate(p, spec):
            print(_render(p, spec.n))
            print(f"Checkmate in {plies} plies.")
            return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="krk", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, variant_default="generalized"):
        p.add_argument("--n", type=int, default=8)
        p.add_argument("--variant", choices=["classic8", "generalized"],
                       default=variant_default)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("count", help="count legal positions")
    common(p)
    p.add_argument("--side", choices=["w", "b", "both"], default="both")
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("classify", help="move-kind histogram")
    common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("retrograde", help="verify the strategy wins everywhere")
    common(p)
    p.add_argument("--mode", choices=["function", "relation"], default="function")
    p.add_argument("--dump", help="write the binary depth table here")
    p.set_defaults(fn=cmd_retrograde)

    p = sub.add_parser("lemma", help="check built-in lemmas")
    common(p)
    p.add_argument("--name")
    p.add_argument("--symmetry", choices=["on", "off"], default="on")
    p.add_argument("--mode", choices=["relation", "function"], default="relation")
    p.set_defaults(fn=cmd_lemma)

    p = sub.add_parser("equiv", help="pattern vs naive equivalences")
    common(p)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("refine", help="function refines the relation")
    common(p)
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("export-smt", help="emit SMT-LIB lemma encodings")
    p.add_argument("--out", required=True)
    p.add_argument("--solver", help="external solver command (or KRK_SOLVER_CMD)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_export_smt)

    p = sub.add_parser("play", help="play black against the strategy")
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
