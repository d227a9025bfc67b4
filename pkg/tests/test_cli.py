import json

import pytest

from krk.cli import main, _parse_square, _square_name
from krk.model import Square


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_count(capsys):
    code, out = run(capsys, "count", "--n", "4", "--side", "w")
    assert code == 0 and out.strip() == "1312"
    code, out = run(capsys, "count", "--n", "4", "--json")
    assert json.loads(out)["count"] == 3496


def test_classify_json(capsys):
    code, out = run(capsys, "classify", "--n", "4", "--json")
    body = json.loads(out)
    assert code == 0
    assert body["total"] == 1312
    assert body["histogram"]["RookSafeSmallBoards"] == 20


def test_retrograde(capsys, tmp_path):
    dump = tmp_path / "t.dtm"
    code, out = run(capsys, "retrograde", "--n", "4", "--json", "--dump", str(dump))
    body = json.loads(out)
    assert code == 0 and body["all_winning"] and body["total_positions"] == 1312
    assert dump.read_bytes()[:4] == b"KRKD"


def test_lemma_single(capsys):
    code, out = run(capsys, "lemma", "--n", "4", "--name", "immediate_mate_mates", "--json")
    assert code == 0
    assert json.loads(out)["holds"] is True


def test_lemma_unknown_name(capsys):
    assert main(["lemma", "--n", "4", "--name", "nope"]) == 1


def test_equiv_and_refine(capsys):
    assert run(capsys, "equiv", "--n", "4")[0] == 0
    assert run(capsys, "refine", "--n", "4", "--json")[0] == 0


def test_export_smt(capsys, tmp_path):
    code, out = run(capsys, "export-smt", "--out", str(tmp_path), "--json")
    body = json.loads(out)
    assert code == 0
    assert len(body["lemmas"]) == 12
    assert all(e["linear"] for e in body["lemmas"])
    assert (tmp_path / "immediate_mate_mates.smt2").exists()


def test_square_parsing():
    assert _parse_square("c2", 8) == Square(2, 1)
    assert _square_name(Square(2, 1)) == "c2"
    with pytest.raises(ValueError):
        _parse_square("j1", 8)
    with pytest.raises(ValueError):
        _parse_square("11", 8)
