import random

import pytest
from fastapi.testclient import TestClient

from krk import engine
from krk.model import generalized, unpack
from krk.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_analyze_mate_in_one(client):
    payload = {"n": 8, "wk": [2, 0], "bk": [0, 0], "wr": [5, 5], "whiteToMove": True}
    body = client.post("/analyze", json=payload).json()
    assert body["legal"]
    assert body["classification"] == "ImmediateMate"
    assert body["strategyMove"]["to"]["wr"] == [0, 5]
    assert body["annotations"]["room"] == 10


def test_analyze_annotations_match_geometry(client):
    from krk import geometry as geo
    from krk.model import pos

    payload = {"n": 8, "wk": [0, 0], "bk": [2, 6], "wr": [5, 4], "whiteToMove": True}
    body = client.post("/analyze", json=payload).json()
    p = pos((0, 0), (2, 6), (5, 4), True)
    spec = generalized(8)
    ann = body["annotations"]
    assert ann["room"] == geo.room(p, spec)
    assert tuple(ann["criticalSquare"]) == tuple(geo.critical_square(p))
    assert ann["wrExposed"] == geo.wr_exposed(p)
    assert ann["wrDivides"] == geo.wr_divides(p)


def test_analyze_is_stateless(client):
    payload = {"n": 8, "wk": [3, 3], "bk": [6, 6], "wr": [1, 5], "whiteToMove": True}
    first = client.post("/analyze", json=payload)
    second = client.post("/analyze", json=payload)
    assert first.content == second.content


def test_malformed_is_400(client):
    assert client.post("/analyze", json={"n": 8, "wk": [2, 0]}).status_code == 400
    assert client.post("/analyze", json={"n": 3, "wk": [0, 0], "bk": [2, 2]}).status_code == 400


def test_play_roundtrip_and_errors(client):
    position = {"n": 8, "wk": [4, 4], "bk": [0, 0], "wr": [6, 6], "whiteToMove": False}
    ok = client.post("/play", json={"position": position, "move": {"to": [0, 1]}})
    assert ok.status_code == 200
    body = ok.json()
    assert body["kind"] in {
        "ImmediateMate", "ReadyToMate", "Squeeze", "ApproachDiag", "ApproachNonDiag",
        "KeepRoomDiag", "KeepRoomNonDiag", "RookHome", "RookSafe", "RookSafeSmallBoards",
    }
    assert body["newPosition"]["whiteToMove"] is False

    bad = client.post("/play", json={"position": position, "move": {"to": [4, 4]}})
    assert bad.status_code == 400

    capture = {"n": 8, "wk": [4, 4], "bk": [0, 0], "wr": [1, 1], "whiteToMove": False}
    resp = client.post("/play", json={"position": capture, "move": {"to": [1, 1]}})
    assert resp.status_code == 422  # rook gone: strategy undefined


def test_full_game_reaches_checkmate_within_65_plies(client):
    rng = random.Random(99)
    spec = generalized(8)
    packed = engine.legal_packed(spec, white_to_move=False, rook_present=True)
    games = 0
    while games < 5:
        start = unpack(int(packed[rng.randrange(len(packed))]), spec)
        position = {
            "n": 8, "wk": list(start.wk), "bk": list(start.bk),
            "wr": list(start.wr), "whiteToMove": False,
        }
        plies = 0
        status = "ongoing"
        while status == "ongoing" and plies <= 70:
            ann = client.post("/analyze", json=position).json()
            moves = ann["legalBlackMoves"]
            if not moves:
                break  # rare: start already mate/stalemate for black
            move = rng.choice(moves)
            resp = client.post("/play", json={"position": position, "move": {"to": move}})
            if resp.status_code == 422:
                break  # black could capture a hanging rook in an arbitrary start
            assert resp.status_code == 200
            body = resp.json()
            assert body["newPosition"]["wr"] is not None  # Lemma 1 as API guarantee
            position = body["newPosition"]
            status = body["gameStatus"]
            plies += 2
        if status == "checkmate":
            assert plies <= 66
            games += 1


def test_classify_endpoint(client):
    body = client.get("/classify", params={"n": 4}).json()
    assert sum(body["histogram"].values()) == 1312
    assert client.get("/classify", params={"n": 40}).status_code == 400
