"""HTTP JSON service: position analysis and play-against-the-strategy.

Stateless by design; every handler recomputes from the request position, so
identical requests yield identical responses.  The web UI and the terminal
client are both thin consumers of these endpoints.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import engine
from . import geometry as geo
from .model import (
    BoardSpec,
    KRKPosition,
    Square,
    Variant,
    legal_position,
    legal_successors,
    checkmate,
    stalemate,
)
from .strategy import StrategyUndefinedError, classify, strategy_function


class PositionModel(BaseModel):
    n: int = Field(ge=4, le=64)
    wk: tuple[int, int]
    bk: tuple[int, int]
    wr: Optional[tuple[int, int]] = None
    whiteToMove: bool = True
    variant: str = "generalized"

    def to_domain(self) -> tuple[KRKPosition, BoardSpec]:
        try:
            spec = BoardSpec(self.n, Variant(self.variant))
        except ValueError as e:
            raise HTTPException(400, {"error": "bad-board", "reason": str(e)})
        wr = None if self.wr is None else Square(*self.wr)
        return KRKPosition(Square(*self.wk), Square(*self.bk), wr, self.whiteToMove), spec

    @classmethod
    def from_domain(cls, p: KRKPosition, spec: BoardSpec) -> "PositionModel":
        return cls(
            n=spec.n,
            wk=tuple(p.wk),
            bk=tuple(p.bk),
            wr=None if p.wr is None else tuple(p.wr),
            whiteToMove=p.white_to_move,
            variant=spec.variant.value,
        )


class Annotations(BaseModel):
    room: Optional[int] = None
    unconfined: Optional[bool] = None
    criticalSquare: Optional[tuple[int, int]] = None
    wrExposed: Optional[bool] = None
    wrDivides: Optional[bool] = None
    lPattern: Optional[bool] = None
    kingsSameEdge: bool = False


class AnalyzeReport(BaseModel):
    position: PositionModel
    legal: bool
    annotations: Annotations
    classification: str = "none"
    strategyMove: Optional[dict] = None
    legalBlackMoves: list[tuple[int, int]] = []
    status: str = "ongoing"


class MoveModel(BaseModel):
    to: tuple[int, int]  # black king destination


class PlayRequest(BaseModel):
    position: PositionModel
    move: MoveModel


class PlayResponse(BaseModel):
    newPosition: PositionModel
    strategyReply: Optional[dict] = None
    kind: Optional[str] = None
    gameStatus: str


def _annotate(p: KRKPosition, spec: BoardSpec) -> Annotations:
    out = Annotations(kingsSameEdge=geo.kings_same_edge(p, spec))
    if p.wr is not None:
        out.room = geo.room(p, spec)
        out.unconfined = out.room == geo.unconfined_room(spec)
        out.criticalSquare = tuple(geo.critical_square(p))
        out.wrExposed = geo.wr_exposed(p)
        out.wrDivides = geo.wr_divides(p)
        out.lPattern = geo.l_pattern(p)
    return out


def _status(p: KRKPosition, spec: BoardSpec) -> str:
    if checkmate(p, spec):
        return "checkmate"
    if stalemate(p, spec):
        return "stalemate"
    return "ongoing"


@lru_cache(maxsize=8)
def _histogram(n: int, variant: str) -> dict:
    return engine.classify_histogram(BoardSpec(n, Variant(variant)))


def create_app() -> FastAPI:
    app = FastAPI(title="krk-strategy", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "malformed-request", "reason": str(exc.errors()[:3])},
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/analyze", response_model=AnalyzeReport)
    def analyze(position: PositionModel):
        p, spec = position.to_domain()
        legal = legal_position(p, spec)
        report = AnalyzeReport(
            position=position,
            legal=legal,
            annotations=_annotate(p, spec) if legal else Annotations(),
        )
        if not legal:
            return report
        report.status = _status(p, spec)
        if not p.white_to_move:
            report.legalBlackMoves = [tuple(s.bk) for s in legal_successors(p, spec)]
            return report
        if p.wr is None:
            return report
        try:
            report.classification = classify(p, spec).value
        except StrategyUndefinedError:
            report.classification = "none"
            return report
        mv = strategy_function(p, spec)
        if mv is not None:
            report.strategyMove = {
                "to": PositionModel.from_domain(mv.to, spec).model_dump(),
                "kind": mv.kind.value,
            }
        return report

    @app.post("/play", response_model=PlayResponse)
    def play(req: PlayRequest):
        p, spec = req.position.to_domain()
        if p.white_to_move:
            raise HTTPException(
                400, {"error": "not-black-to-move", "reason": "play expects black on turn"}
            )
        if not legal_position(p, spec):
            raise HTTPException(400, {"error": "illegal-position"})
        target = Square(*req.move.to)
        chosen = None
        for s in legal_successors(p, spec):
            if s.bk == target:
                chosen = s
                break
        if chosen is None:
            raise HTTPException(
                400, {"error": "illegal-move", "reason": f"black king to {tuple(target)}"}
            )
        if chosen.wr is None:
            raise HTTPException(
                422,
                {"error": "strategy-undefined", "reason": "rook captured; KRK play over"},
            )
        mv = strategy_function(chosen, spec)
        if mv is None:
            raise HTTPException(422, {"error": "strategy-undefined"})
        status = _status(mv.to, spec)
        assert status != "stalemate", "the strategy never stalemates"
        return PlayResponse(
            newPosition=PositionModel.from_domain(mv.to, spec),
            strategyReply={"wk": tuple(mv.to.wk), "wr": tuple(mv.to.wr)},
            kind=mv.kind.value,
            gameStatus=status,
        )

    @app.get("/classify")
    def classify_endpoint(n: int, variant: str = "generalized"):
        try:
            BoardSpec(n, Variant(variant))
        except ValueError as e:
            raise HTTPException(400, {"error": "bad-board", "reason": str(e)})
        if n > 10:
            raise HTTPException(400, {"error": "board-too-large-for-service"})
        return {"n": n, "variant": variant, "histogram": _histogram(n, variant)}

    return app


app = create_app()
