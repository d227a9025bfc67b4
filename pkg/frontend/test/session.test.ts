// Session logic against a mocked service: the UI never computes chess facts
// itself, so the mock pins the full wire contract.

import { beforeEach, describe, expect, it, vi } from "vitest";
import { KrkApi, Position, AnalyzeReport, PlayResponse } from "../src/api.js";
import { GameSession } from "../src/session.js";

const startPos: Position = {
  n: 8, wk: [4, 4], bk: [0, 0], wr: [6, 6], whiteToMove: false,
};

function report(position: Position, status = "ongoing"): AnalyzeReport {
  return {
    position,
    legal: true,
    annotations: {
      room: 12, unconfined: false, criticalSquare: [5, 5],
      wrExposed: false, wrDivides: true, lPattern: false, kingsSameEdge: false,
    },
    classification: "Squeeze",
    strategyMove: null,
    legalBlackMoves: [[0, 1], [1, 0]],
    status,
  };
}

function playResponse(to: Position, kind = "Squeeze", status = "ongoing"): PlayResponse {
  return { newPosition: to, strategyReply: { wk: to.wk, wr: to.wr! }, kind, gameStatus: status };
}

describe("GameSession", () => {
  let api: KrkApi;
  let fetchMock: ReturnType<typeof vi.fn>;

  beforeEach(() => {
    fetchMock = vi.fn();
    globalThis.fetch = fetchMock as unknown as typeof fetch;
    api = new KrkApi("http://test");
  });

  function queue(body: unknown, status = 200) {
    fetchMock.mockResolvedValueOnce({
      ok: status < 400,
      status,
      json: async () => body,
    });
  }

  it("starts from an analyzed position", async () => {
    queue(report(startPos));
    const session = new GameSession(api);
    const ply = await session.start(startPos);
    expect(ply.report.annotations.room).toBe(12);
    expect(session.plies).toBe(0);
  });

  it("plays a validated black move and stores white's reply", async () => {
    const after: Position = { ...startPos, bk: [0, 1], wr: [6, 1] };
    const session = new GameSession(api);
    queue(report(startPos));
    await session.start(startPos);
    queue(playResponse(after));
    queue(report(after));
    const ply = await session.playBlack([0, 1]);
    expect(ply.lastKind).toBe("Squeeze");
    expect(session.plies).toBe(2);
    // the play request carried the current position
    const playCall = JSON.parse(fetchMock.mock.calls[1][1].body);
    expect(playCall.position).toEqual(startPos);
    expect(playCall.move).toEqual({ to: [0, 1] });
  });

  it("surfaces service rejections untouched", async () => {
    const session = new GameSession(api);
    queue(report(startPos));
    await session.start(startPos);
    queue({ detail: { error: "illegal-move" } }, 400);
    await expect(session.playBlack([7, 7])).rejects.toThrow(/400/);
    expect(session.plies).toBe(0); // nothing got recorded
  });

  it("undo rewinds and a new move branches off", async () => {
    const session = new GameSession(api);
    const p1: Position = { ...startPos, bk: [0, 1], wr: [6, 1] };
    const p2a: Position = { ...startPos, bk: [1, 1], wr: [5, 1] };
    const p2b: Position = { ...startPos, bk: [0, 2], wr: [4, 1] };
    queue(report(startPos));
    await session.start(startPos);
    queue(playResponse(p1));
    queue(report(p1));
    await session.playBlack([0, 1]);
    queue(playResponse(p2a));
    queue(report(p2a));
    await session.playBlack([1, 1]);
    expect(session.history).toHaveLength(3);

    session.undo();
    expect(session.current.position).toEqual(p1);
    queue(playResponse(p2b));
    queue(report(p2b));
    await session.playBlack([0, 2]); // branch replaces the undone tail
    expect(session.history).toHaveLength(3);
    expect(session.current.position).toEqual(p2b);
  });

  it("refuses play after checkmate", async () => {
    const session = new GameSession(api);
    queue(report(startPos));
    await session.start(startPos);
    const mate: Position = { ...startPos, bk: [0, 0], wr: [0, 5] };
    queue(playResponse(mate, "ImmediateMate", "checkmate"));
    queue(report(mate, "checkmate"));
    await session.playBlack([0, 1]);
    expect(session.status).toBe("checkmate");
    await expect(session.playBlack([0, 1])).rejects.toThrow(/over/);
  });
});
