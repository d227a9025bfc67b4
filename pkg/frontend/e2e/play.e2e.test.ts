// End-to-end: spawn the real service, play arbitrary legal black moves
// through the session layer until checkmate, asserting on every ply that
// the overlays the UI would show equal a fresh /analyze of the position.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, ChildProcess } from "node:child_process";
import { KrkApi, Position } from "../src/api.js";
import { GameSession } from "../src/session.js";

const PORT = 8731;
const BASE = process.env.KRK_API ?? `http://127.0.0.1:${PORT}`;
let server: ChildProcess | null = null;
const api = new KrkApi(BASE);

beforeAll(async () => {
  if (await api.health()) return; // externally provided server
  server = spawn("python3", ["-m", "krk.cli", "serve", "--port", String(PORT)], {
    cwd: "..",
    stdio: "ignore",
  });
  for (let i = 0; i < 120; i++) {
    if (await api.health()) return;
    await new Promise((r) => setTimeout(r, 500));
  }
  throw new Error("service did not come up");
}, 90_000);

afterAll(() => {
  server?.kill();
});

function randomLegalStart(rng: () => number): Position {
  const r8 = () => Math.floor(rng() * 8);
  return { n: 8, wk: [r8(), r8()], bk: [r8(), r8()], wr: [r8(), r8()], whiteToMove: false };
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

describe("full games against the live service", () => {
  it("reaches checkmate within 65 plies with matching overlays", async () => {
    const rng = mulberry32(20260809);
    let gamesDone = 0;
    while (gamesDone < 3) {
      const candidate = randomLegalStart(rng);
      let session = new GameSession(api);
      try {
        const first = await session.start(candidate);
        if (!first.report.legalBlackMoves.length || first.report.status !== "ongoing") {
          continue;
        }
      } catch {
        continue; // illegal random start
      }

      let plies = 0;
      let sawCheckmate = false;
      while (plies <= 70) {
        const ply = session.current;
        // contract: the stored overlays equal a fresh /analyze on every ply
        const fresh = await api.analyze(ply.position);
        expect(ply.report.annotations).toEqual(fresh.annotations);
        expect(ply.report.status).toEqual(fresh.status);

        if (session.status !== "ongoing") {
          sawCheckmate = session.status === "checkmate";
          break;
        }
        const moves = ply.report.legalBlackMoves;
        expect(moves.length).toBeGreaterThan(0); // strategy never stalemates
        const move = moves[Math.floor(rng() * moves.length)];
        try {
          await session.playBlack(move);
        } catch (err) {
          // a random start may hang its rook; black grabbing it ends the game
          if (String(err).includes("422")) break;
          throw err;
        }
        expect(session.current.position.wr).not.toBeNull();
        plies += 2;
      }
      if (sawCheckmate) {
        expect(plies).toBeLessThanOrEqual(66);
        gamesDone += 1;
      }
    }
    expect(gamesDone).toBe(3);
  }, 170_000);

  it("rejects an illegal black move with a reason", async () => {
    const session = new GameSession(api);
    await session.start({ n: 8, wk: [4, 4], bk: [0, 0], wr: [6, 6], whiteToMove: false });
    await expect(session.playBlack([4, 4])).rejects.toThrow(/400/);
  });
});
