// Entry point: wire the board, the session and the controls together.

import { KrkApi, Position } from "./api.js";
import { GameSession } from "./session.js";
import { renderBoard, renderStatus } from "./board.js";

const params = new URLSearchParams(window.location.search);
const api = new KrkApi(params.get("api") ?? "http://127.0.0.1:8000");
const session = new GameSession(api);

const boardEl = document.getElementById("board")!;
const messageEl = document.getElementById("message")!;

function redraw(): void {
  const ply = session.current;
  renderBoard(boardEl, ply.position, ply.report, {
    onSquareClick: (x, y) => void onSquare(x, y),
  });
  renderStatus(boardEl, ply.lastKind, session.status);
}

async function onSquare(x: number, y: number): Promise<void> {
  if (session.status !== "ongoing") return;
  messageEl.textContent = "";
  try {
    await session.playBlack([x, y]);
  } catch (err) {
    messageEl.textContent = String((err as Error).message ?? err);
    return;
  }
  redraw();
}

function randomStart(n: number): Position {
  // scatter pieces until the service accepts the position as legal
  const rand = () => Math.floor(Math.random() * n);
  return {
    n,
    wk: [rand(), rand()],
    bk: [rand(), rand()],
    wr: [rand(), rand()],
    whiteToMove: false,
  };
}

async function newGame(): Promise<void> {
  const n = Number((document.getElementById("size") as HTMLInputElement).value) || 8;
  for (let tries = 0; tries < 200; tries++) {
    const candidate = randomStart(n);
    try {
      const report = await api.analyze(candidate);
      if (report.legal && report.status === "ongoing" && report.legalBlackMoves.length) {
        await session.start(candidate);
        redraw();
        return;
      }
    } catch {
      // malformed candidate; try again
    }
  }
  messageEl.textContent = "could not find a legal start";
}

document.getElementById("new")!.addEventListener("click", () => void newGame());
document.getElementById("undo")!.addEventListener("click", () => {
  try {
    session.undo();
    redraw();
  } catch (err) {
    messageEl.textContent = String((err as Error).message);
  }
});
document.getElementById("redo")!.addEventListener("click", () => {
  try {
    session.redo();
    redraw();
  } catch (err) {
    messageEl.textContent = String((err as Error).message);
  }
});

void api.health().then((ok) => {
  if (!ok) messageEl.textContent = "service unreachable; start it with: krk serve";
});
