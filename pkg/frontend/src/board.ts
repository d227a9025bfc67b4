// DOM board renderer: n-by-n grid with pieces, the shaded room rectangle,
// the highlighted critical square and badges for the strategy annotations.
// Pure view code; all values come from the /analyze report.

import { AnalyzeReport, Position } from "./api.js";

export interface BoardCallbacks {
  onSquareClick?: (x: number, y: number) => void;
}

function roomRectangle(position: Position, report: AnalyzeReport) {
  // the guarded rectangle spans from the rook's dividing lines to the
  // board edge on the black king's side; unconfined positions have none
  const ann = report.annotations;
  if (!position.wr || ann.room === null || ann.unconfined) return null;
  const n = position.n;
  const [wrx, wry] = position.wr;
  const [bkx, bky] = position.bk;
  const x0 = bkx < wrx ? 0 : wrx + 1;
  const x1 = bkx < wrx ? wrx - 1 : n - 1;
  const y0 = bky < wry ? 0 : wry + 1;
  const y1 = bky < wry ? wry - 1 : n - 1;
  return { x0, x1, y0, y1 };
}

export function renderBoard(
  root: HTMLElement,
  position: Position,
  report: AnalyzeReport,
  callbacks: BoardCallbacks = {},
): void {
  const n = position.n;
  root.innerHTML = "";
  const grid = root.ownerDocument.createElement("div");
  grid.className = "board";
  grid.style.display = "grid";
  grid.style.gridTemplateColumns = `repeat(${n}, 3em)`;
  const rect = roomRectangle(position, report);
  const cs = report.annotations.criticalSquare;

  for (let y = n - 1; y >= 0; y--) {
    for (let x = 0; x < n; x++) {
      const cell = root.ownerDocument.createElement("div");
      cell.className = (x + y) % 2 ? "square light" : "square dark";
      cell.dataset.x = String(x);
      cell.dataset.y = String(y);
      if (rect && x >= rect.x0 && x <= rect.x1 && y >= rect.y0 && y <= rect.y1) {
        cell.classList.add("room");
      }
      if (cs && cs[0] === x && cs[1] === y) {
        cell.classList.add("critical");
      }
      const [wkx, wky] = position.wk;
      const [bkx, bky] = position.bk;
      if (wkx === x && wky === y) cell.textContent = "♔";
      else if (bkx === x && bky === y) cell.textContent = "♚";
      else if (position.wr && position.wr[0] === x && position.wr[1] === y)
        cell.textContent = "♖";
      if (callbacks.onSquareClick) {
        cell.addEventListener("click", () => callbacks.onSquareClick!(x, y));
      }
      grid.appendChild(cell);
    }
  }
  root.appendChild(grid);

  const bar = root.ownerDocument.createElement("div");
  bar.className = "statusbar";
  const ann = report.annotations;
  const badges: string[] = [];
  badges.push(
    ann.unconfined ? `room ${ann.room} (unconfined)` : `room ${ann.room ?? "-"}`,
  );
  if (ann.wrDivides) badges.push("divides");
  if (ann.wrExposed) badges.push("exposed");
  if (ann.lPattern) badges.push("L-pattern");
  if (ann.kingsSameEdge) badges.push("kings on edge");
  bar.textContent = badges.join(" | ");
  root.appendChild(bar);
}

export function renderStatus(root: HTMLElement, kind: string | null, status: string): void {
  const label = root.ownerDocument.createElement("div");
  label.className = "kind-label";
  label.textContent =
    (kind ? `white played ${kind}` : "your move") +
    (status !== "ongoing" ? ` - ${status.toUpperCase()}` : "");
  root.appendChild(label);
}
