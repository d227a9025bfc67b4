// Client-side game session: a list of validated plies with an index cursor
// for undo and what-if branching. Every transition went through /play and
// every annotation through /analyze, so replays stay server-validated.

import { AnalyzeReport, KrkApi, Position } from "./api.js";

export interface Ply {
  position: Position; // black to move
  report: AnalyzeReport; // analysis of that position
  lastKind: string | null; // kind of white's move that produced it
}

export class GameSession {
  readonly history: Ply[] = [];
  cursor = -1; // index of the current ply in history
  status = "ongoing";
  private busy = false;

  constructor(readonly api: KrkApi) {}

  get current(): Ply {
    if (this.cursor < 0) throw new Error("session not started");
    return this.history[this.cursor];
  }

  /** Begin from a black-to-move position (validated via /analyze). */
  async start(position: Position): Promise<Ply> {
    const report = await this.api.analyze(position);
    if (!report.legal) throw new Error("illegal starting position");
    this.history.length = 0;
    this.history.push({ position, report, lastKind: null });
    this.cursor = 0;
    this.status = report.status;
    return this.current;
  }

  /**
   * Play the black king to `to`; the service answers with white's strategy
   * move. Playing from a rewound cursor discards the undone tail (branch).
   */
  async playBlack(to: [number, number]): Promise<Ply> {
    if (this.busy) throw new Error("a move is already in flight");
    if (this.status !== "ongoing") throw new Error(`game is over: ${this.status}`);
    this.busy = true;
    try {
      const resp = await this.api.play(this.current.position, to);
      const report = await this.api.analyze(resp.newPosition);
      this.history.length = this.cursor + 1; // drop any undone branch
      this.history.push({
        position: resp.newPosition,
        report,
        lastKind: resp.kind,
      });
      this.cursor += 1;
      this.status = resp.gameStatus;
      return this.current;
    } finally {
      this.busy = false;
    }
  }

  /** Step the cursor back one ply (toward the start). */
  undo(): Ply {
    if (this.cursor <= 0) throw new Error("nothing to undo");
    this.cursor -= 1;
    this.status = this.current.report.status;
    return this.current;
  }

  /** Step forward again after an undo. */
  redo(): Ply {
    if (this.cursor + 1 >= this.history.length) throw new Error("nothing to redo");
    this.cursor += 1;
    this.status = this.current.report.status;
    return this.current;
  }

  get plies(): number {
    // each stored transition after the first is one black + one white ply
    return 2 * this.cursor;
  }
}
