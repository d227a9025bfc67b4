// Typed client for the KRK strategy service. The UI computes no chess logic
// of its own: every annotation shown comes back from /analyze.

export interface Position {
  n: number;
  wk: [number, number];
  bk: [number, number];
  wr: [number, number] | null;
  whiteToMove: boolean;
  variant?: string;
}

export interface Annotations {
  room: number | null;
  unconfined: boolean | null;
  criticalSquare: [number, number] | null;
  wrExposed: boolean | null;
  wrDivides: boolean | null;
  lPattern: boolean | null;
  kingsSameEdge: boolean;
}

export interface AnalyzeReport {
  position: Position;
  legal: boolean;
  annotations: Annotations;
  classification: string;
  strategyMove: { to: Position; kind: string } | null;
  legalBlackMoves: [number, number][];
  status: string;
}

export interface PlayResponse {
  newPosition: Position;
  strategyReply: { wk: [number, number]; wr: [number, number] } | null;
  kind: string | null;
  gameStatus: string;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(`api error ${status}: ${JSON.stringify(detail)}`);
  }
}

export class KrkApi {
  constructor(readonly baseUrl: string = "http://127.0.0.1:8000") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.json().catch(() => null));
    }
    return (await resp.json()) as T;
  }

  async health(): Promise<boolean> {
    try {
      const resp = await fetch(this.baseUrl + "/health");
      return resp.ok;
    } catch {
      return false;
    }
  }

  analyze(position: Position): Promise<AnalyzeReport> {
    return this.post("/analyze", position);
  }

  play(position: Position, to: [number, number]): Promise<PlayResponse> {
    return this.post("/play", { position, move: { to } });
  }
}
