// HTTP client for the query server.  Slice requests are debounced, at
// most one is in flight, and responses are applied only if no newer
// request has been issued (stale responses are dropped by sequence
// number).  Raw bodies are kept verbatim for the debug table.

import { LineQuery } from "./state.js";

export type Fetcher = (url: string) => Promise<string>;

export function sliceUrl(base: string, line: LineQuery): string {
  return (
    `${base}/slice?vx=${line.vx}&vy=${line.vy}` +
    `&bx=${line.bx}&by=${line.by}`
  );
}

export interface SliceResult {
  line: LineQuery;
  body: string;
  seq: number;
}

interface SliceClientOptions {
  base: string;
  fetcher: Fetcher;
  onResult: (result: SliceResult) => void;
  onError?: (err: unknown) => void;
  debounceMs?: number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
}

export class SliceClient {
  issued = 0; // sequence number of the most recent request
  applied = 0; // sequence number of the most recently rendered response
  requestCount = 0;

  private opts: Required<SliceClientOptions>;
  private timer: unknown = null;
  private pending: LineQuery | null = null;
  private inflight = false;

  constructor(options: SliceClientOptions) {
    this.opts = {
      onError: () => undefined,
      debounceMs: 30,
      setTimer: (fn, ms) => setTimeout(fn, ms),
      clearTimer: (h) => clearTimeout(h as never),
      ...options,
    };
  }

  /** Debounced entry point for pointer-drag updates. */
  request(line: LineQuery): void {
    this.pending = line;
    if (this.timer === null) {
      this.timer = this.opts.setTimer(() => {
        this.timer = null;
        this.flush();
      }, this.opts.debounceMs);
    }
  }

  /** Immediate request (initial load, tests). */
  flush(): void {
    if (this.pending === null || this.inflight) return;
    const line = this.pending;
    this.pending = null;
    this.issue(line);
  }

  private issue(line: LineQuery): void {
    const seq = ++this.issued;
    this.requestCount += 1;
    this.inflight = true;
    this.opts
      .fetcher(sliceUrl(this.opts.base, line))
      .then(
        (body) => this.applyResponse(seq, line, body),
        (err) => this.opts.onError(err),
      )
      .then(() => {
        this.inflight = false;
        this.flush(); // serve whatever arrived while we were busy
      });
  }

  /** Apply a response unless a newer request has been issued since. */
  applyResponse(seq: number, line: LineQuery, body: string): boolean {
    if (seq !== this.issued || seq <= this.applied) {
      return false; // stale: a newer request exists or already rendered
    }
    this.applied = seq;
    this.opts.onResult({ line, body, seq });
    return true;
  }
}

export interface StaticPayloads {
  meta: string;
  hilbert: string;
  betti: string;
  signed: string;
}

export async function loadStatic(
  base: string,
  fetcher: Fetcher,
): Promise<StaticPayloads> {
  const [meta, hilbert, betti, signed] = await Promise.all([
    fetcher(`${base}/meta`),
    fetcher(`${base}/hilbert`),
    fetcher(`${base}/betti`),
    fetcher(`${base}/signed-barcode`),
  ]);
  return { meta, hilbert, betti, signed };
}
