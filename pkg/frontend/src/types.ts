// Payload shapes served by `mph serve`; field names are the wire contract.

export type Inf = number | "inf";

export interface MetaPayload {
  axes: [string, string];
  dirs: [string, string];
  bounds: { lo: [number, number]; hi: [number, number] };
  hom: number;
  field: number;
  sizes: { gens: number; rels: number };
}

export interface HilbertPayload {
  xs: number[];
  ys: number[];
  dims: number[]; // row-major: y outer, x inner
}

export interface BettiPayload {
  b0: [number, number, number][]; // x, y, multiplicity
  b1: [number, number, number][];
  b2: [number, number, number][];
}

export interface SignedPayload {
  positive: [number, number, Inf, Inf, number][]; // lx, ly, hx, hy, mult
  negative: [number, number, Inf, Inf, number][];
}

export interface SlicePayload {
  line: { vx: number; vy: number; bx: number; by: number };
  bars: [number, Inf][];
}

export function asNumber(v: Inf): number {
  return v === "inf" ? Infinity : v;
}

export function expectKeys(payload: unknown, keys: string[]): string | null {
  if (typeof payload !== "object" || payload === null) {
    return "payload is not an object";
  }
  for (const k of keys) {
    if (!(k in (payload as Record<string, unknown>))) {
      return `missing field "${k}"`;
    }
  }
  return null;
}
