// Rendering is split in two: pure functions that turn payloads into
// primitive draw operations (testable, every op carries the payload
// datum that backs it), and a thin painter that puts ops on a canvas.

import {
  BettiPayload,
  HilbertPayload,
  SignedPayload,
  SlicePayload,
  asNumber,
} from "./types.js";
import { LineQuery } from "./state.js";

export interface Transform {
  // world -> screen; y axis flipped so larger grades sit higher
  sx: (x: number) => number;
  sy: (y: number) => number;
}

export function makeTransform(
  lo: [number, number],
  hi: [number, number],
  width: number,
  height: number,
  margin = 40,
  zoom = { scale: 1, tx: 0, ty: 0 },
): Transform {
  const spanX = Math.max(hi[0] - lo[0], 1e-9);
  const spanY = Math.max(hi[1] - lo[1], 1e-9);
  const kx = ((width - 2 * margin) / spanX) * zoom.scale;
  const ky = ((height - 2 * margin) / spanY) * zoom.scale;
  return {
    sx: (x) => margin + (x - lo[0]) * kx + zoom.tx,
    sy: (y) => height - margin - (y - lo[1]) * ky + zoom.ty,
  };
}

export type DrawOp =
  | { kind: "rect"; x0: number; y0: number; x1: number; y1: number;
      fill: string; datum: unknown }
  | { kind: "disc"; x: number; y: number; r: number; fill: string;
      datum: unknown }
  | { kind: "segment"; x0: number; y0: number; x1: number; y1: number;
      stroke: string; width: number; datum: unknown };

/** Greyscale level for a dimension: monotone, lightest non-white is 1. */
export function greyFor(dim: number, maxDim: number): string {
  if (dim <= 0) return "none";
  const top = Math.max(maxDim, 1);
  const level = Math.round(230 - (dim / top) * 170);
  return `rgb(${level},${level},${level})`;
}

/** Heatmap cells: each grid point's dimension fills the cell up to the
 * next grid value (the last row/column gets a one-step margin). */
export function heatmapOps(
  payload: HilbertPayload,
  t: Transform,
  padCells = 1.0,
): DrawOp[] {
  const { xs, ys, dims } = payload;
  const maxDim = Math.max(0, ...dims);
  if (maxDim === 0) return [];
  const stepX = xs.length > 1 ? xs[xs.length - 1] - xs[xs.length - 2] : 1;
  const stepY = ys.length > 1 ? ys[ys.length - 1] - ys[ys.length - 2] : 1;
  const ops: DrawOp[] = [];
  for (let iy = 0; iy < ys.length; iy++) {
    for (let ix = 0; ix < xs.length; ix++) {
      const dim = dims[iy * xs.length + ix];
      if (dim <= 0) continue;
      const x1 = ix + 1 < xs.length ? xs[ix + 1] : xs[ix] + stepX * padCells;
      const y1 = iy + 1 < ys.length ? ys[iy + 1] : ys[iy] + stepY * padCells;
      ops.push({
        kind: "rect",
        x0: t.sx(xs[ix]),
        y0: t.sy(y1),
        x1: t.sx(x1),
        y1: t.sy(ys[iy]),
        fill: greyFor(dim, maxDim),
        datum: { x: xs[ix], y: ys[iy], dim },
      });
    }
  }
  return ops;
}

export const BETTI_COLORS = ["rgba(0,160,0,0.65)", "rgba(220,0,0,0.65)",
                             "rgba(230,200,0,0.65)"]; // green, red, yellow

/** Betti dots: area proportional to multiplicity. */
export function bettiOps(payload: BettiPayload, t: Transform,
                         baseRadius = 6): DrawOp[] {
  const ops: DrawOp[] = [];
  const parts: [keyof BettiPayload, string][] = [
    ["b0", BETTI_COLORS[0]],
    ["b1", BETTI_COLORS[1]],
    ["b2", BETTI_COLORS[2]],
  ];
  for (const [key, fill] of parts) {
    for (const [x, y, mult] of payload[key]) {
      ops.push({
        kind: "disc",
        x: t.sx(x),
        y: t.sy(y),
        r: baseRadius * Math.sqrt(mult),
        fill,
        datum: { index: key, x, y, mult },
      });
    }
  }
  return ops;
}

export const POSITIVE_COLOR = "rgba(30,80,230,0.8)"; // blue
export const NEGATIVE_COLOR = "rgba(220,30,30,0.8)"; // red

/** Signed-barcode bars: segments lo -> hi, dots for point rectangles.
 * Unbounded coordinates are clipped to the view bound. */
export function signedBarOps(
  payload: SignedPayload,
  t: Transform,
  viewHi: [number, number],
  dotRadius = 4,
): DrawOp[] {
  const ops: DrawOp[] = [];
  const parts: ["positive" | "negative", string, number][] = [
    ["positive", POSITIVE_COLOR, +1],
    ["negative", NEGATIVE_COLOR, -1],
  ];
  for (const [key, color, sign] of parts) {
    payload[key].forEach(([lx, ly, hxRaw, hyRaw, mult], i) => {
      const hx = Math.min(asNumber(hxRaw), viewHi[0]);
      const hy = Math.min(asNumber(hyRaw), viewHi[1]);
      const datum = { sign, lo: [lx, ly], hi: [hxRaw, hyRaw], mult };
      // nudge multiplicity copies apart so they stay visible
      for (let m = 0; m < mult; m++) {
        const off = (m + i * 0.5) * 2 * sign;
        if (hx === lx && hy === ly) {
          ops.push({ kind: "disc", x: t.sx(lx), y: t.sy(ly) + off,
                     r: dotRadius, fill: color, datum });
        } else {
          ops.push({ kind: "segment", x0: t.sx(lx), y0: t.sy(ly) + off,
                     x1: t.sx(hx), y1: t.sy(hy) + off,
                     stroke: color, width: 2.5, datum });
        }
      }
    });
  }
  return ops;
}

export const SLICE_COLOR = "rgba(140,60,200,0.9)"; // purple

/** Slice bars drawn on the query line, offset perpendicularly. */
export function sliceBarOps(
  payload: SlicePayload,
  line: LineQuery,
  t: Transform,
  tMax: number,
  offsetPx = 7,
): DrawOp[] {
  const norm = Math.hypot(line.vx, line.vy);
  const px = -line.vy / norm;
  const py = line.vx / norm;
  const ops: DrawOp[] = [];
  payload.bars.forEach(([birth, deathRaw], i) => {
    const death = Math.min(asNumber(deathRaw), tMax);
    if (death <= birth) return;
    const x0 = line.bx + line.vx * birth;
    const y0 = line.by + line.vy * birth;
    const x1 = line.bx + line.vx * death;
    const y1 = line.by + line.vy * death;
    const off = (i + 1) * offsetPx;
    ops.push({
      kind: "segment",
      x0: t.sx(x0) + px * off,
      y0: t.sy(y0) - py * off,
      x1: t.sx(x1) + px * off,
      y1: t.sy(y1) - py * off,
      stroke: SLICE_COLOR,
      width: 3,
      datum: { birth, death: deathRaw },
    });
  });
  return ops;
}

export interface CanvasLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
}

export function paint(ops: DrawOp[], ctx: CanvasLike): void {
  for (const op of ops) {
    if (op.kind === "rect") {
      ctx.fillStyle = op.fill;
      ctx.fillRect(op.x0, op.y0, op.x1 - op.x0, op.y1 - op.y0);
    } else if (op.kind === "disc") {
      ctx.fillStyle = op.fill;
      ctx.beginPath();
      ctx.arc(op.x, op.y, op.r, 0, 2 * Math.PI);
      ctx.fill();
    } else {
      ctx.strokeStyle = op.stroke;
      ctx.lineWidth = op.width;
      ctx.beginPath();
      ctx.moveTo(op.x0, op.y0);
      ctx.lineTo(op.x1, op.y1);
      ctx.stroke();
    }
  }
}
