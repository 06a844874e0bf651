// View state: the query line (as two draggable handles), layer toggles,
// and the pan/zoom transform.  The whole state round-trips through the
// URL hash so views are shareable; line endpoints are kept to 6 decimals.

export interface ViewState {
  handles: [Point, Point];
  layers: { hilbert: boolean; betti: boolean; signed: boolean; slice: boolean };
  zoom: { scale: number; tx: number; ty: number };
}

export interface Point {
  x: number;
  y: number;
}

export interface LineQuery {
  vx: number;
  vy: number;
  bx: number;
  by: number;
}

// smallest admissible direction component relative to the other one
export const MIN_SLOPE_RATIO = 1e-4;

export function defaultState(lo: Point, hi: Point): ViewState {
  return {
    handles: [
      { x: lo.x, y: lo.y },
      { x: hi.x, y: hi.y },
    ],
    layers: { hilbert: true, betti: true, signed: false, slice: true },
    zoom: { scale: 1, tx: 0, ty: 0 },
  };
}

/** Snap two handles so they span an admissible line (slope > 0). */
export function snapHandles(a: Point, b: Point): [Point, Point] {
  let [lo, hi] = a.x + a.y <= b.x + b.y ? [a, b] : [b, a];
  lo = { ...lo };
  hi = { ...hi };
  const span = Math.max(Math.abs(hi.x - lo.x), Math.abs(hi.y - lo.y), 1e-6);
  const minStep = span * MIN_SLOPE_RATIO;
  if (hi.x - lo.x < minStep) hi.x = lo.x + minStep;
  if (hi.y - lo.y < minStep) hi.y = lo.y + minStep;
  return [lo, hi];
}

/** Direction normalized so the smaller component is 1 (both >= 1). */
export function lineFromHandles(handles: [Point, Point]): LineQuery {
  const [lo, hi] = snapHandles(handles[0], handles[1]);
  const dx = hi.x - lo.x;
  const dy = hi.y - lo.y;
  const m = Math.min(dx, dy);
  return { vx: dx / m, vy: dy / m, bx: lo.x, by: lo.y };
}

const LAYER_LETTERS: [keyof ViewState["layers"], string][] = [
  ["hilbert", "h"],
  ["betti", "b"],
  ["signed", "s"],
  ["slice", "l"],
];

export function encodeHash(state: ViewState): string {
  const [a, b] = state.handles;
  const line = [a.x, a.y, b.x, b.y].map((v) => v.toFixed(6)).join(",");
  const layers = LAYER_LETTERS.filter(([k]) => state.layers[k])
    .map(([, letter]) => letter)
    .join("");
  const zoom = [state.zoom.scale, state.zoom.tx, state.zoom.ty]
    .map((v) => v.toFixed(6))
    .join(",");
  return `#line=${line}&layers=${layers}&zoom=${zoom}`;
}

export function decodeHash(hash: string): ViewState | null {
  if (!hash.startsWith("#")) return null;
  const fields = new Map<string, string>();
  for (const part of hash.slice(1).split("&")) {
    const eq = part.indexOf("=");
    if (eq > 0) fields.set(part.slice(0, eq), part.slice(eq + 1));
  }
  const line = fields.get("line");
  if (!line) return null;
  const nums = line.split(",").map(Number);
  if (nums.length !== 4 || nums.some((v) => !isFinite(v))) return null;
  const layersTxt = fields.get("layers") ?? "hbsl";
  const zoomTxt = (fields.get("zoom") ?? "1,0,0").split(",").map(Number);
  if (zoomTxt.length !== 3 || zoomTxt.some((v) => !isFinite(v))) return null;
  const layers = {
    hilbert: layersTxt.includes("h"),
    betti: layersTxt.includes("b"),
    signed: layersTxt.includes("s"),
    slice: layersTxt.includes("l"),
  };
  return {
    handles: [
      { x: nums[0], y: nums[1] },
      { x: nums[2], y: nums[3] },
    ],
    layers,
    zoom: { scale: zoomTxt[0], tx: zoomTxt[1], ty: zoomTxt[2] },
  };
}

/** Canonical form used to compare states: hash encoding equality. */
export function sameView(a: ViewState, b: ViewState): boolean {
  return encodeHash(a) === encodeHash(b);
}
