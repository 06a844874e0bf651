// Browser wiring: fetch the cached invariants once, repaint layers on
// state changes, stream slice queries while the query line is dragged.

import { loadStatic, SliceClient, SliceResult } from "./api.js";
import { DebugTable } from "./debug.js";
import {
  bettiOps,
  heatmapOps,
  makeTransform,
  paint,
  signedBarOps,
  sliceBarOps,
  Transform,
} from "./render.js";
import {
  decodeHash,
  defaultState,
  encodeHash,
  lineFromHandles,
  Point,
  snapHandles,
  ViewState,
} from "./state.js";
import {
  BettiPayload,
  expectKeys,
  HilbertPayload,
  MetaPayload,
  SignedPayload,
  SlicePayload,
} from "./types.js";

const WIDTH = 860;
const HEIGHT = 640;
const MARGIN = 48;

function banner(text: string, kind: "error" | "info" = "error"): void {
  const el = document.getElementById("banner")!;
  el.textContent = text;
  el.className = kind;
  el.style.display = text ? "block" : "none";
}

async function fetchText(url: string): Promise<string> {
  const resp = await fetch(url);
  if (!resp.ok) throw new Error(`${url}: HTTP ${resp.status}`);
  return resp.text();
}

function axisLabel(value: number, dir: string): string {
  const v = dir === "-" ? -value : value;
  return Number.isInteger(v) ? String(v) : v.toFixed(3);
}

class Explorer {
  state: ViewState;
  meta: MetaPayload;
  hilbert: HilbertPayload;
  betti: BettiPayload;
  signed: SignedPayload;
  slice: SlicePayload | null = null;
  debug = new DebugTable();
  client: SliceClient;
  transform!: Transform;
  canvas: HTMLCanvasElement;
  dragging: number | null = null;

  constructor(base: string, bodies: { meta: string; hilbert: string;
                                      betti: string; signed: string }) {
    for (const [name, body, keys] of [
      ["meta", bodies.meta, ["axes", "dirs", "bounds", "sizes"]],
      ["hilbert", bodies.hilbert, ["xs", "ys", "dims"]],
      ["betti", bodies.betti, ["b0", "b1", "b2"]],
      ["signed-barcode", bodies.signed, ["positive", "negative"]],
    ] as [string, string, string[]][]) {
      this.debug.record(`/${name}`.replace("//", "/"), body);
      const err = expectKeys(JSON.parse(body), keys);
      if (err) throw new Error(`schema mismatch in /${name}: ${err}`);
    }
    this.meta = JSON.parse(bodies.meta);
    this.hilbert = JSON.parse(bodies.hilbert);
    this.betti = JSON.parse(bodies.betti);
    this.signed = JSON.parse(bodies.signed);

    const { lo, hi } = this.meta.bounds;
    this.state =
      decodeHash(location.hash) ??
      defaultState({ x: lo[0], y: lo[1] }, { x: hi[0], y: hi[1] });

    this.canvas = document.getElementById("plot") as HTMLCanvasElement;
    this.canvas.width = WIDTH;
    this.canvas.height = HEIGHT;

    this.client = new SliceClient({
      base,
      fetcher: fetchText,
      onResult: (r: SliceResult) => this.onSlice(r),
      onError: () => banner("server unreachable; slice is stale"),
    });

    this.bindPointer();
    this.bindToggles();
    window.addEventListener("hashchange", () => {
      const st = decodeHash(location.hash);
      if (st && encodeHash(st) !== encodeHash(this.state)) {
        this.state = st;
        this.requestSlice();
        this.repaint();
      }
    });
    document.body.append(this.debug.toTableElement(document));
    this.requestSlice();
    this.repaint();
  }

  viewBounds(): { lo: [number, number]; hi: [number, number] } {
    const { lo, hi } = this.meta.bounds;
    const padX = Math.max((hi[0] - lo[0]) * 0.15, 0.5);
    const padY = Math.max((hi[1] - lo[1]) * 0.15, 0.5);
    return {
      lo: [lo[0] - padX, lo[1] - padY],
      hi: [hi[0] + padX, hi[1] + padY],
    };
  }

  requestSlice(): void {
    this.client.request(lineFromHandles(this.state.handles));
    this.client.flush();
  }

  onSlice(result: SliceResult): void {
    banner("");
    this.debug.record("/slice", result.body);
    this.slice = JSON.parse(result.body);
    this.repaint();
  }

  bindToggles(): void {
    for (const key of ["hilbert", "betti", "signed", "slice"] as const) {
      const box = document.getElementById(`toggle-${key}`) as HTMLInputElement;
      box.checked = this.state.layers[key];
      box.addEventListener("change", () => {
        this.state.layers[key] = box.checked;
        this.syncHash();
        this.repaint();
      });
    }
  }

  bindPointer(): void {
    const pickHandle = (ev: PointerEvent): number | null => {
      let best: number | null = null;
      let bestDist = 25; // px
      this.state.handles.forEach((h, i) => {
        const d = Math.hypot(this.transform.sx(h.x) - this.canvasX(ev),
                             this.transform.sy(h.y) - this.canvasY(ev));
        if (d < bestDist) {
          best = i;
          bestDist = d;
        }
      });
      return best;
    };
    this.canvas.addEventListener("pointerdown", (ev) => {
      this.dragging = pickHandle(ev);
      if (this.dragging !== null) this.canvas.setPointerCapture(ev.pointerId);
    });
    this.canvas.addEventListener("pointermove", (ev) => {
      if (this.dragging === null) return;
      const world = this.screenToWorld(ev);
      if (!world) return;
      const handles: [Point, Point] = [...this.state.handles] as [Point, Point];
      handles[this.dragging] = world;
      const [a, b] = snapHandles(handles[0], handles[1]);
      if (a.x === b.x && a.y === b.y) return; // degenerate drag: keep line
      this.state.handles = [a, b];
      this.syncHash();
      this.client.request(lineFromHandles(this.state.handles));
      this.repaint();
    });
    this.canvas.addEventListener("pointerup", () => {
      this.dragging = null;
      this.client.flush();
    });
  }

  canvasX(ev: PointerEvent): number {
    return ev.clientX - this.canvas.getBoundingClientRect().left;
  }

  canvasY(ev: PointerEvent): number {
    return ev.clientY - this.canvas.getBoundingClientRect().top;
  }

  screenToWorld(ev: PointerEvent): Point | null {
    const { lo, hi } = this.viewBounds();
    const x = lo[0] + ((this.canvasX(ev) - MARGIN) /
      (WIDTH - 2 * MARGIN)) * (hi[0] - lo[0]);
    const y = lo[1] + ((HEIGHT - MARGIN - this.canvasY(ev)) /
      (HEIGHT - 2 * MARGIN)) * (hi[1] - lo[1]);
    if (!isFinite(x) || !isFinite(y)) return null;
    return { x, y };
  }

  syncHash(): void {
    history.replaceState(null, "", encodeHash(this.state));
  }

  repaint(): void {
    const { lo, hi } = this.viewBounds();
    this.transform = makeTransform(lo, hi, WIDTH, HEIGHT, MARGIN,
                                   this.state.zoom);
    const ctx = this.canvas.getContext("2d")!;
    ctx.clearRect(0, 0, WIDTH, HEIGHT);
    this.paintAxes(ctx, lo, hi);
    if (this.state.layers.hilbert) {
      paint(heatmapOps(this.hilbert, this.transform), ctx);
    }
    if (this.state.layers.signed) {
      paint(signedBarOps(this.signed, this.transform, hi), ctx);
    }
    if (this.state.layers.betti) {
      paint(bettiOps(this.betti, this.transform), ctx);
    }
    this.paintLine(ctx);
    if (this.state.layers.slice && this.slice) {
      const line = this.slice.line;
      const tMax = Math.max(
        (hi[0] - line.bx) / line.vx,
        (hi[1] - line.by) / line.vy,
      );
      paint(sliceBarOps(this.slice, line, this.transform, tMax), ctx);
    }
    this.paintLegend(ctx);
  }

  paintAxes(ctx: CanvasRenderingContext2D, lo: [number, number],
            hi: [number, number]): void {
    ctx.strokeStyle = "#888";
    ctx.lineWidth = 1;
    ctx.strokeRect(MARGIN, MARGIN, WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN);
    ctx.fillStyle = "#333";
    ctx.font = "12px sans-serif";
    const [dirX, dirY] = this.meta.dirs;
    for (const x of this.hilbert.xs) {
      ctx.fillText(axisLabel(x, dirX), this.transform.sx(x) - 6, HEIGHT - 18);
    }
    for (const y of this.hilbert.ys) {
      ctx.fillText(axisLabel(y, dirY), 6, this.transform.sy(y) + 4);
    }
    ctx.fillText(this.meta.axes[0] + (dirX === "-" ? " (mirrored)" : ""),
                 WIDTH / 2, HEIGHT - 4);
    ctx.save();
    ctx.translate(14, HEIGHT / 2);
    ctx.rotate(-Math.PI / 2);
    ctx.fillText(this.meta.axes[1] + (dirY === "-" ? " (mirrored)" : ""), 0, 0);
    ctx.restore();
  }

  paintLine(ctx: CanvasRenderingContext2D): void {
    const [a, b] = this.state.handles;
    const line = lineFromHandles(this.state.handles);
    const { lo, hi } = this.viewBounds();
    const t0 = Math.min((lo[0] - line.bx) / line.vx,
                        (lo[1] - line.by) / line.vy);
    const t1 = Math.max((hi[0] - line.bx) / line.vx,
                        (hi[1] - line.by) / line.vy);
    ctx.strokeStyle = "rgba(30,90,220,0.9)";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(this.transform.sx(line.bx + line.vx * t0),
               this.transform.sy(line.by + line.vy * t0));
    ctx.lineTo(this.transform.sx(line.bx + line.vx * t1),
               this.transform.sy(line.by + line.vy * t1));
    ctx.stroke();
    for (const h of [a, b]) {
      ctx.fillStyle = "rgba(30,90,220,0.9)";
      ctx.beginPath();
      ctx.arc(this.transform.sx(h.x), this.transform.sy(h.y), 5, 0,
              2 * Math.PI);
      ctx.fill();
    }
  }

  paintLegend(ctx: CanvasRenderingContext2D): void {
    const dims = this.hilbert.dims;
    const maxDim = Math.max(0, ...dims);
    ctx.font = "12px sans-serif";
    ctx.fillStyle = "#333";
    ctx.fillText(`dim 1..${maxDim}`, WIDTH - 150, 16);
    for (let d = 1; d <= Math.min(maxDim, 8); d++) {
      const level = Math.round(230 - (d / Math.max(maxDim, 1)) * 170);
      ctx.fillStyle = `rgb(${level},${level},${level})`;
      ctx.fillRect(WIDTH - 150 + (d - 1) * 16, 22, 14, 14);
    }
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const base = params.get("server") ?? "http://127.0.0.1:8050";
  try {
    const bodies = await loadStatic(base, fetchText);
    new Explorer(base, bodies);
  } catch (err) {
    banner(`cannot load module from ${base}: ${err}`);
  }
}

if (typeof document !== "undefined" && document.getElementById("plot")) {
  void boot();
}
