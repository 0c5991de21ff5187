/** Planner UI wiring: canvas rendering, drag tools, sweep panel, optimizer. */

import { ApiError, PlannerApi } from "./api.js";
import { canonicalScenario } from "./canonical.js";
import { renderFieldRaster } from "./raster.js";
import {
  PREVIEW_RESOLUTION_M,
  RecomputeScheduler,
  SETTLE_RESOLUTION_M,
} from "./scheduler.js";
import {
  applySweepDistance,
  createHistory,
  createState,
  isStale,
  moveDevice,
  acceptPayload,
  redo,
  setWallDistance,
  txRxDistance,
  undo,
  wallTxDistance,
  type Tool,
  type ViewState,
} from "./state.js";
import { distanceAtCanvasX, drawSweep, layoutFor, type PlotLayout } from "./sweep.js";
import type { FieldPayload, Pair } from "./types.js";

const api = new PlannerApi("");
const state: ViewState = createState(canonicalScenario());
const history = createHistory();

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
};

const canvas = el<HTMLCanvasElement>("map");
const ctx = canvas.getContext("2d")!;
const sweepCanvas = el<HTMLCanvasElement>("sweep");
const sweepCtx = sweepCanvas.getContext("2d")!;
const notice = el<HTMLDivElement>("notice");
const staleBadge = el<HTMLSpanElement>("stale");
const probe = el<HTMLDivElement>("probe");

let sweepLayout: PlotLayout | null = null;

function setNotice(text: string): void {
  notice.textContent = text;
  if (text) {
    setTimeout(() => {
      if (notice.textContent === text) notice.textContent = "";
    }, 2500);
  }
}

// ---- world/canvas transform (covers the scenario grid with a margin) ----

interface Transform {
  scale: number;
  ox: number;
  oy: number;
}

function fitTransform(): Transform {
  const g = state.scenario.grid;
  const scale = Math.min(canvas.width / g.width_m, canvas.height / g.height_m);
  return { scale, ox: g.origin_m[0], oy: g.origin_m[1] };
}

function toScreen(t: Transform, p: Pair): Pair {
  return [(p[0] - t.ox) * t.scale, canvas.height - (p[1] - t.oy) * t.scale];
}

function toWorld(t: Transform, x: number, y: number): Pair {
  return [x / t.scale + t.ox, (canvas.height - y) / t.scale + t.oy];
}

// ---- rendering ----

function draw(): void {
  const t = fitTransform();
  ctx.fillStyle = "#0c0c0f";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const payload = state.payload;
  if (payload) {
    const raster = renderFieldRaster(payload);
    const image = new ImageData(raster.width, raster.height);
    image.data.set(raster.pixels);
    const off = document.createElement("canvas");
    off.width = raster.width;
    off.height = raster.height;
    off.getContext("2d")!.putImageData(image, 0, 0);
    const g = payload.grid;
    const topLeft = toScreen(t, [g.origin_m[0], g.origin_m[1] + g.height_m]);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(off, topLeft[0], topLeft[1], g.width_m * t.scale, g.height_m * t.scale);

    // leakage side tint
    const wall = payload.reflective_wall;
    const a = toScreen(t, wall.a_m);
    const b = toScreen(t, wall.b_m);
    ctx.save();
    ctx.strokeStyle = "#ff5d8f";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.moveTo(a[0], a[1]);
    ctx.lineTo(b[0], b[1]);
    ctx.stroke();
    ctx.restore();

    // smoothed coverage boundary
    ctx.strokeStyle = "#f8f9fa";
    ctx.lineWidth = 1.2;
    for (const contour of payload.contours) {
      ctx.beginPath();
      contour.forEach((p, i) => {
        const s = toScreen(t, p);
        if (i === 0) ctx.moveTo(s[0], s[1]);
        else ctx.lineTo(s[0], s[1]);
      });
      ctx.closePath();
      ctx.stroke();
    }
  }

  // room outline
  ctx.strokeStyle = "#74c0fc";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  state.scenario.room.corners_m.forEach((c, i) => {
    const s = toScreen(t, c);
    if (i === 0) ctx.moveTo(s[0], s[1]);
    else ctx.lineTo(s[0], s[1]);
  });
  ctx.closePath();
  ctx.stroke();

  // devices (current scenario positions, which may be ahead of the payload)
  const drawDevice = (p: Pair, label: string, color: string) => {
    const s = toScreen(t, p);
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(s[0], s[1], 7, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#111";
    ctx.font = "bold 9px system-ui";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(label, s[0], s[1]);
  };
  drawDevice(state.scenario.placement.tx_m, "Tx", "#ffd60a");
  drawDevice(state.scenario.placement.rx_m, "Rx", "#74f0a0");

  staleBadge.style.display = isStale(state) || state.payloadIsPreview ? "inline" : "none";
  staleBadge.textContent = state.payloadIsPreview ? "preview" : "recomputing";
  updateReadouts();
}

function fmtArea(v: number | null | undefined): string {
  return v === null || v === undefined ? "n/a" : `${v.toFixed(2)} m²`;
}

function updateReadouts(): void {
  const p = state.payload;
  el<HTMLSpanElement>("indoor").textContent = fmtArea(p?.indoor_area_m2);
  el<HTMLSpanElement>("leakage").textContent = fmtArea(p?.leakage_area_m2);
  el<HTMLSpanElement>("regions").textContent = p ? String(p.component_count) : "n/a";
  el<HTMLSpanElement>("walltx").textContent = `${wallTxDistance(state.scenario).toFixed(2)} m`;
  el<HTMLSpanElement>("txrx").textContent = `${txRxDistance(state.scenario).toFixed(2)} m`;
}

// ---- recompute pipeline ----

const scheduler = new RecomputeScheduler(async ({ revision, kind }) => {
  try {
    const resolution = kind === "preview" ? PREVIEW_RESOLUTION_M : SETTLE_RESOLUTION_M;
    const payload = await api.postField(state.scenario, { resolution_m: resolution });
    if (acceptPayload(state, payload, revision, kind === "preview")) {
      draw();
    }
  } catch (err) {
    setNotice(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
  }
});

function scenarioChanged(preview: boolean): void {
  draw();
  if (preview) {
    scheduler.preview(state.revision);
  }
  scheduler.settle(state.revision);
}

// ---- tools and dragging ----

let dragging = false;

function currentTool(): Tool {
  return (document.querySelector('input[name="tool"]:checked') as HTMLInputElement)
    .value as Tool;
}

canvas.addEventListener("pointerdown", (ev) => {
  if (currentTool() === "inspect") {
    inspectAt(ev.offsetX, ev.offsetY);
    return;
  }
  dragging = true;
  canvas.setPointerCapture(ev.pointerId);
  handleDrag(ev.offsetX, ev.offsetY, true);
});

canvas.addEventListener("pointermove", (ev) => {
  if (currentTool() === "inspect") {
    inspectAt(ev.offsetX, ev.offsetY);
    return;
  }
  if (dragging) handleDrag(ev.offsetX, ev.offsetY, true);
});

canvas.addEventListener("pointerup", (ev) => {
  if (!dragging) return;
  dragging = false;
  canvas.releasePointerCapture(ev.pointerId);
  handleDrag(ev.offsetX, ev.offsetY, false);
});

function handleDrag(x: number, y: number, preview: boolean): void {
  const t = fitTransform();
  const world = toWorld(t, x, y);
  const tool = currentTool();
  let outcome;
  if (tool === "move-tx" || tool === "move-rx") {
    outcome = moveDevice(state, history, tool === "move-tx" ? "tx" : "rx", world);
  } else {
    // wall tool: pointer distance from the wall line sets the wall-Tx distance
    const wall = state.payload?.reflective_wall ?? {
      a_m: state.scenario.room.corners_m[state.scenario.room.reflective_wall_index],
      b_m: state.scenario.room.corners_m[
        (state.scenario.room.reflective_wall_index + 1) % state.scenario.room.corners_m.length
      ],
    };
    const dx = wall.b_m[0] - wall.a_m[0];
    const dy = wall.b_m[1] - wall.a_m[1];
    const len = Math.hypot(dx, dy);
    const n: Pair = [-dy / len, dx / len];
    const signed = (world[0] - wall.a_m[0]) * n[0] + (world[1] - wall.a_m[1]) * n[1];
    const target = Math.max(0.05, Math.abs(signed));
    outcome = setWallDistance(state, history, target);
  }
  if (!outcome.moved) {
    if (outcome.notice) setNotice(outcome.notice);
    return;
  }
  if (outcome.notice) setNotice(outcome.notice);
  scenarioChanged(preview);
}

function inspectAt(x: number, y: number): void {
  const payload = state.payload;
  if (!payload) return;
  const t = fitTransform();
  const [wx, wy] = toWorld(t, x, y);
  const g = payload.grid;
  const col = Math.floor((wx - g.origin_m[0]) / g.resolution_m);
  const row = Math.floor((wy - g.origin_m[1]) / g.resolution_m);
  if (col < 0 || col >= g.cols || row < 0 || row >= g.rows) {
    probe.textContent = "";
    return;
  }
  const value = payload.values_db[row * g.cols + col];
  probe.textContent =
    value === null
      ? `(${wx.toFixed(2)}, ${wy.toFixed(2)}) excluded`
      : `(${wx.toFixed(2)}, ${wy.toFixed(2)}) ${value.toFixed(2)} dB`;
}

// ---- sweep panel ----

async function runSweep(kind: "wall" | "txrx"): Promise<void> {
  state.sweepKind = kind;
  const distances =
    kind === "wall" ? [0.1, 0.5, 1.0, 1.5, 2.0, 2.5] : [0.5, 1.0, 2.0, 3.0, 4.0, 5.0];
  try {
    setNotice(`running ${kind} sweep...`);
    state.sweep = await api.postSweep(state.scenario, kind, distances);
    setNotice("");
    drawSweepPanel();
  } catch (err) {
    setNotice(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
  }
}

function drawSweepPanel(): void {
  if (!state.sweep) return;
  const current =
    state.sweepKind === "wall" ? wallTxDistance(state.scenario) : txRxDistance(state.scenario);
  sweepLayout = drawSweep(sweepCtx, state.sweep, current);
}

sweepCanvas.addEventListener("click", (ev) => {
  if (!state.sweep || !sweepLayout) return;
  const d = distanceAtCanvasX(sweepLayout, state.sweep, ev.offsetX);
  const outcome = applySweepDistance(state, history, state.sweepKind, d);
  if (!outcome.moved) {
    if (outcome.notice) setNotice(outcome.notice);
    return;
  }
  drawSweepPanel();
  scenarioChanged(false);
});

// ---- optimizer ----

el<HTMLButtonElement>("optimize").addEventListener("click", async () => {
  state.optimizer = { status: "running", progress: 0 };
  const bar = el<HTMLProgressElement>("optprogress");
  bar.style.display = "inline";
  try {
    const token = await api.startOptimize(state.scenario, {
      leakage_penalty: Number(el<HTMLInputElement>("penalty").value) || 0,
      min_wall_clearance_m: 0.25,
      step_m: 1.0,
    });
    for (;;) {
      const status = await api.pollOptimize(token);
      bar.value = status.progress;
      if (status.status === "error") {
        throw new Error(status.message ?? "optimization failed");
      }
      if (status.status === "done") {
        const result = status.result!;
        if (!result.feasible || !result.tx_m || !result.rx_m) {
          setNotice("no feasible placement");
          break;
        }
        moveDevice(state, history, "tx", result.tx_m);
        moveDevice(state, history, "rx", result.rx_m);
        setNotice(`optimized: indoor ${fmtArea(result.indoor_area_m2)}`);
        scenarioChanged(false);
        break;
      }
      await new Promise((resolve) => setTimeout(resolve, 400));
    }
    state.optimizer = { status: "done", progress: 1 };
  } catch (err) {
    state.optimizer = { status: "error", progress: 0, message: String(err) };
    setNotice(String(err));
  } finally {
    bar.style.display = "none";
  }
});

// ---- misc controls ----

el<HTMLButtonElement>("undo").addEventListener("click", () => {
  if (undo(state, history)) scenarioChanged(false);
});
el<HTMLButtonElement>("redo").addEventListener("click", () => {
  if (redo(state, history)) scenarioChanged(false);
});
el<HTMLButtonElement>("sweep-wall").addEventListener("click", () => void runSweep("wall"));
el<HTMLButtonElement>("sweep-txrx").addEventListener("click", () => void runSweep("txrx"));

el<HTMLButtonElement>("save").addEventListener("click", async () => {
  const name = el<HTMLInputElement>("scenario-name").value.trim() || "default";
  try {
    const saved = await api.putScenario(name, state.scenario);
    setNotice(`saved ${saved.name} (rev ${saved.revision})`);
  } catch (err) {
    setNotice(String(err));
  }
});

el<HTMLButtonElement>("load").addEventListener("click", async () => {
  const name = el<HTMLInputElement>("scenario-name").value.trim() || "default";
  try {
    const got = await api.getScenario(name);
    state.scenario = got.scenario;
    state.revision += 1;
    history.undo.length = 0;
    history.redo.length = 0;
    setNotice(`loaded ${got.name} (rev ${got.revision})`);
    scenarioChanged(false);
  } catch (err) {
    setNotice(String(err));
  }
});

// initial paint
draw();
scheduler.settle(state.revision);
