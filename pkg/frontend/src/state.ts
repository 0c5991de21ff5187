/** View state: scenario revisions, payload staleness, tools, and history.
 *
 * Every physics number shown in the UI comes from a service payload; this
 * module only handles interaction geometry (snapping a dragged device back
 * into the room, translating the pair to set a wall distance) and the
 * revision bookkeeping that prevents stale paints.
 */

import type { FieldPayload, Pair, Scenario, SweepPayload } from "./types.js";

export type Tool = "move-tx" | "move-rx" | "move-wall" | "inspect";

export interface OptimizerStatus {
  status: "idle" | "running" | "done" | "error";
  progress: number;
  message?: string;
}

export interface ViewState {
  scenario: Scenario;
  /** Bumped on every scenario edit. */
  revision: number;
  payload: FieldPayload | null;
  /** Scenario revision the payload was computed for. */
  payloadRevision: number;
  /** True while the payload was computed on the coarse drag-preview grid. */
  payloadIsPreview: boolean;
  tool: Tool;
  sweep: SweepPayload | null;
  sweepKind: "wall" | "txrx";
  optimizer: OptimizerStatus;
}

export interface MoveOutcome {
  moved: boolean;
  snapped: boolean;
  notice?: string;
}

export const DEVICE_CLEARANCE_M = 0.05;
export const MIN_SEPARATION_M = 0.1;

export function createState(scenario: Scenario): ViewState {
  return {
    scenario,
    revision: 1,
    payload: null,
    payloadRevision: 0,
    payloadIsPreview: false,
    tool: "move-tx",
    sweep: null,
    sweepKind: "wall",
    optimizer: { status: "idle", progress: 0 },
  };
}

/** Stale = the shown payload belongs to an older scenario revision. */
export function isStale(state: ViewState): boolean {
  return state.payload !== null && state.payloadRevision !== state.revision;
}

/** Accept a compute result unless something newer already painted. */
export function acceptPayload(
  state: ViewState,
  payload: FieldPayload,
  forRevision: number,
  isPreview: boolean,
): boolean {
  if (forRevision < state.payloadRevision) {
    return false; // out-of-order response, drop
  }
  if (forRevision === state.payloadRevision && isPreview && !state.payloadIsPreview) {
    return false; // never replace a settled paint with a preview of the same revision
  }
  state.payload = payload;
  state.payloadRevision = forRevision;
  state.payloadIsPreview = isPreview;
  return true;
}

function cloneScenario(s: Scenario): Scenario {
  return JSON.parse(JSON.stringify(s)) as Scenario;
}

export function pointInPolygon(p: Pair, corners: Pair[]): boolean {
  let inside = false;
  for (let i = 0, j = corners.length - 1; i < corners.length; j = i++) {
    const [xi, yi] = corners[i];
    const [xj, yj] = corners[j];
    if (yi > p[1] !== yj > p[1]) {
      const xCross = xi + ((p[1] - yi) * (xj - xi)) / (yj - yi);
      if (p[0] < xCross) inside = !inside;
    }
  }
  return inside;
}

function bbox(corners: Pair[]): [number, number, number, number] {
  const xs = corners.map((c) => c[0]);
  const ys = corners.map((c) => c[1]);
  return [Math.min(...xs), Math.min(...ys), Math.max(...xs), Math.max(...ys)];
}

/** Clamp a dragged position into the room with clearance from its bbox. */
export function snapIntoRoom(pos: Pair, corners: Pair[], clearance: number): Pair | null {
  const [minX, minY, maxX, maxY] = bbox(corners);
  const snapped: Pair = [
    Math.min(maxX - clearance, Math.max(minX + clearance, pos[0])),
    Math.min(maxY - clearance, Math.max(minY + clearance, pos[1])),
  ];
  return pointInPolygon(snapped, corners) ? snapped : null;
}

export interface History {
  undo: Scenario[];
  redo: Scenario[];
}

export function createHistory(): History {
  return { undo: [], redo: [] };
}

function commitScenario(state: ViewState, history: History, next: Scenario): void {
  history.undo.push(cloneScenario(state.scenario));
  history.redo.length = 0;
  state.scenario = next;
  state.revision += 1;
}

export function moveDevice(
  state: ViewState,
  history: History,
  which: "tx" | "rx",
  pos: Pair,
): MoveOutcome {
  const corners = state.scenario.room.corners_m;
  const snapped = snapIntoRoom(pos, corners, DEVICE_CLEARANCE_M);
  if (snapped === null) {
    return { moved: false, snapped: false, notice: "position is outside the room" };
  }
  const other: Pair =
    which === "tx" ? state.scenario.placement.rx_m : state.scenario.placement.tx_m;
  if (Math.hypot(snapped[0] - other[0], snapped[1] - other[1]) < MIN_SEPARATION_M) {
    return { moved: false, snapped: false, notice: "devices must not coincide" };
  }
  const next = cloneScenario(state.scenario);
  if (which === "tx") {
    next.placement.tx_m = snapped;
  } else {
    next.placement.rx_m = snapped;
  }
  commitScenario(state, history, next);
  const wasSnapped = snapped[0] !== pos[0] || snapped[1] !== pos[1];
  return { moved: true, snapped: wasSnapped, notice: wasSnapped ? "snapped into the room" : undefined };
}

/** Inward unit normal of the reflective wall (room assumed on that side). */
export function reflectiveWallNormal(scenario: Scenario): { a: Pair; b: Pair; n: Pair } {
  const corners = scenario.room.corners_m;
  const i = scenario.room.reflective_wall_index;
  const a = corners[i];
  const b = corners[(i + 1) % corners.length];
  const len = Math.hypot(b[0] - a[0], b[1] - a[1]);
  let n: Pair = [-(b[1] - a[1]) / len, (b[0] - a[0]) / len];
  // orient toward the polygon centroid
  const cx = corners.reduce((s, c) => s + c[0], 0) / corners.length;
  const cy = corners.reduce((s, c) => s + c[1], 0) / corners.length;
  if ((cx - a[0]) * n[0] + (cy - a[1]) * n[1] < 0) {
    n = [-n[0], -n[1]];
  }
  return { a, b, n };
}

export function wallTxDistance(scenario: Scenario): number {
  const { a, n } = reflectiveWallNormal(scenario);
  const tx = scenario.placement.tx_m;
  return (tx[0] - a[0]) * n[0] + (tx[1] - a[1]) * n[1];
}

export function txRxDistance(scenario: Scenario): number {
  const { tx_m, rx_m } = scenario.placement;
  return Math.hypot(rx_m[0] - tx_m[0], rx_m[1] - tx_m[1]);
}

/** Set the wall-Tx distance by sliding both devices along the wall normal
 * (the room stays fixed; dragging the wall is expressed as the dual move). */
export function setWallDistance(
  state: ViewState,
  history: History,
  distance: number,
): MoveOutcome {
  const scenario = state.scenario;
  const { a, n } = reflectiveWallNormal(scenario);
  const current = wallTxDistance(scenario);
  const delta = distance - current;
  const move = (p: Pair): Pair => [p[0] + delta * n[0], p[1] + delta * n[1]];
  const tx = move(scenario.placement.tx_m);
  const rx = move(scenario.placement.rx_m);
  const corners = scenario.room.corners_m;
  if (!pointInPolygon(tx, corners) || !pointInPolygon(rx, corners)) {
    return { moved: false, snapped: false, notice: "that wall distance pushes a device outside" };
  }
  const next = cloneScenario(scenario);
  next.placement.tx_m = tx;
  next.placement.rx_m = rx;
  commitScenario(state, history, next);
  return { moved: true, snapped: false };
}

/** Apply a clicked sweep distance to the scenario. */
export function applySweepDistance(
  state: ViewState,
  history: History,
  kind: "wall" | "txrx",
  distance: number,
): MoveOutcome {
  if (kind === "wall") {
    return setWallDistance(state, history, distance);
  }
  const scenario = state.scenario;
  const { tx_m, rx_m } = scenario.placement;
  const sep = txRxDistance(scenario);
  const u: Pair = [(rx_m[0] - tx_m[0]) / sep, (rx_m[1] - tx_m[1]) / sep];
  const rx: Pair = [tx_m[0] + distance * u[0], tx_m[1] + distance * u[1]];
  if (!pointInPolygon(rx, scenario.room.corners_m)) {
    return { moved: false, snapped: false, notice: "that separation pushes the Rx outside" };
  }
  const next = cloneScenario(scenario);
  next.placement.rx_m = rx;
  commitScenario(state, history, next);
  return { moved: true, snapped: false };
}

export function undo(state: ViewState, history: History): boolean {
  const prev = history.undo.pop();
  if (prev === undefined) return false;
  history.redo.push(cloneScenario(state.scenario));
  state.scenario = prev;
  state.revision += 1;
  return true;
}

export function redo(state: ViewState, history: History): boolean {
  const next = history.redo.pop();
  if (next === undefined) return false;
  history.undo.push(cloneScenario(state.scenario));
  state.scenario = next;
  state.revision += 1;
  return true;
}
