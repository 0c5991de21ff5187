import { describe, expect, it } from "vitest";

import { canonicalScenario } from "../src/canonical.js";
import {
  acceptPayload,
  applySweepDistance,
  createHistory,
  createState,
  isStale,
  moveDevice,
  redo,
  setWallDistance,
  snapIntoRoom,
  txRxDistance,
  undo,
  wallTxDistance,
} from "../src/state.js";
import type { FieldPayload } from "../src/types.js";

function fakePayload(indoor: number): FieldPayload {
  return {
    grid: { origin_m: [0, 0], width_m: 1, height_m: 1, resolution_m: 1, rows: 1, cols: 1 },
    threshold_db: 2,
    values_db: [0],
    contours: [],
    indoor_area_m2: indoor,
    leakage_area_m2: 0,
    covered_area_m2: indoor,
    component_count: 1,
    topology: "single-region",
    tx_m: [0.5, 3],
    rx_m: [3.5, 3],
    reflective_wall: { a_m: [0, 6], b_m: [0, 0] },
    room_corners_m: [
      [0, 0],
      [7, 0],
      [7, 6],
      [0, 6],
    ],
  };
}

describe("derived distances", () => {
  it("reads the canonical geometry", () => {
    const s = createState(canonicalScenario());
    expect(wallTxDistance(s.scenario)).toBeCloseTo(0.5, 12);
    expect(txRxDistance(s.scenario)).toBeCloseTo(3.0, 12);
  });
});

describe("moveDevice", () => {
  it("moves and records history", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    const out = moveDevice(s, h, "tx", [1.0, 2.0]);
    expect(out.moved).toBe(true);
    expect(s.scenario.placement.tx_m).toEqual([1.0, 2.0]);
    expect(s.revision).toBe(2);
    expect(h.undo.length).toBe(1);
  });

  it("snaps an outside drop back into the room with a notice", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    const out = moveDevice(s, h, "rx", [9.5, 3.0]);
    expect(out.moved).toBe(true);
    expect(out.snapped).toBe(true);
    expect(s.scenario.placement.rx_m[0]).toBeLessThan(7);
  });

  it("rejects dropping one device onto the other", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    const out = moveDevice(s, h, "tx", s.scenario.placement.rx_m);
    expect(out.moved).toBe(false);
    expect(out.notice).toMatch(/coincide/);
    expect(s.revision).toBe(1);
  });
});

describe("undo/redo", () => {
  it("restores the previous scenario exactly", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    const before = JSON.stringify(s.scenario);
    moveDevice(s, h, "tx", [1.2, 2.2]);
    moveDevice(s, h, "tx", [2.2, 2.4]);
    expect(undo(s, h)).toBe(true);
    expect(s.scenario.placement.tx_m).toEqual([1.2, 2.2]);
    expect(undo(s, h)).toBe(true);
    expect(JSON.stringify(s.scenario)).toBe(before);
    expect(undo(s, h)).toBe(false);
    expect(redo(s, h)).toBe(true);
    expect(s.scenario.placement.tx_m).toEqual([1.2, 2.2]);
  });

  it("every undo/redo bumps the revision (forces recompute)", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    moveDevice(s, h, "tx", [1.2, 2.2]);
    const r = s.revision;
    undo(s, h);
    expect(s.revision).toBe(r + 1);
  });
});

describe("payload acceptance and staleness", () => {
  it("flags stale when the scenario moved on", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    expect(acceptPayload(s, fakePayload(5), s.revision, false)).toBe(true);
    expect(isStale(s)).toBe(false);
    moveDevice(s, h, "tx", [1.5, 2.0]);
    expect(isStale(s)).toBe(true);
  });

  it("drops out-of-order responses", () => {
    const s = createState(canonicalScenario());
    acceptPayload(s, fakePayload(5), 3, false);
    expect(acceptPayload(s, fakePayload(4), 2, false)).toBe(false);
    expect(s.payload!.indoor_area_m2).toBe(5);
  });

  it("never replaces a settled paint with a preview of the same revision", () => {
    const s = createState(canonicalScenario());
    acceptPayload(s, fakePayload(5), 2, false);
    expect(acceptPayload(s, fakePayload(4), 2, true)).toBe(false);
    expect(acceptPayload(s, fakePayload(6), 3, true)).toBe(true);
  });
});

describe("wall distance and sweep application", () => {
  it("slides both devices together", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    const sep = txRxDistance(s.scenario);
    const out = setWallDistance(s, h, 2.0);
    expect(out.moved).toBe(true);
    expect(wallTxDistance(s.scenario)).toBeCloseTo(2.0, 12);
    expect(txRxDistance(s.scenario)).toBeCloseTo(sep, 12);
  });

  it("refuses distances that push a device outside", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    const out = setWallDistance(s, h, 5.0); // rx would pass x = 7
    expect(out.moved).toBe(false);
  });

  it("applies a clicked txrx sweep distance exactly", () => {
    const s = createState(canonicalScenario());
    const h = createHistory();
    const out = applySweepDistance(s, h, "txrx", 2.0);
    expect(out.moved).toBe(true);
    expect(txRxDistance(s.scenario)).toBeCloseTo(2.0, 12);
    // the rx moved along the original axis
    expect(s.scenario.placement.rx_m[1]).toBeCloseTo(3.0, 12);
  });
});

describe("snapIntoRoom", () => {
  it("clamps into the bounding box with clearance", () => {
    const corners: [number, number][] = [
      [0, 0],
      [7, 0],
      [7, 6],
      [0, 6],
    ];
    expect(snapIntoRoom([8, 3], corners, 0.05)).toEqual([6.95, 3]);
    expect(snapIntoRoom([-2, -2], corners, 0.05)).toEqual([0.05, 0.05]);
    expect(snapIntoRoom([3, 3], corners, 0.05)).toEqual([3, 3]);
  });
});
