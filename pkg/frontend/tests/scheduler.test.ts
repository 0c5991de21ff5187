import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { RecomputeScheduler, SETTLE_DEBOUNCE_MS, debounce } from "../src/scheduler.js";

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("debounce", () => {
  it("fires once on the trailing edge", () => {
    const calls: number[] = [];
    const fn = debounce((v: number) => calls.push(v), 150);
    fn(1);
    fn(2);
    vi.advanceTimersByTime(149);
    expect(calls).toEqual([]);
    fn(3);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual([3]);
  });
});

describe("RecomputeScheduler", () => {
  it("debounces settles at 150 ms and keeps the newest revision", () => {
    const runs: { revision: number; kind: string }[] = [];
    const sched = new RecomputeScheduler((req) => runs.push(req));
    sched.settle(1);
    sched.settle(2);
    sched.settle(3);
    vi.advanceTimersByTime(SETTLE_DEBOUNCE_MS);
    expect(runs).toEqual([{ revision: 3, kind: "settle" }]);
  });

  it("previews fire immediately, old revisions never run after newer ones", () => {
    const runs: { revision: number; kind: string }[] = [];
    const sched = new RecomputeScheduler((req) => runs.push(req));
    sched.preview(4);
    sched.preview(5);
    sched.preview(4); // stale drag event arriving late
    expect(runs.map((r) => r.revision)).toEqual([4, 5]);
    sched.settle(5);
    vi.advanceTimersByTime(SETTLE_DEBOUNCE_MS);
    expect(runs[runs.length - 1]).toEqual({ revision: 5, kind: "settle" });
  });
});
