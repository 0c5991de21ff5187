/** Debounced, latest-wins recompute scheduling.
 *
 * During a drag the preview (coarse grid) recompute fires on the trailing
 * edge of a short debounce window; on drag end the settle (full grid)
 * recompute is issued 150 ms after the last movement.  Responses carry the
 * scenario revision they were computed for, and the state layer drops
 * anything older than what is already painted, so newer requests always
 * win regardless of network ordering.
 */

export const SETTLE_DEBOUNCE_MS = 150;
export const PREVIEW_RESOLUTION_M = 0.15;
export const SETTLE_RESOLUTION_M = 0.05;

export type ComputeKind = "preview" | "settle";

export interface ComputeRequest {
  revision: number;
  kind: ComputeKind;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  setTimer = globalThis.setTimeout,
  clearTimer = globalThis.clearTimeout,
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) clearTimer(handle);
    handle = setTimer(() => {
      handle = undefined;
      fn(...args);
    }, waitMs);
  };
}

export class RecomputeScheduler {
  private issued = 0;

  private readonly settleLater: (revision: number) => void;

  constructor(private readonly run: (req: ComputeRequest) => void, debounceMs = SETTLE_DEBOUNCE_MS) {
    this.settleLater = debounce((revision: number) => {
      this.issue({ revision, kind: "settle" });
    }, debounceMs);
  }

  /** Coarse recompute while dragging; fires immediately but never reorders. */
  preview(revision: number): void {
    this.issue({ revision, kind: "preview" });
  }

  /** Full-resolution recompute, debounced after the last call. */
  settle(revision: number): void {
    this.settleLater(revision);
  }

  private issue(req: ComputeRequest): void {
    if (req.revision < this.issued) return; // an older scenario state, skip
    this.issued = req.revision;
    this.run(req);
  }
}
