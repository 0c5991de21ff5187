/** Fixed diverging color scale anchored at the coverage threshold.
 *
 * Documented mapping (the probe tests verify it pixel-exactly):
 *  - The scale spans [threshold - 20 dB, threshold + 20 dB].
 *  - Values below the threshold quantize onto 128 cool levels
 *    (deep blue -> pale blue), indices 0..127.
 *  - Values at or above the threshold quantize onto 128 warm levels
 *    (yellow -> deep red), indices 128..255, so "covered" reads as a
 *    binary warm/cool split at a glance.
 *  - Every level has a unique RGB triple, so a rendered pixel maps back
 *    to its quantized dB bin exactly (see colorToLevel / levelToDbBounds).
 *  - Excluded cells (null) use a reserved dark gray outside both ramps.
 */

export const SCALE_SPAN_DB = 20;
export const LEVELS_PER_SIDE = 128;

export type Rgba = [number, number, number, number];

export const EXCLUDED_COLOR: Rgba = [24, 24, 28, 255];

const COOL_FROM = [8, 18, 76] as const;
const COOL_TO = [150, 200, 235] as const;
const WARM_FROM = [255, 214, 10] as const;
const WARM_TO = [208, 0, 0] as const;

function lerpChannel(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

/** Color of one quantized level (0..255). */
export function levelColor(level: number): Rgba {
  if (level < 0 || level > 2 * LEVELS_PER_SIDE - 1 || !Number.isInteger(level)) {
    throw new RangeError(`level out of range: ${level}`);
  }
  if (level < LEVELS_PER_SIDE) {
    const t = level / (LEVELS_PER_SIDE - 1);
    return [
      lerpChannel(COOL_FROM[0], COOL_TO[0], t),
      lerpChannel(COOL_FROM[1], COOL_TO[1], t),
      lerpChannel(COOL_FROM[2], COOL_TO[2], t),
      255,
    ];
  }
  const t = (level - LEVELS_PER_SIDE) / (LEVELS_PER_SIDE - 1);
  return [
    lerpChannel(WARM_FROM[0], WARM_TO[0], t),
    lerpChannel(WARM_FROM[1], WARM_TO[1], t),
    lerpChannel(WARM_FROM[2], WARM_TO[2], t),
    255,
  ];
}

/** Quantized level of a dB value: 0..127 below threshold, 128..255 at/above. */
export function quantize(db: number, thresholdDb: number): number {
  if (db < thresholdDb) {
    const t = (db - (thresholdDb - SCALE_SPAN_DB)) / SCALE_SPAN_DB;
    const idx = Math.floor(t * LEVELS_PER_SIDE);
    return Math.max(0, Math.min(LEVELS_PER_SIDE - 1, idx));
  }
  const t = (db - thresholdDb) / SCALE_SPAN_DB;
  const idx = Math.floor(t * LEVELS_PER_SIDE);
  return LEVELS_PER_SIDE + Math.max(0, Math.min(LEVELS_PER_SIDE - 1, idx));
}

export function dbToColor(db: number | null, thresholdDb: number): Rgba {
  if (db === null || !Number.isFinite(db)) {
    return [...EXCLUDED_COLOR] as Rgba;
  }
  return levelColor(quantize(db, thresholdDb));
}

/** dB interval covered by a level; the outermost bins absorb the clamp. */
export function levelToDbBounds(level: number, thresholdDb: number): [number, number] {
  if (level < LEVELS_PER_SIDE) {
    const lo = thresholdDb - SCALE_SPAN_DB + (level / LEVELS_PER_SIDE) * SCALE_SPAN_DB;
    const hi = thresholdDb - SCALE_SPAN_DB + ((level + 1) / LEVELS_PER_SIDE) * SCALE_SPAN_DB;
    return [level === 0 ? -Infinity : lo, hi];
  }
  const k = level - LEVELS_PER_SIDE;
  const lo = thresholdDb + (k / LEVELS_PER_SIDE) * SCALE_SPAN_DB;
  const hi = thresholdDb + ((k + 1) / LEVELS_PER_SIDE) * SCALE_SPAN_DB;
  return [lo, level === 2 * LEVELS_PER_SIDE - 1 ? Infinity : hi];
}

const packed = (r: number, g: number, b: number) => (r << 16) | (g << 8) | b;

let inverse: Map<number, number> | null = null;

/** Exact inverse of levelColor; null for colors outside the scale. */
export function colorToLevel(r: number, g: number, b: number): number | null {
  if (inverse === null) {
    inverse = new Map();
    for (let level = 0; level < 2 * LEVELS_PER_SIDE; level++) {
      const [cr, cg, cb] = levelColor(level);
      inverse.set(packed(cr, cg, cb), level);
    }
    if (inverse.size !== 2 * LEVELS_PER_SIDE) {
      throw new Error("color scale levels are not unique");
    }
  }
  const hit = inverse.get(packed(r, g, b));
  return hit === undefined ? null : hit;
}
