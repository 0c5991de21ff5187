/** Field payload -> RGBA raster, one pixel per grid cell.
 *
 * The raster's top pixel row is the grid's top row (row index rows-1),
 * matching canvas orientation.  All pixel values come from the payload
 * through the documented color scale; nothing is recomputed locally.
 */

import { dbToColor } from "./colorscale.js";
import type { FieldPayload } from "./types.js";

export class RenderError extends Error {}

export interface Raster {
  width: number;
  height: number;
  pixels: Uint8ClampedArray; // RGBA, row-major from the top
}

export function cellIndexForPixel(payload: FieldPayload, px: number, py: number): number {
  const { rows, cols } = payload.grid;
  if (px < 0 || px >= cols || py < 0 || py >= rows) {
    throw new RenderError(`pixel (${px}, ${py}) outside ${cols}x${rows} raster`);
  }
  const gridRow = rows - 1 - py;
  return gridRow * cols + px;
}

export function renderFieldRaster(payload: FieldPayload): Raster {
  const { rows, cols } = payload.grid;
  if (!Number.isInteger(rows) || !Number.isInteger(cols) || rows <= 0 || cols <= 0) {
    throw new RenderError(`bad grid metadata: ${cols}x${rows}`);
  }
  if (payload.values_db.length !== rows * cols) {
    throw new RenderError(
      `grid metadata mismatch: ${rows * cols} cells declared, ` +
        `${payload.values_db.length} values supplied`,
    );
  }
  const pixels = new Uint8ClampedArray(rows * cols * 4);
  for (let py = 0; py < rows; py++) {
    for (let px = 0; px < cols; px++) {
      const value = payload.values_db[cellIndexForPixel(payload, px, py)];
      const [r, g, b, a] = dbToColor(value, payload.threshold_db);
      const o = (py * cols + px) * 4;
      pixels[o] = r;
      pixels[o + 1] = g;
      pixels[o + 2] = b;
      pixels[o + 3] = a;
    }
  }
  return { width: cols, height: rows, pixels };
}

export function pixelColor(raster: Raster, px: number, py: number): [number, number, number, number] {
  const o = (py * raster.width + px) * 4;
  return [raster.pixels[o], raster.pixels[o + 1], raster.pixels[o + 2], raster.pixels[o + 3]];
}
