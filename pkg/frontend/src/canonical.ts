/** Built-in default scenario, identical to the engine's bundled one. */

import type { Scenario } from "./types.js";

export function canonicalScenario(): Scenario {
  return {
    schema_version: 1,
    room: {
      corners_m: [
        [0.0, 0.0],
        [7.0, 0.0],
        [7.0, 6.0],
        [0.0, 6.0],
      ],
      reflective_wall_index: 3,
    },
    placement: { tx_m: [0.5, 3.0], rx_m: [3.5, 3.0] },
    rf: {
      ptx_w: 1.0,
      gain_tx: 1.0,
      gain_rx: 1.0,
      wavelength_m: 0.06,
      rcs_m2: 1.0,
      wall_reflection: 0.3,
      interference_gamma: 0.001,
      interference_floor_w: 1e-12,
    },
    grid: { origin_m: [-2.0, 0.0], width_m: 9.0, height_m: 6.0, resolution_m: 0.05 },
    threshold_db: 2.0,
    model: "simplified",
    scale: 1.0,
    exclusion_radius_m: 0.1,
  };
}
