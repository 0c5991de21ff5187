/** Wire types mirroring the planning service JSON payloads. */

export type Pair = [number, number];

export interface GridMeta {
  origin_m: Pair;
  width_m: number;
  height_m: number;
  resolution_m: number;
  rows: number;
  cols: number;
}

export interface FieldPayload {
  grid: GridMeta;
  threshold_db: number;
  /** Row-major dB values, row 0 at the bottom; null = excluded cell. */
  values_db: (number | null)[];
  contours: Pair[][];
  indoor_area_m2: number;
  leakage_area_m2: number | null;
  covered_area_m2: number;
  component_count: number;
  topology: string;
  tx_m: Pair;
  rx_m: Pair;
  reflective_wall: { a_m: Pair; b_m: Pair };
  room_corners_m: Pair[];
}

export interface SweepPayload {
  kind: "wall" | "txrx";
  distances_m: number[];
  indoor_area_m2: number[];
  leakage_area_m2: (number | null)[];
  component_count: number[];
  skipped: { distance_m: number; reason: string }[];
}

export interface OptimizeResultPayload {
  feasible: boolean;
  tx_m?: Pair;
  rx_m?: Pair;
  objective?: number;
  indoor_area_m2?: number;
  leakage_area_m2?: number | null;
  component_count?: number;
  topology?: string;
  candidates_evaluated?: number;
}

export interface OptimizeStatusPayload {
  status: "running" | "done" | "error";
  progress: number;
  result?: OptimizeResultPayload;
  message?: string;
}

export interface Scenario {
  schema_version: number;
  room: { corners_m: Pair[]; reflective_wall_index: number };
  placement: { tx_m: Pair; rx_m: Pair };
  rf: {
    ptx_w: number;
    gain_tx: number;
    gain_rx: number;
    wavelength_m: number;
    rcs_m2: number;
    wall_reflection: number;
    interference_gamma: number;
    interference_floor_w: number;
  };
  grid: { origin_m: Pair; width_m: number; height_m: number; resolution_m: number };
  threshold_db: number;
  model: "simplified" | "full";
  scale: number;
  exclusion_radius_m: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field_path?: string;
}
