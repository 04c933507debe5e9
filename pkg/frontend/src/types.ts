// Shapes mirrored from the control service JSON.

export interface Sample {
  time_s: number;
  position_mm: number;
  delta_L_um: number;
  theta_deg: number;
  i1: number;
  i2: number;
}

export interface LabState {
  position_mm: number;
  table_rotation_deg: number;
  theta_deg: number;
  delta_L_um: number;
  i1: number;
  i2: number;
  time_s: number;
  laser: string;
  scan_active: boolean;
  travel_mm: number;
}

export interface ControlRequest {
  position_mm?: number;
  table_rotation_deg?: number;
  laser?: string;
}

export interface ScanRequest {
  s_start_mm: number;
  s_end_mm: number;
  speed_mm_per_s: number;
  sample_rate_hz: number;
}

export interface BeamlineChain {
  splitter_ratio: number;
  gain1: number;
  gain2: number;
  dark1: number;
  dark2: number;
}

export const DEFAULT_CHAIN: BeamlineChain = {
  splitter_ratio: 0.5,
  gain1: 1,
  gain2: 1,
  dark1: 0,
  dark2: 0,
};
