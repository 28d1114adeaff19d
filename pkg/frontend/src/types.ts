// Wire formats of the payoffdesign service; must stay in lockstep with the
// server's JSON schemas (these shapes double as the CLI config format).

export interface GridSpec {
  lo: number;
  hi: number;
  n: number;
  spacing: "linear" | "log";
}

export interface LognormalParams {
  mu: number;
  sigma: number;
}

export interface MarketSpec {
  family: "lognormal" | "normal";
  params: LognormalParams;
}

export type ViewSpec =
  | { type: "vol"; target_sigma: number }
  | { type: "ratio"; believed: MarketSpec }
  | { type: "table"; x: number[]; values: number[] }
  | { type: "window"; a: number; b: number; of: ViewSpec };

export type RiskSpec =
  | number
  | { kind: "constant"; R: number }
  | { kind: "affine"; intercept: number; slope: number };

export interface DesignRequest {
  grid: GridSpec;
  market: MarketSpec;
  views: ViewSpec[];
  risk: RiskSpec;
}

export interface Diagnostics {
  budget_residual: number;
  growth_rate: number;
  kl_b_m: number;
  r_profile: string;
}

export interface DesignResponse {
  x: number[];
  f: number[];
  F: number[];
  b: number[];
  m: number[];
  diagnostics: Diagnostics;
}

export interface ApiError {
  error: string;
  detail: string;
}
