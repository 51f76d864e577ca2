/** Wire types for the versioned forecast-service JSON API. */

export interface CovariateInfo {
  name: string;
  kind: "causal" | "non_causal" | "static" | "past";
  cardinality: number | null;
  hierarchy_rank: number | null;
}

export interface MetaResponse {
  v: number;
  snapshot: string;
  hierarchy: string[];
  horizon: number;
  history_length: number;
  embedding_size: number;
  covariates: CovariateInfo[];
}

export interface SeriesInfo {
  series: string;
  first_origin: string;
  last_origin: string;
}

export interface SeriesResponse {
  v: number;
  series: SeriesInfo[];
}

export interface ForecastResponse {
  v: number;
  id: string;
  series: string;
  origin: string;
  horizon: number;
  covariates: string[];
  level: number[];
  effects: Record<string, number[]>;
  coefficients: Record<string, number[][]>;
  prediction: number[];
  truncated_prediction: number[];
  actuals: number[] | null;
  raw_causal?: Record<string, number[]>;
  n_adjustments?: number;
}

export interface OverrideDraft {
  covariate: string;
  step: number;
  value: number;
}

export interface ScenarioRequest {
  series: string;
  origin: string;
  overrides: OverrideDraft[];
}

export type AdjustmentMode = "add" | "multiply";

export interface AdjustmentRequest {
  forecast_id: string;
  series: string;
  origin: string;
  adjustment: {
    target: string;
    mode: AdjustmentMode;
    values: number[];
    author?: string;
    note?: string;
  };
}

export interface AdjustmentEntry {
  forecast_id: string;
  adjustment: {
    target: string;
    mode: AdjustmentMode;
    values: number[];
    author: string;
    note: string;
    timestamp: string;
  };
}

export interface ErrorBody {
  v: number;
  error: { class: string; message: string };
}
