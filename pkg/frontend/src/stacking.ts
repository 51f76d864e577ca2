/**
 * Pure stacking math for the decomposition chart.
 *
 * The client never computes forecast numbers itself; the one exception is
 * the display-time stacked total, recomputed here purely as a consistency
 * check against the service's prediction.
 */

import type { ForecastResponse } from "./types.js";

export interface BarSegment {
  covariate: string;
  /** lower y of the segment */
  start: number;
  /** upper y of the segment */
  end: number;
  value: number;
}

export interface StepStack {
  step: number;
  level: number;
  segments: BarSegment[];
  /** level plus all effects, recomputed client-side */
  clientTotal: number;
  serverPrediction: number;
  truncated: number;
  actual: number | null;
}

/**
 * Positive effects stack upward from the level, negative ones downward,
 * in hierarchy order. Zero effects produce no segment (but their covariate
 * stays in the legend).
 */
export function stackDecomposition(fc: ForecastResponse): StepStack[] {
  const steps: StepStack[] = [];
  for (let t = 0; t < fc.horizon; t++) {
    const level = fc.level[t];
    let up = level;
    let down = level;
    let total = level;
    const segments: BarSegment[] = [];
    for (const name of fc.covariates) {
      const v = fc.effects[name][t];
      total += v;
      if (v > 0) {
        segments.push({ covariate: name, start: up, end: up + v, value: v });
        up += v;
      } else if (v < 0) {
        segments.push({ covariate: name, start: down + v, end: down, value: v });
        down += v;
      }
    }
    steps.push({
      step: t,
      level,
      segments,
      clientTotal: total,
      serverPrediction: fc.prediction[t],
      truncated: fc.truncated_prediction[t],
      actual: fc.actuals ? fc.actuals[t] : null,
    });
  }
  return steps;
}

/** Max relative disagreement between the client-side sum and the server. */
export function consistencyError(fc: ForecastResponse): number {
  let worst = 0;
  for (const s of stackDecomposition(fc)) {
    const denom = Math.max(1, Math.abs(s.serverPrediction));
    worst = Math.max(worst, Math.abs(s.clientTotal - s.serverPrediction) / denom);
  }
  return worst;
}

/** Steps where the untruncated prediction dips below zero (hatched region). */
export function truncatedSteps(fc: ForecastResponse): number[] {
  const out: number[] = [];
  for (let t = 0; t < fc.horizon; t++) {
    if (fc.prediction[t] < 0) out.push(t);
  }
  return out;
}

export interface ChartExtent {
  min: number;
  max: number;
}

/** Value range covering bars, lines, and actuals, padded for display. */
export function chartExtent(stacks: StepStack[]): ChartExtent {
  let min = 0;
  let max = 0;
  for (const s of stacks) {
    min = Math.min(min, s.level, s.clientTotal, s.actual ?? 0);
    max = Math.max(max, s.level, s.clientTotal, s.actual ?? 0);
    for (const seg of s.segments) {
      min = Math.min(min, seg.start);
      max = Math.max(max, seg.end);
    }
  }
  const pad = 0.06 * (max - min || 1);
  return { min: min - pad, max: max + pad };
}
