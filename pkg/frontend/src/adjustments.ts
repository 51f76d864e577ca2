/** Adjustment panel state: one pending per-effect or level edit. */

import type { AdjustmentMode, AdjustmentRequest, ForecastResponse } from "./types.js";

export class AdjustmentDraft {
  target = "level";
  mode: AdjustmentMode = "add";
  values: number[];
  author = "";
  note = "";

  constructor(public horizon: number) {
    this.values = new Array(horizon).fill(0);
  }

  setUniform(value: number): void {
    this.values = new Array(this.horizon).fill(value);
  }

  setStep(step: number, value: number): void {
    if (step < 0 || step >= this.horizon) {
      throw new Error(`step ${step} outside horizon ${this.horizon}`);
    }
    this.values[step] = value;
  }

  /** An all-zero additive or all-one multiplicative edit changes nothing. */
  get isNoop(): boolean {
    const neutral = this.mode === "add" ? 0 : 1;
    return this.values.every((v) => v === neutral);
  }

  reset(): void {
    this.values = new Array(this.horizon).fill(this.mode === "add" ? 0 : 1);
    this.note = "";
  }

  toRequest(fc: ForecastResponse): AdjustmentRequest {
    return {
      forecast_id: fc.id,
      series: fc.series,
      origin: fc.origin,
      adjustment: {
        target: this.target,
        mode: this.mode,
        values: [...this.values],
        author: this.author,
        note: this.note,
      },
    };
  }
}

/** Components that have been adjusted, for badge-marking in the chart. */
export function adjustedTargets(
  entries: { adjustment: { target: string } }[],
): Set<string> {
  return new Set(entries.map((e) => e.adjustment.target));
}
