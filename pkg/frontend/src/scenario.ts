/** Scenario draft state: pending covariate overrides plus explored history. */

import type { ForecastResponse, OverrideDraft, ScenarioRequest } from "./types.js";

export interface ExploredScenario {
  label: string;
  overrides: OverrideDraft[];
  response: ForecastResponse;
}

export class ScenarioDraft {
  private overrides = new Map<string, OverrideDraft>();
  private _dirty = false;
  lastResponse: ForecastResponse | null = null;
  history: ExploredScenario[] = [];

  constructor(
    public series: string,
    public origin: string,
  ) {}

  private key(covariate: string, step: number): string {
    return `${covariate}@${step}`;
  }

  get dirty(): boolean {
    return this._dirty;
  }

  get isEmpty(): boolean {
    return this.overrides.size === 0;
  }

  setOverride(covariate: string, step: number, value: number): void {
    this.overrides.set(this.key(covariate, step), { covariate, step, value });
    this._dirty = true;
  }

  removeOverride(covariate: string, step: number): void {
    if (this.overrides.delete(this.key(covariate, step))) {
      this._dirty = true;
    }
  }

  getOverride(covariate: string, step: number): OverrideDraft | undefined {
    return this.overrides.get(this.key(covariate, step));
  }

  listOverrides(): OverrideDraft[] {
    return [...this.overrides.values()].sort(
      (a, b) => a.covariate.localeCompare(b.covariate) || a.step - b.step,
    );
  }

  revertAll(): void {
    this.overrides.clear();
    this._dirty = true;
  }

  toRequest(): ScenarioRequest {
    return {
      series: this.series,
      origin: this.origin,
      overrides: this.listOverrides(),
    };
  }

  recordResponse(response: ForecastResponse, label?: string): void {
    this.lastResponse = response;
    this._dirty = false;
    this.history.push({
      label: label ?? `scenario ${this.history.length + 1}`,
      overrides: this.listOverrides(),
      response,
    });
  }
}

/** Per-step deltas between two explored scenarios, for the compare overlay. */
export function scenarioDeltas(
  a: ForecastResponse,
  b: ForecastResponse,
): number[] {
  const out: number[] = [];
  for (let t = 0; t < Math.min(a.horizon, b.horizon); t++) {
    out.push(b.prediction[t] - a.prediction[t]);
  }
  return out;
}
