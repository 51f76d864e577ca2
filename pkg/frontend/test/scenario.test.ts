import { describe, expect, it } from "vitest";

import { AdjustmentDraft, adjustedTargets } from "../src/adjustments.js";
import { ScenarioDraft, scenarioDeltas } from "../src/scenario.js";
import type { ForecastResponse } from "../src/types.js";

describe("ScenarioDraft", () => {
  it("starts empty and submitting empty is representable as a no-op", () => {
    const draft = new ScenarioDraft("P0/S0", "2024-03-01");
    expect(draft.isEmpty).toBe(true);
    expect(draft.toRequest()).toEqual({
      series: "P0/S0",
      origin: "2024-03-01",
      overrides: [],
    });
  });

  it("tracks overrides with replacement and removal", () => {
    const draft = new ScenarioDraft("P0/S0", "2024-03-01");
    draft.setOverride("promotion", 3, 1);
    draft.setOverride("promotion", 3, 0); // replaces, not appends
    draft.setOverride("relative_price", 1, 0.05);
    expect(draft.listOverrides()).toHaveLength(2);
    draft.removeOverride("promotion", 3);
    expect(draft.listOverrides()).toEqual([
      { covariate: "relative_price", step: 1, value: 0.05 },
    ]);
    expect(draft.dirty).toBe(true);
  });

  it("revertAll clears every override", () => {
    const draft = new ScenarioDraft("P0/S0", "2024-03-01");
    draft.setOverride("promotion", 3, 1);
    draft.setOverride("holiday", 2, 1);
    draft.revertAll();
    expect(draft.isEmpty).toBe(true);
  });

  it("keeps explored scenario history for comparison", () => {
    const draft = new ScenarioDraft("P0/S0", "2024-03-01");
    const fake = (p: number[]): ForecastResponse =>
      ({ prediction: p, horizon: p.length } as unknown as ForecastResponse);
    draft.recordResponse(fake([1, 2, 3]));
    draft.recordResponse(fake([2, 2, 5]));
    expect(draft.history).toHaveLength(2);
    expect(
      scenarioDeltas(draft.history[0].response, draft.history[1].response),
    ).toEqual([1, 0, 2]);
  });
});

describe("AdjustmentDraft", () => {
  it("detects no-ops per mode", () => {
    const add = new AdjustmentDraft(3);
    expect(add.isNoop).toBe(true);
    add.setStep(1, 2);
    expect(add.isNoop).toBe(false);

    const mult = new AdjustmentDraft(3);
    mult.mode = "multiply";
    mult.setUniform(1);
    expect(mult.isNoop).toBe(true);
    mult.setUniform(1.1);
    expect(mult.isNoop).toBe(false);
  });

  it("rejects out-of-horizon steps", () => {
    const draft = new AdjustmentDraft(3);
    expect(() => draft.setStep(3, 1)).toThrow();
  });

  it("builds the request against a forecast", () => {
    const draft = new AdjustmentDraft(2);
    draft.target = "promotion";
    draft.mode = "multiply";
    draft.values = [1.1, 1.2];
    draft.note = "uplift";
    const req = draft.toRequest({
      id: "abc",
      series: "P0/S0",
      origin: "2024-03-01",
    } as never);
    expect(req).toMatchObject({
      forecast_id: "abc",
      adjustment: { target: "promotion", mode: "multiply", values: [1.1, 1.2] },
    });
  });

  it("collects adjusted targets for badges", () => {
    const targets = adjustedTargets([
      { adjustment: { target: "level" } },
      { adjustment: { target: "promotion" } },
      { adjustment: { target: "level" } },
    ]);
    expect(targets).toEqual(new Set(["level", "promotion"]));
  });
});
