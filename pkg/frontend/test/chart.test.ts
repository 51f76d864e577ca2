// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { defaultGeometry, renderDecomposition, xPixel, yPixel } from "../src/chart.js";
import { stackDecomposition } from "../src/stacking.js";
import type { ForecastResponse } from "../src/types.js";
import { FakeService } from "./fake_service.js";

function sample(): ForecastResponse {
  return new FakeService().forecast("P0/S0", "2024-03-04");
}

describe("geometry", () => {
  it("maps values monotonically onto pixels", () => {
    const fc = sample();
    const g = defaultGeometry(stackDecomposition(fc), fc.horizon);
    expect(yPixel(g, g.yMin)).toBeGreaterThan(yPixel(g, g.yMax));
    expect(xPixel(g, 0)).toBeLessThan(xPixel(g, fc.horizon - 1));
  });
});

describe("renderDecomposition", () => {
  it("draws level line, prediction line, and effect bars", () => {
    const fc = sample();
    const host = document.createElement("div");
    renderDecomposition(fc, host);
    expect(host.querySelector(".level-line")).toBeTruthy();
    expect(host.querySelector(".prediction-line")).toBeTruthy();
    const bars = host.querySelectorAll(".effect-bar");
    const expected = stackDecomposition(fc).reduce(
      (acc, s) => acc + s.segments.length,
      0,
    );
    expect(bars.length).toBe(expected);
  });

  it("lists every causal covariate in the legend even with zero effect", () => {
    const fc = sample();
    for (const name of fc.covariates) {
      fc.effects[name] = fc.effects[name].map(() => 0);
    }
    fc.prediction = [...fc.level];
    fc.truncated_prediction = fc.prediction.map((p) => Math.max(p, 0));
    const host = document.createElement("div");
    renderDecomposition(fc, host);
    expect(host.querySelectorAll(".effect-bar").length).toBe(0);
    const legendNames = [...host.querySelectorAll(".legend-item")].map(
      (n) => (n as HTMLElement).dataset.component,
    );
    for (const name of fc.covariates) {
      expect(legendNames).toContain(name);
    }
  });

  it("marks adjusted components with a badge", () => {
    const fc = sample();
    const host = document.createElement("div");
    renderDecomposition(fc, host, new Set(["promotion"]));
    const badge = [...host.querySelectorAll(".legend-item")].find(
      (n) => (n as HTMLElement).dataset.component === "promotion",
    ) as HTMLElement;
    expect(badge.classList.contains("adjusted-badge")).toBe(true);
    expect(badge.textContent).toContain("adjusted");
  });

  it("hatches steps whose raw prediction is negative", () => {
    const fc = sample();
    fc.level = fc.level.map(() => -30); // force negatives
    fc.prediction = fc.level.map((l, t) => {
      let total = l;
      for (const name of fc.covariates) total += fc.effects[name][t];
      return total;
    });
    fc.truncated_prediction = fc.prediction.map((p) => Math.max(p, 0));
    const host = document.createElement("div");
    renderDecomposition(fc, host);
    expect(host.querySelectorAll(".truncation-region").length).toBeGreaterThan(0);
  });
});
