/** SVG decomposition chart: level line, signed stacked bars, prediction. */

import {
  chartExtent,
  stackDecomposition,
  truncatedSteps,
  type StepStack,
} from "./stacking.js";
import type { ForecastResponse } from "./types.js";

export const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759",
  "#b07aa1", "#edc948", "#76b7b2", "#ff9da7",
];

export interface Geometry {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  yMin: number;
  yMax: number;
  horizon: number;
}

export function defaultGeometry(stacks: StepStack[], horizon: number): Geometry {
  const { min, max } = chartExtent(stacks);
  return {
    width: 860,
    height: 420,
    margin: { top: 16, right: 16, bottom: 28, left: 52 },
    yMin: Math.min(min, 0),
    yMax: max,
    horizon,
  };
}

export function yPixel(g: Geometry, value: number): number {
  const inner = g.height - g.margin.top - g.margin.bottom;
  const frac = (value - g.yMin) / (g.yMax - g.yMin || 1);
  return g.margin.top + inner * (1 - frac);
}

export function xPixel(g: Geometry, step: number): number {
  const inner = g.width - g.margin.left - g.margin.right;
  return g.margin.left + ((step + 0.5) / g.horizon) * inner;
}

export function barWidth(g: Geometry): number {
  const inner = g.width - g.margin.left - g.margin.right;
  return (inner / g.horizon) * 0.55;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function el(tag: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function polyline(
  g: Geometry, values: number[], attrs: Record<string, string | number>,
): SVGElement {
  const points = values
    .map((v, t) => `${xPixel(g, t)},${yPixel(g, v)}`)
    .join(" ");
  return el("polyline", { points, fill: "none", ...attrs });
}

export interface RenderHooks {
  onHover?: (detail: HoverDetail | null) => void;
}

export interface HoverDetail {
  step: number;
  covariate: string;
  effect: number;
  rawValue: number | null;
  coefficients: number[] | null;
}

/**
 * Renders the composed forecast. The legend lists every causal covariate,
 * including those with zero effect everywhere: they would be considered if
 * they had a non-zero effect, and the analyst should see that.
 */
export function renderDecomposition(
  fc: ForecastResponse,
  container: HTMLElement,
  adjusted: Set<string> = new Set(),
  hooks: RenderHooks = {},
): SVGElement {
  const stacks = stackDecomposition(fc);
  const g = defaultGeometry(stacks, fc.horizon);
  const svg = el("svg", {
    width: g.width,
    height: g.height,
    viewBox: `0 0 ${g.width} ${g.height}`,
    class: "decomposition-chart",
  });
  const colors = new Map(
    fc.covariates.map((name, i) => [name, PALETTE[i % PALETTE.length]]),
  );

  // axis baseline at zero
  svg.appendChild(
    el("line", {
      x1: g.margin.left, x2: g.width - g.margin.right,
      y1: yPixel(g, 0), y2: yPixel(g, 0),
      stroke: "#9aa1a9", "stroke-width": 1,
    }),
  );
  // y tick labels
  const tickCount = 5;
  for (let i = 0; i <= tickCount; i++) {
    const value = g.yMin + ((g.yMax - g.yMin) * i) / tickCount;
    const label = el("text", {
      x: g.margin.left - 8, y: yPixel(g, value) + 4,
      "text-anchor": "end", "font-size": 11, fill: "#555",
    });
    label.textContent = value.toFixed(1);
    svg.appendChild(label);
  }

  // hatched truncation region below zero where the raw prediction is negative
  for (const t of truncatedSteps(fc)) {
    const x = xPixel(g, t) - barWidth(g) / 2;
    svg.appendChild(
      el("rect", {
        x, y: yPixel(g, 0),
        width: barWidth(g),
        height: Math.max(0, yPixel(g, fc.prediction[t]) - yPixel(g, 0)),
        fill: "url(#truncation-hatch)",
        stroke: "#c0392b", "stroke-dasharray": "2,2", "stroke-width": 0.8,
        class: "truncation-region",
      }),
    );
  }
  const defs = el("defs", {});
  const pattern = el("pattern", {
    id: "truncation-hatch", width: 6, height: 6,
    patternUnits: "userSpaceOnUse", patternTransform: "rotate(45)",
  });
  pattern.appendChild(
    el("line", { x1: 0, y1: 0, x2: 0, y2: 6, stroke: "#c0392b", "stroke-width": 1.2 }),
  );
  defs.appendChild(pattern);
  svg.appendChild(defs);

  // stacked effect bars
  for (const s of stacks) {
    const x = xPixel(g, s.step) - barWidth(g) / 2;
    for (const seg of s.segments) {
      const rect = el("rect", {
        x,
        y: yPixel(g, seg.end),
        width: barWidth(g),
        height: Math.abs(yPixel(g, seg.start) - yPixel(g, seg.end)),
        fill: colors.get(seg.covariate) ?? "#888",
        class: `effect-bar effect-${seg.covariate}`,
        "data-step": s.step,
        "data-covariate": seg.covariate,
        "data-value": seg.value,
      });
      if (hooks.onHover) {
        rect.addEventListener("mouseenter", () =>
          hooks.onHover!({
            step: s.step,
            covariate: seg.covariate,
            effect: seg.value,
            rawValue: fc.raw_causal?.[seg.covariate]?.[s.step] ?? null,
            coefficients: fc.coefficients[seg.covariate]?.[s.step] ?? null,
          }),
        );
        rect.addEventListener("mouseleave", () => hooks.onHover!(null));
      }
      svg.appendChild(rect);
    }
  }

  // level line, prediction dashed line, actuals dots
  svg.appendChild(
    polyline(g, fc.level, {
      stroke: "#7ec8e3", "stroke-width": 2.5, class: "level-line",
    }),
  );
  svg.appendChild(
    polyline(g, fc.prediction, {
      stroke: "#222", "stroke-width": 2, "stroke-dasharray": "6,4",
      class: "prediction-line",
    }),
  );
  if (fc.actuals) {
    for (let t = 0; t < fc.horizon; t++) {
      svg.appendChild(
        el("circle", {
          cx: xPixel(g, t), cy: yPixel(g, fc.actuals[t]),
          r: 3.5, fill: "#333", class: "actual-dot",
        }),
      );
    }
  }

  // x labels
  for (let t = 0; t < fc.horizon; t++) {
    const label = el("text", {
      x: xPixel(g, t), y: g.height - 8,
      "text-anchor": "middle", "font-size": 11, fill: "#555",
    });
    label.textContent = `+${t}`;
    svg.appendChild(label);
  }

  container.replaceChildren(svg);
  renderLegend(fc, container, colors, adjusted);
  return svg;
}

function renderLegend(
  fc: ForecastResponse,
  container: HTMLElement,
  colors: Map<string, string>,
  adjusted: Set<string>,
): void {
  const legend = document.createElement("div");
  legend.className = "legend";
  const entries: [string, string][] = [
    ["level", "#7ec8e3"],
    ...fc.covariates.map((n): [string, string] => [n, colors.get(n) ?? "#888"]),
    ["prediction", "#222"],
  ];
  for (const [name, color] of entries) {
    const item = document.createElement("span");
    item.className = "legend-item";
    item.dataset.component = name;
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.backgroundColor = color;
    item.appendChild(swatch);
    item.appendChild(
      document.createTextNode(adjusted.has(name) ? `${name} (adjusted)` : name),
    );
    if (adjusted.has(name)) item.classList.add("adjusted-badge");
    legend.appendChild(item);
  }
  container.appendChild(legend);
}
