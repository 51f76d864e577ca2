/** Console controller: wires the API client, chart, and editor panels. */

import { adjustedTargets, AdjustmentDraft } from "./adjustments.js";
import { ApiClient, ApiError } from "./api.js";
import { renderDecomposition, type HoverDetail } from "./chart.js";
import { ScenarioDraft, scenarioDeltas } from "./scenario.js";
import { consistencyError } from "./stacking.js";
import type { ForecastResponse, MetaResponse } from "./types.js";

const CONSISTENCY_LIMIT = 1e-6;

export class Console {
  private meta: MetaResponse | null = null;
  private baseline: ForecastResponse | null = null;
  private current: ForecastResponse | null = null;
  private draft: ScenarioDraft | null = null;
  private adjustment: AdjustmentDraft | null = null;

  constructor(
    private api: ApiClient,
    private root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.renderShell();
    try {
      this.meta = await this.api.meta();
      const series = await this.api.series();
      const select = this.el<HTMLSelectElement>("#series-select");
      for (const info of series.series) {
        const opt = document.createElement("option");
        opt.value = info.series;
        opt.textContent = `${info.series} (${info.first_origin} .. ${info.last_origin})`;
        opt.dataset.lastOrigin = info.last_origin;
        select.appendChild(opt);
      }
      if (series.series.length) {
        this.el<HTMLInputElement>("#origin-input").value =
          series.series[0].last_origin;
      }
    } catch (err) {
      this.showError(err);
    }
  }

  private el<T extends HTMLElement>(selector: string): T {
    const node = this.root.querySelector<T>(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node;
  }

  private renderShell(): void {
    this.root.innerHTML = `
      <header>
        <h1>Forecast console</h1>
        <div class="controls">
          <label>series <select id="series-select"></select></label>
          <label>origin <input id="origin-input" type="date" /></label>
          <button id="load-btn">load forecast</button>
        </div>
        <div id="error-banner" class="error-banner" hidden></div>
      </header>
      <main>
        <section id="chart-panel"><div id="chart"></div>
          <div id="hover-detail" class="hover-detail"></div>
          <div id="compare-overlay" class="compare-overlay" hidden></div>
        </section>
        <aside>
          <section id="scenario-panel">
            <h2>what-if scenario</h2>
            <div id="scenario-editor"></div>
            <div class="row">
              <button id="scenario-apply" disabled>apply scenario</button>
              <button id="scenario-revert" disabled>revert all</button>
              <button id="scenario-compare" disabled>compare</button>
            </div>
          </section>
          <section id="adjustment-panel">
            <h2>judgmental adjustment</h2>
            <div id="adjustment-editor"></div>
          </section>
        </aside>
      </main>`;
    this.el("#load-btn").addEventListener("click", () => void this.loadForecast());
    this.el("#scenario-apply").addEventListener("click", () => void this.applyScenario());
    this.el("#scenario-revert").addEventListener("click", () => void this.revertScenario());
    this.el("#scenario-compare").addEventListener("click", () => this.renderCompare());
  }

  private showError(err: unknown): void {
    const banner = this.el("#error-banner");
    banner.hidden = false;
    if (err instanceof ApiError) {
      banner.textContent = `${err.errorClass}: ${err.message}`;
    } else {
      banner.textContent = String(err);
    }
  }

  private clearError(): void {
    this.el("#error-banner").hidden = true;
  }

  async loadForecast(): Promise<void> {
    this.clearError();
    const series = this.el<HTMLSelectElement>("#series-select").value;
    const origin = this.el<HTMLInputElement>("#origin-input").value;
    try {
      const fc = await this.api.forecast(series, origin);
      this.baseline = fc;
      this.draft = new ScenarioDraft(series, origin);
      this.adjustment = new AdjustmentDraft(fc.horizon);
      await this.show(fc);
      this.renderScenarioEditor();
      this.renderAdjustmentEditor();
    } catch (err) {
      this.showError(err);
    }
  }

  /** Render a response; a malformed or inconsistent one never half-renders. */
  private async show(fc: ForecastResponse): Promise<void> {
    const err = consistencyError(fc);
    if (!Number.isFinite(err) || err > CONSISTENCY_LIMIT) {
      throw new ApiError(
        "INCONSISTENT_RESPONSE",
        `stacked sum deviates from prediction by ${err}`,
        500,
      );
    }
    this.current = fc;
    let badges = new Set<string>();
    try {
      const log = await this.api.adjustments(fc.id);
      badges = adjustedTargets(log.entries);
    } catch {
      // adjustment history is decorative; keep rendering without it
    }
    renderDecomposition(fc, this.el("#chart"), badges, {
      onHover: (d) => this.renderHover(d),
    });
  }

  private renderHover(d: HoverDetail | null): void {
    const panel = this.el("#hover-detail");
    if (!d) {
      panel.textContent = "";
      return;
    }
    const coef = d.coefficients
      ? d.coefficients.map((c) => c.toFixed(3)).join(", ")
      : "n/a";
    const raw = d.rawValue === null ? "n/a" : String(d.rawValue);
    panel.textContent =
      `step +${d.step}  ${d.covariate}: raw value ${raw}, ` +
      `coefficient [${coef}], effect ${d.effect.toFixed(3)}`;
  }

  // -- scenario editing ------------------------------------------------------

  private causalSpec(name: string) {
    return this.meta?.covariates.find((c) => c.name === name) ?? null;
  }

  private renderScenarioEditor(): void {
    if (!this.meta || !this.baseline || !this.draft) return;
    const host = this.el("#scenario-editor");
    host.innerHTML = "";
    for (const name of this.meta.hierarchy) {
      const spec = this.causalSpec(name);
      const row = document.createElement("div");
      row.className = "scenario-row";
      const title = document.createElement("strong");
      title.textContent = name;
      row.appendChild(title);
      for (let step = 0; step < this.baseline.horizon; step++) {
        const baseValue = this.baseline.raw_causal?.[name]?.[step] ?? 0;
        if (spec?.cardinality === 2) {
          const btn = document.createElement("button");
          btn.className = "toggle";
          btn.dataset.covariate = name;
          btn.dataset.step = String(step);
          const active = () =>
            this.draft!.getOverride(name, step)?.value ?? baseValue;
          const paint = () => {
            btn.textContent = active() > 0 ? "on" : "off";
            btn.classList.toggle("active", active() > 0);
            btn.classList.toggle(
              "overridden",
              this.draft!.getOverride(name, step) !== undefined,
            );
          };
          btn.addEventListener("click", () => {
            const next = active() > 0 ? 0 : 1;
            if (next === baseValue) this.draft!.removeOverride(name, step);
            else this.draft!.setOverride(name, step, next);
            paint();
            this.syncScenarioButtons();
          });
          paint();
          row.appendChild(btn);
        } else {
          const input = document.createElement("input");
          input.type = "number";
          input.step = "any";
          input.className = "scenario-value";
          input.dataset.covariate = name;
          input.dataset.step = String(step);
          input.value = String(baseValue);
          input.addEventListener("change", () => {
            const v = Number(input.value);
            if (v === baseValue) this.draft!.removeOverride(name, step);
            else this.draft!.setOverride(name, step, v);
            input.classList.toggle("overridden", v !== baseValue);
            this.syncScenarioButtons();
          });
          row.appendChild(input);
        }
      }
      host.appendChild(row);
    }
    this.syncScenarioButtons();
  }

  private syncScenarioButtons(): void {
    const hasDraft = this.draft !== null;
    this.el<HTMLButtonElement>("#scenario-apply").disabled = !hasDraft;
    this.el<HTMLButtonElement>("#scenario-revert").disabled =
      !hasDraft || this.draft!.isEmpty;
    this.el<HTMLButtonElement>("#scenario-compare").disabled =
      !hasDraft || this.draft!.history.length < 1;
  }

  async applyScenario(): Promise<void> {
    if (!this.draft) return;
    this.clearError();
    try {
      const response = await this.api.whatif(this.draft.toRequest());
      this.draft.recordResponse(response);
      await this.show(response);
      this.syncScenarioButtons();
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        this.highlightScenarioError(err);
      }
      this.showError(err);
    }
  }

  private highlightScenarioError(err: ApiError): void {
    // field-level highlighting: mark inputs whose covariate the message names
    for (const node of this.root.querySelectorAll<HTMLElement>(
      "[data-covariate]",
    )) {
      const name = node.dataset.covariate ?? "";
      node.classList.toggle("field-error", err.message.includes(`'${name}'`));
    }
  }

  async revertScenario(): Promise<void> {
    if (!this.draft || !this.baseline) return;
    this.draft.revertAll();
    await this.show(this.baseline);
    this.renderScenarioEditor();
  }

  private renderCompare(): void {
    if (!this.draft || this.draft.history.length < 1 || !this.baseline) return;
    const overlay = this.el("#compare-overlay");
    overlay.hidden = false;
    const latest = this.draft.history[this.draft.history.length - 1];
    const reference =
      this.draft.history.length >= 2
        ? this.draft.history[this.draft.history.length - 2].response
        : this.baseline;
    const deltas = scenarioDeltas(reference, latest.response);
    overlay.textContent =
      "per-step delta vs previous: " +
      deltas.map((d, t) => `+${t}: ${d >= 0 ? "+" : ""}${d.toFixed(2)}`).join("  ");
  }

  // -- adjustments -----------------------------------------------------------

  private renderAdjustmentEditor(): void {
    if (!this.meta || !this.baseline || !this.adjustment) return;
    const host = this.el("#adjustment-editor");
    host.innerHTML = "";
    const targetSel = document.createElement("select");
    targetSel.id = "adjust-target";
    for (const name of ["level", ...this.meta.hierarchy]) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      targetSel.appendChild(opt);
    }
    targetSel.addEventListener("change", () => {
      this.adjustment!.target = targetSel.value;
    });
    const modeSel = document.createElement("select");
    modeSel.id = "adjust-mode";
    for (const mode of ["add", "multiply"]) {
      const opt = document.createElement("option");
      opt.value = mode;
      opt.textContent = mode === "add" ? "add per step" : "multiply per step";
      modeSel.appendChild(opt);
    }
    modeSel.addEventListener("change", () => {
      this.adjustment!.mode = modeSel.value as "add" | "multiply";
      this.adjustment!.reset();
      uniform.value = modeSel.value === "add" ? "0" : "1";
    });
    const uniform = document.createElement("input");
    uniform.type = "number";
    uniform.step = "any";
    uniform.id = "adjust-uniform";
    uniform.value = "0";
    uniform.addEventListener("change", () => {
      this.adjustment!.setUniform(Number(uniform.value));
    });
    const note = document.createElement("input");
    note.type = "text";
    note.id = "adjust-note";
    note.placeholder = "note";
    note.addEventListener("change", () => {
      this.adjustment!.note = note.value;
    });
    const submit = document.createElement("button");
    submit.id = "adjust-submit";
    submit.textContent = "apply adjustment";
    submit.addEventListener("click", () => void this.submitAdjustment());
    for (const node of [targetSel, modeSel, uniform, note, submit]) {
      host.appendChild(node);
    }
  }

  async submitAdjustment(): Promise<void> {
    if (!this.adjustment || !this.baseline) return;
    this.clearError();
    if (this.adjustment.isNoop) return;
    try {
      const response = await this.api.adjust(
        this.adjustment.toRequest(this.baseline),
      );
      await this.show(response);
      this.adjustment.reset();
    } catch (err) {
      this.showError(err);
    }
  }
}
