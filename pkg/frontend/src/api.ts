/** Typed client for the forecast service. All numbers come from here. */

import type {
  AdjustmentEntry,
  AdjustmentRequest,
  ErrorBody,
  ForecastResponse,
  MetaResponse,
  ScenarioRequest,
  SeriesResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public errorClass: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const body = await resp.json();
    if (!resp.ok) {
      const err = body as ErrorBody;
      throw new ApiError(
        err?.error?.class ?? "UNKNOWN",
        err?.error?.message ?? resp.statusText,
        resp.status,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  meta(): Promise<MetaResponse> {
    return this.request<MetaResponse>("/meta");
  }

  series(): Promise<SeriesResponse> {
    return this.request<SeriesResponse>("/series");
  }

  forecast(series: string, origin: string): Promise<ForecastResponse> {
    return this.post<ForecastResponse>("/forecast", { series, origin });
  }

  whatif(scenario: ScenarioRequest): Promise<ForecastResponse> {
    return this.post<ForecastResponse>("/whatif", scenario);
  }

  adjust(payload: AdjustmentRequest): Promise<ForecastResponse> {
    return this.post<ForecastResponse>("/adjust", payload);
  }

  adjustments(forecastId: string): Promise<{ entries: AdjustmentEntry[] }> {
    return this.request<{ entries: AdjustmentEntry[] }>(
      `/adjustments?forecast_id=${encodeURIComponent(forecastId)}`,
    );
  }
}
