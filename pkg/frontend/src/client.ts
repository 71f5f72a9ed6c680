/**
 * Typed fetch layer for the satsim gateway.
 *
 * Every helper takes the gateway base URL explicitly so the console can be
 * pointed at any host; the gateway allows cross-origin requests.
 */
import type {
  EventRecord,
  MetricKind,
  MetricsPage,
  RttSample,
  RunStatus,
  ScenarioSummary,
} from "./types";

/** Error carrying the gateway's status code and detail message. */
export class GatewayError extends Error {
  status: number;

  constructor(message: string, status: number) {
    super(message);
    this.name = "GatewayError";
    this.status = status;
  }
}

export function isGatewayError(error: unknown): error is GatewayError {
  return error instanceof GatewayError;
}

function joinUrl(base: string, path: string): string {
  return `${base.replace(/\/+$/, "")}${path}`;
}

async function gatewayFetch<T>(
  base: string,
  path: string,
  init?: RequestInit,
): Promise<T> {
  const response = await fetch(joinUrl(base, path), {
    headers: { "Content-Type": "application/json" },
    ...init,
  });

  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string; errors?: string[] };
      detail = body.detail ?? detail;
      if (body.errors?.length) {
        detail = `${detail}: ${body.errors.join("; ")}`;
      }
    } catch {
      // keep statusText
    }
    throw new GatewayError(detail, response.status);
  }

  return (await response.json()) as T;
}

export function listScenarios(base: string): Promise<ScenarioSummary[]> {
  return gatewayFetch<ScenarioSummary[]>(base, "/scenarios");
}

export interface StartRunRequest {
  scenario_name: string;
  seed?: number;
  realtime_factor?: number;
}

/** POST /runs with a bundled scenario name. Returns the initial status. */
export function startRun(base: string, request: StartRunRequest): Promise<RunStatus> {
  return gatewayFetch<RunStatus>(base, "/runs", {
    method: "POST",
    body: JSON.stringify(request),
  });
}

export function getRun(base: string, runId: string): Promise<RunStatus> {
  return gatewayFetch<RunStatus>(base, `/runs/${encodeURIComponent(runId)}`);
}

export function listRuns(base: string): Promise<RunStatus[]> {
  return gatewayFetch<RunStatus[]>(base, "/runs");
}

/**
 * GET /runs/{id}/metrics/{kind}?from=&to=: one kind, by index range.
 * Reads past the end return an empty page, so polling is always safe.
 */
export function fetchMetrics<T extends EventRecord>(
  base: string,
  runId: string,
  kind: MetricKind,
  range?: { from?: number; to?: number },
): Promise<MetricsPage<T>> {
  const search = new URLSearchParams();
  if (range?.from != null) search.set("from", String(range.from));
  if (range?.to != null) search.set("to", String(range.to));
  const query = search.toString();
  const path = `/runs/${encodeURIComponent(runId)}/metrics/${kind}${query ? `?${query}` : ""}`;
  return gatewayFetch<MetricsPage<T>>(base, path);
}

/**
 * POST /runs/{id}/ping: interactive probe; resolves with the sample once
 * the engine has scheduled and answered it. 409 when the run is not running.
 */
export function postPing(
  base: string,
  runId: string,
  src: string,
  dst: string,
): Promise<RttSample> {
  return gatewayFetch<RttSample>(base, `/runs/${encodeURIComponent(runId)}/ping`, {
    method: "POST",
    body: JSON.stringify({ src, dst }),
  });
}

export interface InjectRequest {
  fail_isls?: boolean;
  capacity_scale?: number;
}

/** POST /runs/{id}/inject: what-if steering from the next slot boundary. */
export function postInject(
  base: string,
  runId: string,
  request: InjectRequest,
): Promise<InjectRequest> {
  return gatewayFetch<InjectRequest>(base, `/runs/${encodeURIComponent(runId)}/inject`, {
    method: "POST",
    body: JSON.stringify(request),
  });
}
