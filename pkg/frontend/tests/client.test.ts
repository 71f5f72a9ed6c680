import { afterEach, describe, expect, it, vi } from "vitest";
import {
  GatewayError,
  fetchMetrics,
  isGatewayError,
  listScenarios,
  postInject,
  postPing,
  startRun,
} from "../src/client";
import type { RttSample } from "../src/types";

interface Call {
  url: string;
  init?: RequestInit;
}

function stubFetch(payload: unknown, status = 200): Call[] {
  const calls: Call[] = [];
  vi.stubGlobal("fetch", async (url: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(url), init });
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: "stub",
      json: async () => payload,
    } as Response;
  });
  return calls;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("gateway client", () => {
  it("joins the base URL without doubled slashes", async () => {
    const calls = stubFetch([]);
    await listScenarios("http://127.0.0.1:8000/");
    expect(calls[0].url).toBe("http://127.0.0.1:8000/scenarios");
  });

  it("posts the run request body as JSON", async () => {
    const calls = stubFetch({ run_id: "r1", state: "pending" });
    const status = await startRun("http://gw", {
      scenario_name: "kuiper-relay-steady",
      seed: 7,
      realtime_factor: 20,
    });
    expect(status.run_id).toBe("r1");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({
      scenario_name: "kuiper-relay-steady",
      seed: 7,
      realtime_factor: 20,
    });
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(headers["Content-Type"]).toBe("application/json");
  });

  it("builds metrics URLs with the requested index range", async () => {
    const page = { run_id: "r1", kind: "rtt_sample", from: 0, count: 0, total: 0, records: [] };
    const calls = stubFetch(page);
    await fetchMetrics("http://gw", "r1", "rtt_sample");
    await fetchMetrics("http://gw", "r1", "flow_rate_sample", { from: 10 });
    await fetchMetrics("http://gw", "r1", "topology_record", { from: 3, to: 8 });
    expect(calls.map((c) => c.url)).toEqual([
      "http://gw/runs/r1/metrics/rtt_sample",
      "http://gw/runs/r1/metrics/flow_rate_sample?from=10",
      "http://gw/runs/r1/metrics/topology_record?from=3&to=8",
    ]);
  });

  it("returns the ping sample exactly as the gateway sent it", async () => {
    const sample: RttSample = {
      kind: "rtt_sample",
      launch_t_s: 1.25,
      src: "gs-a",
      dst: "gs-b",
      rtt_s: 0.03579245283018868,
      theoretical_rtt_s: 0.03412,
      hop_count: 4,
      path: ["gs-a", "s1", "s2", "s3", "gs-b"],
      timed_out: false,
    };
    const calls = stubFetch(sample);
    const got = await postPing("http://gw", "r1", "gs-a", "gs-b");
    expect(got).toEqual(sample);
    expect(calls[0].url).toBe("http://gw/runs/r1/ping");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({ src: "gs-a", dst: "gs-b" });
  });

  it("escapes run ids in paths", async () => {
    const calls = stubFetch({});
    await postInject("http://gw", "run/../x", { fail_isls: true });
    expect(calls[0].url).toBe("http://gw/runs/run%2F..%2Fx/inject");
  });

  it("maps a validation failure to a GatewayError with the detail list", async () => {
    stubFetch(
      { detail: "invalid scenario", errors: ["workload[0].kind: required field is missing"] },
      422,
    );
    const error = await listScenarios("http://gw").catch((e: unknown) => e);
    expect(isGatewayError(error)).toBe(true);
    const ge = error as GatewayError;
    expect(ge.status).toBe(422);
    expect(ge.message).toBe(
      "invalid scenario: workload[0].kind: required field is missing",
    );
  });

  it("maps a plain detail and falls back to statusText on a non-JSON body", async () => {
    stubFetch({ detail: "unknown run" }, 404);
    const notFound = (await listScenarios("http://gw").catch((e: unknown) => e)) as GatewayError;
    expect(notFound.status).toBe(404);
    expect(notFound.message).toBe("unknown run");

    vi.stubGlobal("fetch", async () => {
      return {
        ok: false,
        status: 502,
        statusText: "Bad Gateway",
        json: async () => {
          throw new Error("not json");
        },
      } as unknown as Response;
    });
    const bad = (await listScenarios("http://gw").catch((e: unknown) => e)) as GatewayError;
    expect(bad.status).toBe(502);
    expect(bad.message).toBe("Bad Gateway");
  });

  it("does not classify ordinary errors as gateway errors", () => {
    expect(isGatewayError(new Error("boom"))).toBe(false);
    expect(isGatewayError(new GatewayError("x", 400))).toBe(true);
  });
});
