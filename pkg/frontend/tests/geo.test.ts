import { describe, expect, it } from "vitest";
import { greatCirclePoint, project, routeVertices, unwrapLongitudes } from "../src/geo";
import type { LatLon } from "../src/geo";

const SHANGHAI: LatLon = { latitude_deg: 31.2304, longitude_deg: 121.4737 };
const SAO_PAULO: LatLon = { latitude_deg: -23.5505, longitude_deg: -46.6333 };

describe("project", () => {
  it("maps the corners of the equirectangular frame", () => {
    expect(project({ latitude_deg: 90, longitude_deg: -180 }, 720, 360)).toEqual({ x: 0, y: 0 });
    expect(project({ latitude_deg: -90, longitude_deg: 180 }, 720, 360)).toEqual({ x: 720, y: 360 });
    expect(project({ latitude_deg: 0, longitude_deg: 0 }, 720, 360)).toEqual({ x: 360, y: 180 });
  });
});

describe("greatCirclePoint", () => {
  it("returns the exact endpoints at f=0 and f=1", () => {
    expect(greatCirclePoint(SHANGHAI, SAO_PAULO, 0)).toEqual(SHANGHAI);
    expect(greatCirclePoint(SHANGHAI, SAO_PAULO, 1)).toEqual(SAO_PAULO);
  });

  it("midpoint of a pure east-west arc stays on the equator", () => {
    const a = { latitude_deg: 0, longitude_deg: 10 };
    const b = { latitude_deg: 0, longitude_deg: 50 };
    const mid = greatCirclePoint(a, b, 0.5);
    expect(mid.latitude_deg).toBeCloseTo(0, 9);
    expect(mid.longitude_deg).toBeCloseTo(30, 9);
  });

  it("handles coincident endpoints", () => {
    const mid = greatCirclePoint(SHANGHAI, SHANGHAI, 0.5);
    expect(mid.latitude_deg).toBeCloseTo(SHANGHAI.latitude_deg, 6);
    expect(mid.longitude_deg).toBeCloseTo(SHANGHAI.longitude_deg, 6);
  });
});

describe("routeVertices", () => {
  it("produces exactly nodeCount vertices with exact endpoints", () => {
    for (const n of [2, 3, 5, 11]) {
      const vertices = routeVertices(SHANGHAI, SAO_PAULO, n);
      expect(vertices).toHaveLength(n);
      expect(vertices[0]).toEqual(SHANGHAI);
      expect(vertices[n - 1]).toEqual(SAO_PAULO);
    }
  });

  it("rejects degenerate routes", () => {
    expect(() => routeVertices(SHANGHAI, SAO_PAULO, 1)).toThrow(/at least 2/);
  });

  it("spaces interior vertices monotonically along the arc", () => {
    // Tokyo to San Francisco crosses the Pacific eastward: unwrapped
    // longitude grows the whole way instead of swinging back across zero.
    const tokyo: LatLon = { latitude_deg: 35.68, longitude_deg: 139.69 };
    const sanFrancisco: LatLon = { latitude_deg: 37.77, longitude_deg: -122.42 };
    const vertices = routeVertices(tokyo, sanFrancisco, 12);
    const unwrapped = unwrapLongitudes(vertices);
    for (let i = 1; i < unwrapped.length; i++) {
      expect(unwrapped[i].longitude_deg).toBeGreaterThan(unwrapped[i - 1].longitude_deg);
    }
    expect(unwrapped[11].longitude_deg).toBeCloseTo(360 - 122.42, 6);
  });
});

describe("unwrapLongitudes", () => {
  it("removes antimeridian jumps", () => {
    const points: LatLon[] = [
      { latitude_deg: 0, longitude_deg: 170 },
      { latitude_deg: 0, longitude_deg: -178 },
      { latitude_deg: 0, longitude_deg: -170 },
    ];
    const unwrapped = unwrapLongitudes(points);
    expect(unwrapped.map((p) => p.longitude_deg)).toEqual([170, 182, 190]);
  });

  it("keeps already-continuous sequences untouched", () => {
    const points: LatLon[] = [
      { latitude_deg: 10, longitude_deg: -20 },
      { latitude_deg: 12, longitude_deg: 0 },
      { latitude_deg: 14, longitude_deg: 20 },
    ];
    expect(unwrapLongitudes(points)).toEqual(points);
  });

  it("handles the empty polyline", () => {
    expect(unwrapLongitudes([])).toEqual([]);
  });
});
