/**
 * Map geometry helpers: equirectangular projection and great-circle
 * interpolation for the route overlay.
 *
 * The gateway reports path hops as node ids, not coordinates, so the
 * overlay is schematic: endpoints sit at the true station coordinates
 * (taken from GET /scenarios) and the satellite hops are spaced evenly
 * along the great circle between them. One vertex per hop node.
 */

export interface LatLon {
  latitude_deg: number;
  longitude_deg: number;
}

const DEG = Math.PI / 180;

function toUnitVector(p: LatLon): [number, number, number] {
  const lat = p.latitude_deg * DEG;
  const lon = p.longitude_deg * DEG;
  return [
    Math.cos(lat) * Math.cos(lon),
    Math.cos(lat) * Math.sin(lon),
    Math.sin(lat),
  ];
}

function toLatLon(v: [number, number, number]): LatLon {
  const [x, y, z] = v;
  return {
    latitude_deg: Math.atan2(z, Math.hypot(x, y)) / DEG,
    longitude_deg: Math.atan2(y, x) / DEG,
  };
}

/**
 * Point at fraction `f` (0..1) along the great circle from `a` to `b`,
 * always taking the short way around.
 */
export function greatCirclePoint(a: LatLon, b: LatLon, f: number): LatLon {
  if (f <= 0) return a;
  if (f >= 1) return b;
  const va = toUnitVector(a);
  const vb = toUnitVector(b);
  const dot = Math.min(1, Math.max(-1, va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2]));
  const omega = Math.acos(dot);
  if (omega < 1e-9) return a;
  const sa = Math.sin((1 - f) * omega) / Math.sin(omega);
  const sb = Math.sin(f * omega) / Math.sin(omega);
  return toLatLon([
    sa * va[0] + sb * vb[0],
    sa * va[1] + sb * vb[1],
    sa * va[2] + sb * vb[2],
  ]);
}

/**
 * Vertices for a route with `nodeCount` nodes: the endpoints exact, the
 * interior nodes evenly spaced along the great circle. `nodeCount` must
 * be at least 2 (a route always has two endpoints).
 */
export function routeVertices(src: LatLon, dst: LatLon, nodeCount: number): LatLon[] {
  if (nodeCount < 2) {
    throw new Error(`route needs at least 2 nodes, got ${nodeCount}`);
  }
  const points: LatLon[] = [];
  for (let i = 0; i < nodeCount; i++) {
    points.push(greatCirclePoint(src, dst, i / (nodeCount - 1)));
  }
  return points;
}

/**
 * Rewrites longitudes so consecutive points never jump by more than 180
 * degrees; used to draw a polyline across the antimeridian without a
 * spurious line across the whole map. Values may leave [-180, 180].
 */
export function unwrapLongitudes(points: LatLon[]): LatLon[] {
  if (points.length === 0) return [];
  const out: LatLon[] = [points[0]];
  for (let i = 1; i < points.length; i++) {
    let lon = points[i].longitude_deg;
    const prev = out[i - 1].longitude_deg;
    while (lon - prev > 180) lon -= 360;
    while (lon - prev < -180) lon += 360;
    out.push({ latitude_deg: points[i].latitude_deg, longitude_deg: lon });
  }
  return out;
}

/** Equirectangular projection onto a width x height canvas. */
export function project(
  p: LatLon,
  width: number,
  height: number,
): { x: number; y: number } {
  return {
    x: ((p.longitude_deg + 180) / 360) * width,
    y: ((90 - p.latitude_deg) / 180) * height,
  };
}
