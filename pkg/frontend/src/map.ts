/**
 * 2D route map: equirectangular world grid, ground stations, and the
 * current path drawn as a great-circle polyline with one vertex per hop
 * node. Vertex geometry is pure (`overlayVertices`); the canvas painting
 * below it carries no state of its own.
 */
import { greatCirclePoint, project, routeVertices, unwrapLongitudes } from "./geo";
import type { LatLon } from "./geo";
import type { GroundStationSummary, PathRecord } from "./types";

export interface MapModel {
  stations: GroundStationSummary[];
  path: PathRecord | null;
}

/**
 * Polyline vertices for a path record: one per node in `hops`, endpoints
 * at the true station coordinates. Returns null when either endpoint is
 * not among the known stations.
 */
export function overlayVertices(
  path: PathRecord,
  stations: GroundStationSummary[],
): LatLon[] | null {
  const src = stations.find((s) => s.gs_id === path.src);
  const dst = stations.find((s) => s.gs_id === path.dst);
  if (src === undefined || dst === undefined) return null;
  return routeVertices(src, dst, path.hops.length);
}

const GRID_STEP_DEG = 30;

function drawGraticule(ctx: CanvasRenderingContext2D, w: number, h: number): void {
  ctx.strokeStyle = "#26304a";
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (let lon = -180; lon <= 180; lon += GRID_STEP_DEG) {
    const { x } = project({ latitude_deg: 0, longitude_deg: lon }, w, h);
    ctx.moveTo(x, 0);
    ctx.lineTo(x, h);
  }
  for (let lat = -60; lat <= 60; lat += GRID_STEP_DEG) {
    const { y } = project({ latitude_deg: lat, longitude_deg: 0 }, w, h);
    ctx.moveTo(0, y);
    ctx.lineTo(w, y);
  }
  ctx.stroke();
  // Equator slightly brighter for orientation.
  ctx.strokeStyle = "#33406033";
  const { y } = project({ latitude_deg: 0, longitude_deg: 0 }, w, h);
  ctx.beginPath();
  ctx.moveTo(0, y);
  ctx.lineTo(w, y);
  ctx.stroke();
}

function strokePolyline(
  ctx: CanvasRenderingContext2D,
  points: LatLon[],
  w: number,
  h: number,
  shiftX: number,
): void {
  ctx.beginPath();
  points.forEach((p, i) => {
    const { x, y } = project(p, w, h);
    if (i === 0) ctx.moveTo(x + shiftX, y);
    else ctx.lineTo(x + shiftX, y);
  });
  ctx.stroke();
}

export function drawMap(canvas: HTMLCanvasElement, model: MapModel): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const w = canvas.width;
  const h = canvas.height;

  ctx.fillStyle = "#0d1220";
  ctx.fillRect(0, 0, w, h);
  drawGraticule(ctx, w, h);

  if (model.path !== null) {
    const vertices = overlayVertices(model.path, model.stations);
    if (vertices !== null) {
      // Smooth arc under the vertices, then the vertices themselves.
      const arc: LatLon[] = [];
      const steps = Math.max(32, vertices.length * 4);
      for (let i = 0; i <= steps; i++) {
        arc.push(greatCirclePoint(vertices[0], vertices[vertices.length - 1], i / steps));
      }
      const unwrappedArc = unwrapLongitudes(arc);
      const unwrapped = unwrapLongitudes(vertices);
      ctx.strokeStyle = "#e8a33d";
      ctx.lineWidth = 2;
      // Unwrapped longitudes can leave the frame; draw shifted copies so
      // the antimeridian crossing stays visible on both sides.
      for (const shift of [-w, 0, w]) {
        strokePolyline(ctx, unwrappedArc, w, h, shift);
      }
      ctx.fillStyle = "#ffd27d";
      for (const shift of [-w, 0, w]) {
        for (const v of unwrapped) {
          const { x, y } = project(v, w, h);
          ctx.beginPath();
          ctx.arc(x + shift, y, 3, 0, 2 * Math.PI);
          ctx.fill();
        }
      }
    }
  }

  ctx.font = "11px system-ui, sans-serif";
  for (const station of model.stations) {
    const onPath =
      model.path !== null && (model.path.src === station.gs_id || model.path.dst === station.gs_id);
    const { x, y } = project(
      { latitude_deg: station.latitude_deg, longitude_deg: station.longitude_deg },
      w,
      h,
    );
    ctx.fillStyle = onPath ? "#7fd0ff" : "#8b95ad";
    ctx.beginPath();
    ctx.arc(x, y, onPath ? 5 : 3.5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillText(station.gs_id, x + 7, y + 4);
  }
}
