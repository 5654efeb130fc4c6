import * as path from "node:path";
import { FigureSpec, PlottedPoint } from "./figure.js";
import { Scene } from "./scene.js";
import { Summary } from "./schema.js";

// === image-sidecar data manifest ==========================================
// Everything a figure plots, plus the source summary, in one JSON document:
// written next to the image, embedded in SVG <metadata>, carried in PNG tEXt.

export interface DataManifest {
  schema: string;
  kind: string;
  series: string;
  image: string;
  config_hash: string;
  seed: number;
  chart: string;
  log_x: boolean;
  log_y: boolean;
  points: PlottedPoint[];
  summary: Summary;
}

export const DATA_MANIFEST_SCHEMA = "figure-data/1";

export function scenePoints(scene: Scene): PlottedPoint[] {
  const points: PlottedPoint[] = [];
  for (const p of scene.prims) {
    if ((p.t === "marker" || p.t === "rect") && p.data) {
      points.push(p.data);
    }
  }
  return points;
}

export function buildDataManifest(
  spec: FigureSpec,
  scene: Scene,
  summary: Summary,
  logYApplied: boolean
): DataManifest {
  return {
    schema: DATA_MANIFEST_SCHEMA,
    kind: spec.kind,
    series: spec.series,
    image: path.basename(spec.outPath),
    config_hash: spec.configHash,
    seed: spec.seed,
    chart: spec.style.chart,
    log_x: spec.style.logX,
    log_y: logYApplied,
    points: scenePoints(scene),
    summary,
  };
}

export function manifestJson(manifest: DataManifest): string {
  // keep the document ASCII so the same bytes are valid in PNG tEXt
  return JSON.stringify(manifest, null, 2).replace(/[^\x00-\x7e]/g, (ch) => {
    return `\\u${ch.charCodeAt(0).toString(16).padStart(4, "0")}`;
  });
}
