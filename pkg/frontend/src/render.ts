import * as fs from "node:fs";
import * as path from "node:path";
import { parseSeriesCsv } from "./csv.js";
import { FigureSpec, ImageFormat, buildFigureSpec, extractFigureData } from "./figure.js";
import { encodePng } from "./png.js";
import { rasterizeScene } from "./raster.js";
import { buildScene } from "./scene.js";
import { Manifest, RunDirError, Summary, parseManifest, parseSummary } from "./schema.js";
import { buildDataManifest, manifestJson } from "./sidecar.js";
import { sceneToSvg } from "./svg.js";

// === run-directory rendering ==============================================

export interface RenderOptions {
  format?: ImageFormat;
}

export interface RenderResult {
  images: string[];
  sidecars: string[];
  missing: string[]; // series listed in the summary whose CSV is absent
}

export interface RunInputs {
  summary: Summary;
  manifest: Manifest;
}

export function loadRunInputs(runDir: string): RunInputs {
  let stat: fs.Stats;
  try {
    stat = fs.statSync(runDir);
  } catch {
    throw new RunDirError(`no run directory at ${JSON.stringify(runDir)}`);
  }
  if (!stat.isDirectory()) {
    throw new RunDirError(`${runDir} is not a directory`);
  }
  const summaryPath = path.join(runDir, "summary.json");
  const manifestPath = path.join(runDir, "manifest.json");
  if (!fs.existsSync(summaryPath) || !fs.existsSync(manifestPath)) {
    throw new RunDirError(`${runDir} is not a persisted run: missing summary.json or manifest.json`);
  }
  const summary = parseSummary(fs.readFileSync(summaryPath, "utf8"), summaryPath);
  const manifest = parseManifest(fs.readFileSync(manifestPath, "utf8"), manifestPath);
  return { summary, manifest };
}

export function figureSpecsForRun(runDir: string, format: ImageFormat = "svg"): FigureSpec[] {
  const { summary, manifest } = loadRunInputs(runDir);
  return summary.series.map((meta) => buildFigureSpec(runDir, summary, meta, manifest.config_hash, format));
}

export function render(runDir: string, options: RenderOptions = {}): RenderResult {
  const format = options.format ?? "svg";
  const { summary, manifest } = loadRunInputs(runDir);

  // build every figure in memory first: a failure partway through must not
  // leave a half-rendered run directory behind
  const outputs: { file: string; bytes: Buffer | string }[] = [];
  const images: string[] = [];
  const sidecars: string[] = [];
  const missing: string[] = [];
  for (const meta of summary.series) {
    const csvPath = path.join(runDir, meta.file);
    if (!fs.existsSync(csvPath)) {
      missing.push(meta.name);
      continue;
    }
    const spec = buildFigureSpec(runDir, summary, meta, manifest.config_hash, format);
    const data = parseSeriesCsv(fs.readFileSync(csvPath, "utf8"), meta.file);
    const figure = extractFigureData(spec, data);
    const scene = buildScene(figure);
    const dataManifest = buildDataManifest(spec, scene, summary, figure.logYApplied);
    const json = manifestJson(dataManifest);
    if (format === "svg") {
      outputs.push({ file: spec.outPath, bytes: sceneToSvg(scene, json) });
    } else {
      outputs.push({ file: spec.outPath, bytes: encodePng(rasterizeScene(scene), [["figure-data", json]]) });
    }
    outputs.push({ file: spec.sidecarPath, bytes: json + "\n" });
    images.push(spec.outPath);
    sidecars.push(spec.sidecarPath);
  }

  for (const out of outputs) {
    fs.writeFileSync(out.file, out.bytes);
  }
  return { images, sidecars, missing };
}
