import * as path from "node:path";
import { SeriesData, columnIndex } from "./csv.js";
import { SeriesMeta, Summary } from "./schema.js";

// === figure specification =================================================

export type ChartType = "line" | "bar";
export type ImageFormat = "svg" | "png";

export interface FigureStyle {
  chart: ChartType;
  xColumn?: string; // line charts: data column driving the x axis
  labelColumns?: string[]; // bar charts: columns composing the bar label
  yColumns: string[];
  groupBy?: string; // line charts: one line per distinct value
  logX: boolean;
  logY: boolean;
  // reference-slope overlays, aligned with yColumns (null = none); slopes
  // are d(y)/d(ln x), matching log-magnitude columns over a log x axis
  refSlopes?: (number | null)[];
}

export interface FigureSpec {
  runDir: string;
  kind: string; // matches the experiment kind recorded in the summary
  series: string;
  format: ImageFormat;
  outPath: string;
  sidecarPath: string;
  style: FigureStyle;
  configHash: string;
  seed: number;
}

// === per-kind styling =====================================================

function styleFor(kind: string, series: string, columns: string[], options: Record<string, unknown>): FigureStyle {
  const key = `${kind}/${series}`;
  switch (key) {
    case "ratios_sweep/ratios":
      return {
        chart: "line",
        xColumn: "sites",
        yColumns: ["log_ratio_exact", "log_ratio_asymptotic"],
        groupBy: "occupied",
        logX: false,
        logY: false,
      };
    case "measure_dominance/dominance":
      return {
        chart: "line",
        xColumn: "sites",
        yColumns: ["homogeneous_log", "inhomogeneous_log", "log_gap"],
        logX: true,
        logY: false,
      };
    case "measure_dominance/scan":
      return { chart: "line", xColumn: "sites", yColumns: ["reduced_log_ratio"], logX: true, logY: false };
    case "alpha_scaling/scaling": {
      const sites = typeof options.sites === "number" ? options.sites : null;
      return {
        chart: "line",
        xColumn: "alpha",
        yColumns: ["log_magnitude_solution", "log_magnitude_nonsolution"],
        logX: true,
        logY: false,
        refSlopes: [sites, 2],
      };
    }
    case "alpha_scaling/threshold":
      return {
        chart: "line",
        xColumn: "alpha",
        yColumns: ["solution_log", "nonsolution_log"],
        logX: true,
        logY: false,
      };
    case "time_symmetry/symmetry":
      return {
        chart: "bar",
        labelColumns: ["pair"],
        yColumns: ["forward_magnitude", "reversed_magnitude"],
        logX: false,
        logY: false,
      };
    case "collapse_timing/timing":
      return {
        chart: "bar",
        labelColumns: ["scenario", "family"],
        yColumns: ["log_contribution"],
        logX: false,
        logY: false,
      };
    case "nonlinearity/families":
      return {
        chart: "bar",
        labelColumns: ["target", "family"],
        yColumns: ["log_contribution"],
        logX: false,
        logY: false,
      };
    case "nonlinearity/profiles":
      return {
        chart: "line",
        xColumn: "site",
        yColumns: ["probability"],
        groupBy: "state",
        logX: false,
        logY: false,
      };
    case "born_rule/branches":
      return {
        chart: "bar",
        labelColumns: ["branch"],
        yColumns: ["probability", "magnitude"],
        logX: false,
        logY: false,
      };
    case "born_rule/scan":
      return {
        chart: "line",
        xColumn: "alpha",
        yColumns: ["magnitude_branch_1", "magnitude_branch_2", "ratio"],
        logX: true,
        logY: true,
      };
    case "propagate/drift":
      return { chart: "line", xColumn: "step", yColumns: ["norm_error", "energy_error"], logX: false, logY: true };
    default: {
      // unknown pairing: plot every later column against the first
      const [first, ...rest] = columns;
      return { chart: "line", xColumn: first, yColumns: rest, logX: false, logY: false };
    }
  }
}

export function buildFigureSpec(
  runDir: string,
  summary: Summary,
  meta: SeriesMeta,
  configHash: string,
  format: ImageFormat
): FigureSpec {
  const options = summary.config.options as Record<string, unknown>;
  const style = styleFor(summary.kind, meta.name, meta.columns, options);
  return {
    runDir,
    kind: summary.kind,
    series: meta.name,
    format,
    outPath: path.join(runDir, `figure_${meta.name}.${format}`),
    sidecarPath: path.join(runDir, `figure_${meta.name}.data.json`),
    style,
    configHash,
    seed: summary.seed,
  };
}

// === plotted-point bookkeeping ============================================
// Every mark carries the verbatim CSV cells it was drawn from, keyed by
// column name, so images and sidecars can be checked against source rows.

export interface PlottedPoint {
  series: string; // legend entry
  x: string; // verbatim cell (line) or composed label (bar)
  y: string; // verbatim cell
  cells: Record<string, string>;
}

export interface LineGroup {
  label: string;
  dashed: boolean;
  colorIndex: number;
  points: { x: number; y: number; data: PlottedPoint }[];
}

export interface BarPanel {
  column: string;
  colorIndex: number;
  bars: { label: string; value: number; data: PlottedPoint }[];
}

export interface FigureData {
  spec: FigureSpec;
  lines?: LineGroup[];
  panels?: BarPanel[];
  logYApplied: boolean; // logY degrades to linear when values are not all positive
}

export function barLabel(cells: string[], data: SeriesData, labelColumns: string[], source: string): string {
  return labelColumns.map((c) => cells[columnIndex(data, c, source)]).join(" / ");
}

export function extractFigureData(spec: FigureSpec, data: SeriesData): FigureData {
  const source = `series_${spec.series}.csv`;
  const style = spec.style;
  if (style.chart === "bar") {
    const labelCols = style.labelColumns ?? [data.columns[0]];
    const panels: BarPanel[] = style.yColumns.map((column, ci) => {
      const yIdx = columnIndex(data, column, source);
      const bars = data.cells.map((row) => {
        const label = barLabel(row, data, labelCols, source);
        const value = Number(row[yIdx]);
        if (!Number.isFinite(value)) {
          throw new Error(`${source}: non-numeric ${column} cell ${JSON.stringify(row[yIdx])}`);
        }
        const cells: Record<string, string> = {};
        for (const c of labelCols) cells[c] = row[columnIndex(data, c, source)];
        cells[column] = row[yIdx];
        return {
          label,
          value,
          data: { series: column, x: label, y: row[yIdx], cells },
        };
      });
      return { column, colorIndex: ci, bars };
    });
    return { spec, panels, logYApplied: false };
  }

  const xCol = style.xColumn ?? data.columns[0];
  const xIdx = columnIndex(data, xCol, source);
  const groupIdx = style.groupBy === undefined ? null : columnIndex(data, style.groupBy, source);
  const groupValues =
    groupIdx === null ? [null] : [...new Set(data.cells.map((row) => row[groupIdx]))];

  let allPositive = true;
  const lines: LineGroup[] = [];
  for (const [gi, gv] of groupValues.entries()) {
    for (const [yi, column] of style.yColumns.entries()) {
      const yIdx = columnIndex(data, column, source);
      const rows = data.cells.filter((row) => groupIdx === null || row[groupIdx] === gv);
      const points = rows.map((row) => {
        const x = Number(row[xIdx]);
        const y = Number(row[yIdx]);
        if (!Number.isFinite(x) || !Number.isFinite(y)) {
          throw new Error(`${source}: non-numeric point (${row[xIdx]}, ${row[yIdx]})`);
        }
        if (y <= 0) allPositive = false;
        const cells: Record<string, string> = { [xCol]: row[xIdx], [column]: row[yIdx] };
        if (groupIdx !== null && style.groupBy) cells[style.groupBy] = row[groupIdx];
        const label =
          gv === null
            ? column
            : style.yColumns.length === 1
              ? `${style.groupBy}=${gv}`
              : `${column} ${style.groupBy}=${gv}`;
        return { x, y, data: { series: label, x: row[xIdx], y: row[yIdx], cells } };
      });
      points.sort((a, b) => a.x - b.x);
      const label = points.length > 0 ? points[0].data.series : column;
      lines.push({ label, dashed: yi % 2 === 1, colorIndex: gv === null ? yi : gi, points });
    }
  }
  const logYApplied = style.logY && allPositive;
  return { spec, lines, logYApplied };
}
