import { BarPanel, FigureData, LineGroup, PlottedPoint } from "./figure.js";
import { Scale, formatTick, linearScale, logScale } from "./scale.js";

// === drawing scene ========================================================
// One backend-neutral description of the figure; the SVG and PNG writers
// consume it verbatim so both formats plot identical marks.

export interface TextPrim {
  t: "text";
  x: number;
  y: number; // baseline
  s: string;
  size: number; // font pixel height at scale 1 = 7
  anchor: "start" | "middle" | "end";
  color: string;
}

export interface LinePrim {
  t: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  color: string;
  width: number;
  dashed?: boolean;
}

export interface PolyPrim {
  t: "poly";
  pts: [number, number][];
  color: string;
  width: number;
  dashed?: boolean;
}

export interface RectPrim {
  t: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  color: string;
  data?: PlottedPoint;
}

export interface MarkerPrim {
  t: "marker";
  x: number;
  y: number;
  r: number;
  color: string;
  data: PlottedPoint;
}

export type Prim = TextPrim | LinePrim | PolyPrim | RectPrim | MarkerPrim;

export interface Scene {
  width: number;
  height: number;
  background: string;
  prims: Prim[];
  caption: string;
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
const AXIS = "#444444";
const GRID = "#dddddd";
const TEXT = "#222222";
const REF = "#888888";

const WIDTH = 960;
const HEIGHT = 600;
const MARGIN = { left: 86, right: 24, top: 52, bottom: 96 };

function color(index: number): string {
  return PALETTE[index % PALETTE.length];
}

function truncate(s: string, max: number): string {
  return s.length <= max ? s : s.slice(0, Math.max(1, max - 2)) + "..";
}

// === axes =================================================================

function drawYAxis(prims: Prim[], scale: Scale, x0: number, x1: number, log: boolean) {
  for (const tick of scale.ticks()) {
    const y = scale.map(log ? tick : tick);
    prims.push({ t: "line", x1: x0, y1: y, x2: x1, y2: y, color: GRID, width: 1 });
    prims.push({
      t: "text",
      x: x0 - 6,
      y: y + 3,
      s: formatTick(tick),
      size: 7,
      anchor: "end",
      color: TEXT,
    });
  }
  prims.push({ t: "line", x1: x0, y1: scale.range[0], x2: x0, y2: scale.range[1], color: AXIS, width: 1 });
}

function drawXAxis(prims: Prim[], scale: Scale, y0: number, y1: number) {
  for (const tick of scale.ticks()) {
    const x = scale.map(tick);
    prims.push({ t: "line", x1: x, y1: y0, x2: x, y2: y1, color: GRID, width: 1 });
    prims.push({
      t: "text",
      x,
      y: y0 + 12,
      s: formatTick(tick),
      size: 7,
      anchor: "middle",
      color: TEXT,
    });
  }
  prims.push({ t: "line", x1: scale.range[0], y1: y0, x2: scale.range[1], y2: y0, color: AXIS, width: 1 });
}

// === line chart ===========================================================

function lineScene(figure: FigureData, lines: LineGroup[], prims: Prim[]) {
  const style = figure.spec.style;
  const plot = {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
  const xs = lines.flatMap((l) => l.points.map((p) => p.x));
  const ys = lines.flatMap((l) => l.points.map((p) => p.y));
  const xScale = style.logX ? logScale(xs, [plot.x0, plot.x1]) : linearScale(xs, [plot.x0, plot.x1]);
  const yScale = figure.logYApplied ? logScale(ys, [plot.y0, plot.y1]) : linearScale(ys, [plot.y0, plot.y1]);

  drawXAxis(prims, xScale, plot.y0, plot.y1);
  drawYAxis(prims, yScale, plot.x0, plot.x1, figure.logYApplied);

  // reference-slope overlays: straight lines in (ln x, y) anchored at the
  // first point of the matching data column
  const refSlopes = style.refSlopes ?? [];
  for (const [i, slope] of refSlopes.entries()) {
    if (slope === null || slope === undefined || i >= lines.length) continue;
    const anchor = lines[i].points[0];
    if (!anchor || !style.logX || figure.logYApplied) continue;
    const xLo = xScale.domain[0];
    const xHi = xScale.domain[1];
    const yAt = (x: number) => anchor.y + slope * (Math.log(x) - Math.log(anchor.x));
    prims.push({
      t: "poly",
      pts: [
        [xScale.map(xLo), yScale.map(yAt(xLo))],
        [xScale.map(xHi), yScale.map(yAt(xHi))],
      ],
      color: REF,
      width: 1,
      dashed: true,
    });
    prims.push({
      t: "text",
      x: xScale.map(xHi) - 4,
      y: yScale.map(yAt(xHi)) - 5,
      s: `slope ${formatTick(slope)}`,
      size: 7,
      anchor: "end",
      color: REF,
    });
  }

  for (const line of lines) {
    const pts: [number, number][] = line.points.map((p) => [xScale.map(p.x), yScale.map(p.y)]);
    if (pts.length > 1) {
      prims.push({ t: "poly", pts, color: color(line.colorIndex), width: 2, dashed: line.dashed });
    }
    for (const p of line.points) {
      prims.push({
        t: "marker",
        x: xScale.map(p.x),
        y: yScale.map(p.y),
        r: 3,
        color: color(line.colorIndex),
        data: p.data,
      });
    }
  }

  // legend: one row per line, top-left inside the plot
  for (const [i, line] of lines.entries()) {
    const lx = plot.x0 + 12;
    const ly = plot.y1 + 12 + i * 13;
    prims.push({
      t: "line",
      x1: lx,
      y1: ly - 3,
      x2: lx + 22,
      y2: ly - 3,
      color: color(line.colorIndex),
      width: 2,
      dashed: line.dashed,
    });
    prims.push({ t: "text", x: lx + 28, y: ly, s: truncate(line.label, 44), size: 7, anchor: "start", color: TEXT });
  }
}

// === bar chart ============================================================

function barScene(figure: FigureData, panels: BarPanel[], prims: Prim[]) {
  const n = panels.length;
  const innerWidth = (WIDTH - MARGIN.left - MARGIN.right - (n - 1) * 48) / n;
  for (const [pi, panel] of panels.entries()) {
    const x0 = MARGIN.left + pi * (innerWidth + 48);
    const x1 = x0 + innerWidth;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    const values = panel.bars.map((b) => b.value);
    const yScale = linearScale([...values, 0], [y0, y1]);
    drawYAxis(prims, yScale, x0, x1, false);
    prims.push({ t: "line", x1: x0, y1: y0, x2: x1, y2: y0, color: AXIS, width: 1 });

    const slot = innerWidth / panel.bars.length;
    const barWidth = Math.min(slot * 0.7, 64);
    const base = yScale.map(0);
    for (const [bi, bar] of panel.bars.entries()) {
      const cx = x0 + slot * (bi + 0.5);
      const top = yScale.map(bar.value);
      prims.push({
        t: "rect",
        x: cx - barWidth / 2,
        y: Math.min(top, base),
        w: barWidth,
        h: Math.abs(base - top),
        color: color(panel.colorIndex),
        data: bar.data,
      });
      const maxChars = Math.max(3, Math.floor(slot / 6) - 1);
      prims.push({
        t: "text",
        x: cx,
        y: y0 + 12,
        s: truncate(bar.label, maxChars),
        size: 7,
        anchor: "middle",
        color: TEXT,
      });
    }
    prims.push({
      t: "text",
      x: (x0 + x1) / 2,
      y: y1 - 8,
      s: panel.column,
      size: 7,
      anchor: "middle",
      color: TEXT,
    });
  }
}

// === scene assembly =======================================================

export function buildScene(figure: FigureData): Scene {
  const prims: Prim[] = [];
  const spec = figure.spec;
  prims.push({
    t: "text",
    x: MARGIN.left,
    y: 24,
    s: `${spec.kind} / ${spec.series}`,
    size: 14,
    anchor: "start",
    color: TEXT,
  });
  if (figure.lines) lineScene(figure, figure.lines, prims);
  if (figure.panels) barScene(figure, figure.panels, prims);

  const caption = `config ${spec.configHash} seed ${spec.seed}`;
  prims.push({
    t: "text",
    x: MARGIN.left,
    y: HEIGHT - 14,
    s: caption,
    size: 7,
    anchor: "start",
    color: TEXT,
  });
  return { width: WIDTH, height: HEIGHT, background: "#ffffff", prims, caption };
}
