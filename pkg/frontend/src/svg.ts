import { Prim, Scene } from "./scene.js";

// === SVG backend ==========================================================
// Marks carry their verbatim source cells as data-* attributes and the full
// data manifest rides in a <metadata> block, so the plotted values can be
// read back out of the image file itself.

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function num(v: number): string {
  return String(Math.round(v * 100) / 100);
}

function dataAttrs(data: { series: string; x: string; y: string } | undefined): string {
  if (!data) return "";
  return ` data-series="${esc(data.series)}" data-x="${esc(data.x)}" data-y="${esc(data.y)}"`;
}

function primSvg(p: Prim): string {
  switch (p.t) {
    case "line": {
      const dash = p.dashed ? ' stroke-dasharray="6 4"' : "";
      return `<line x1="${num(p.x1)}" y1="${num(p.y1)}" x2="${num(p.x2)}" y2="${num(p.y2)}" stroke="${p.color}" stroke-width="${p.width}"${dash}/>`;
    }
    case "poly": {
      const dash = p.dashed ? ' stroke-dasharray="6 4"' : "";
      const pts = p.pts.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
      return `<polyline points="${pts}" fill="none" stroke="${p.color}" stroke-width="${p.width}"${dash}/>`;
    }
    case "rect":
      return `<rect x="${num(p.x)}" y="${num(p.y)}" width="${num(p.w)}" height="${num(p.h)}" fill="${p.color}"${dataAttrs(p.data)}/>`;
    case "marker":
      return `<circle cx="${num(p.x)}" cy="${num(p.y)}" r="${p.r}" fill="${p.color}"${dataAttrs(p.data)}/>`;
    case "text": {
      const anchor = p.anchor === "start" ? "" : ` text-anchor="${p.anchor}"`;
      const size = p.size <= 7 ? 11 : 18;
      return `<text x="${num(p.x)}" y="${num(p.y)}" font-family="monospace" font-size="${size}"${anchor} fill="${p.color}">${esc(p.s)}</text>`;
    }
  }
}

export function sceneToSvg(scene: Scene, manifestJson: string): string {
  const body = scene.prims.map(primSvg).join("\n  ");
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${scene.width} ${scene.height}" width="${scene.width}" height="${scene.height}">
  <metadata id="figure-data">${esc(manifestJson)}</metadata>
  <rect x="0" y="0" width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>
  ${body}
</svg>
`;
}

// pull the verbatim plotted values back out of a rendered SVG (tests + round-trip)
export function extractSvgData(svg: string): { series: string; x: string; y: string }[] {
  const out: { series: string; x: string; y: string }[] = [];
  const re = /data-series="([^"]*)" data-x="([^"]*)" data-y="([^"]*)"/g;
  const unesc = (s: string) =>
    s.replace(/&quot;/g, '"').replace(/&lt;/g, "<").replace(/&gt;/g, ">").replace(/&amp;/g, "&");
  for (const m of svg.matchAll(re)) {
    out.push({ series: unesc(m[1]), x: unesc(m[2]), y: unesc(m[3]) });
  }
  return out;
}

export function extractSvgMetadata(svg: string): string | null {
  const m = svg.match(/<metadata id="figure-data">([\s\S]*?)<\/metadata>/);
  if (!m) return null;
  return m[1]
    .replace(/&quot;/g, '"')
    .replace(/&lt;/g, "<")
    .replace(/&gt;/g, ">")
    .replace(/&amp;/g, "&");
}
