export { render, figureSpecsForRun, loadRunInputs } from "./render.js";
export type { RenderOptions, RenderResult } from "./render.js";
export type { FigureSpec, FigureStyle, ImageFormat, PlottedPoint } from "./figure.js";
export { parseSummary, parseManifest, RunDirError, SchemaError, KNOWN_SCHEMA_VERSIONS } from "./schema.js";
export type { Summary, Manifest, SeriesMeta } from "./schema.js";
export { extractSvgData, extractSvgMetadata } from "./svg.js";
export { readPngTexts, readPngSize } from "./png.js";
export { DATA_MANIFEST_SCHEMA } from "./sidecar.js";
export type { DataManifest } from "./sidecar.js";
