export { DIAGNOSTICS_HEADER, SchemaError, parseDiagnosticsCsv } from './csv.js';
export type { Curve } from './csv.js';
export { fitDecay } from './fit.js';
export type { DecayFit } from './fit.js';
export { computeLayout, PALETTE } from './layout.js';
export type { Layout, PlotSpec, Scale } from './layout.js';
export { renderSvg } from './svg.js';
export { renderPng } from './png.js';
export { parseArgs, runCli, USAGE } from './run.js';
