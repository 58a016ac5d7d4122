/** plot_decay command implementation (separated from the bin entry so tests
 * can call it in-process). */

import { basename } from 'node:path';
import { readFileSync, writeFileSync } from 'node:fs';

import { Curve, SchemaError, parseDiagnosticsCsv } from './csv.js';
import { PlotSpec, Scale, computeLayout } from './layout.js';
import { renderPng } from './png.js';
import { renderSvg } from './svg.js';

export const USAGE =
  'usage: plot_decay <out.img> <csv[:label]> [<csv[:label]> ...] ' +
  '[--scale semilog|loglog|both] [--fit] [--raster]';

interface Args {
  outPath: string;
  inputs: Array<{ path: string; label: string }>;
  scale: Scale;
  fit: boolean;
  raster: boolean;
}

export function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  let scale: Scale = 'both';
  let fit = false;
  let raster = false;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === '--scale') {
      const value = argv[++i];
      if (value !== 'semilog' && value !== 'loglog' && value !== 'both') {
        throw new Error(`--scale must be semilog, loglog or both (got '${value}')`);
      }
      scale = value;
    } else if (arg === '--fit') {
      fit = true;
    } else if (arg === '--raster') {
      raster = true;
    } else if (arg.startsWith('--')) {
      throw new Error(`unknown option '${arg}'`);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length < 2) {
    throw new Error(USAGE);
  }
  const [outPath, ...specs] = positional;
  const inputs = specs.map((spec) => {
    const colon = spec.lastIndexOf(':');
    if (colon > 1) {
      // allow drive-letter-free paths; label follows the last colon
      return { path: spec.slice(0, colon), label: spec.slice(colon + 1) };
    }
    return { path: spec, label: basename(spec).replace(/\.csv$/i, '') };
  });
  const labels = new Set(inputs.map((s) => s.label));
  if (labels.size !== inputs.length) {
    throw new Error('labels must be unique');
  }
  return { outPath, inputs, scale, fit, raster };
}

export function runCli(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`plot_decay: ${(err as Error).message}`);
    return 1;
  }
  try {
    const curves: Curve[] = args.inputs.map(({ path, label }) =>
      parseDiagnosticsCsv(readFileSync(path, 'utf8'), path, label),
    );
    const spec: PlotSpec = { curves, scale: args.scale, fitOverlay: args.fit };
    const layout = computeLayout(spec);
    const asPng = args.raster || /\.png$/i.test(args.outPath);
    if (asPng) {
      writeFileSync(args.outPath, renderPng(layout));
    } else {
      writeFileSync(args.outPath, renderSvg(layout));
    }
    for (const { label, fit } of layout.fits) {
      console.log(
        `fit ${label}: m=${fit.m.toPrecision(12)} M=${fit.M.toPrecision(12)} ` +
        `residual_rms=${fit.residualRms.toPrecision(6)}`,
      );
    }
    console.log(`wrote ${args.outPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`plot_decay: schema error: ${err.message}`);
    } else {
      console.error(`plot_decay: ${(err as Error).message}`);
    }
    return 2;
  }
}
