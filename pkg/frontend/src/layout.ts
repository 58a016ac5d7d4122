/** Panel geometry shared by the SVG and raster backends. */

import { Curve } from './csv.js';
import { DecayFit, fitDecay } from './fit.js';

export type Scale = 'semilog' | 'loglog' | 'both';

export interface PlotSpec {
  curves: Curve[];
  scale: Scale;
  fitOverlay: boolean;
}

export interface Tick {
  pos: number; // pixel coordinate
  label: string;
}

export interface Polyline {
  label: string;
  color: string;
  dashed: boolean;
  points: Array<[number, number]>;
}

export interface Panel {
  title: string;
  x0: number;
  y0: number;
  width: number;
  height: number;
  xTicks: Tick[];
  yTicks: Tick[];
  xLabel: string;
  yLabel: string;
  lines: Polyline[];
}

export interface Layout {
  width: number;
  height: number;
  panels: Panel[];
  legend: Array<{ label: string; color: string }>;
  fits: Array<{ label: string; fit: DecayFit }>;
}

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b'];

const PANEL_W = 420;
const PANEL_H = 360;
const MARGIN = { left: 72, right: 24, top: 40, bottom: 52 };

function decadeTicks(lo: number, hi: number, pixels: number, flip: boolean): Tick[] {
  const first = Math.ceil(lo - 1e-9);
  const last = Math.floor(hi + 1e-9);
  const count = Math.max(1, last - first + 1);
  const step = Math.ceil(count / 8);
  const ticks: Tick[] = [];
  for (let d = first; d <= last; d += step) {
    const frac = (d - lo) / (hi - lo);
    const pos = flip ? pixels * (1 - frac) : pixels * frac;
    ticks.push({ pos, label: `1e${d}` });
  }
  return ticks;
}

function linearTicks(lo: number, hi: number, pixels: number): Tick[] {
  const span = hi - lo;
  const rawStep = span / 6;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= rawStep) {
      step = mag * mult;
      break;
    }
  }
  const ticks: Tick[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    const frac = (v - lo) / span;
    // trim float noise in the label
    const label = Number(v.toPrecision(10)).toString();
    ticks.push({ pos: pixels * frac, label });
  }
  return ticks;
}

function buildPanel(
  kind: 'semilog' | 'loglog',
  index: number,
  spec: PlotSpec,
  fits: Array<{ label: string; fit: DecayFit }>,
): Panel {
  const x0 = MARGIN.left + index * (PANEL_W + MARGIN.left);
  const y0 = MARGIN.top;

  // plottable samples: positive energy, and positive time on the loglog panel
  const usable = spec.curves.map((c) => {
    const t: number[] = [];
    const e: number[] = [];
    for (let i = 0; i < c.t.length; i++) {
      if (c.energy[i] > 0 && (kind === 'semilog' || c.t[i] > 0)) {
        t.push(c.t[i]);
        e.push(c.energy[i]);
      }
    }
    return { label: c.label, t, e };
  });

  const allT = usable.flatMap((c) => c.t);
  const allE = usable.flatMap((c) => c.e);
  const tLo = kind === 'semilog' ? Math.min(...allT) : Math.log10(Math.min(...allT));
  const tHi = kind === 'semilog' ? Math.max(...allT) : Math.log10(Math.max(...allT));
  let eLo = Math.log10(Math.min(...allE));
  let eHi = Math.log10(Math.max(...allE));
  if (eHi - eLo < 1e-12) {
    eLo -= 0.5;
    eHi += 0.5;
  }
  const padE = 0.03 * (eHi - eLo);
  eLo -= padE;
  eHi += padE;

  const toX = (t: number) => {
    const v = kind === 'semilog' ? t : Math.log10(t);
    return ((v - tLo) / (tHi - tLo)) * PANEL_W;
  };
  const toY = (e: number) => (1 - (Math.log10(e) - eLo) / (eHi - eLo)) * PANEL_H;

  const lines: Polyline[] = usable.map((c, i) => ({
    label: c.label,
    color: PALETTE[i % PALETTE.length],
    dashed: false,
    points: c.t.map((t, k) => [toX(t), toY(c.e[k])] as [number, number]),
  }));

  if (spec.fitOverlay) {
    fits.forEach(({ label, fit }, i) => {
      const curve = usable.find((c) => c.label === label);
      if (!curve || curve.t.length === 0) return;
      const t0 = curve.t[0];
      const t1 = curve.t[curve.t.length - 1];
      const points: Array<[number, number]> = [];
      const steps = 64;
      for (let k = 0; k <= steps; k++) {
        const t = t0 + ((t1 - t0) * k) / steps;
        const e = Math.exp(fit.intercept + fit.slope * t);
        const y = toY(e);
        if (y >= 0 && y <= PANEL_H) points.push([toX(t), y]);
      }
      lines.push({
        label: `${label} fit`,
        color: PALETTE[i % PALETTE.length],
        dashed: true,
        points,
      });
    });
  }

  return {
    title: kind === 'semilog' ? 'energy decay (semilog)' : 'energy decay (log-log)',
    x0,
    y0,
    width: PANEL_W,
    height: PANEL_H,
    xTicks:
      kind === 'semilog'
        ? linearTicks(tLo, tHi, PANEL_W)
        : decadeTicks(tLo, tHi, PANEL_W, false),
    yTicks: decadeTicks(eLo, eHi, PANEL_H, true),
    xLabel: 't',
    yLabel: 'E(t)',
    lines,
  };
}

export function computeLayout(spec: PlotSpec): Layout {
  if (spec.curves.length === 0) {
    throw new Error('need at least one curve');
  }
  const labels = new Set(spec.curves.map((c) => c.label));
  if (labels.size !== spec.curves.length) {
    throw new Error('curve labels must be unique');
  }
  for (const c of spec.curves) {
    if (!c.energy.some((e) => e > 0)) {
      throw new Error(`curve '${c.label}' has no positive energy values to plot`);
    }
  }

  const fits = spec.fitOverlay
    ? spec.curves.map((c) => ({ label: c.label, fit: fitDecay(c.t, c.energy) }))
    : [];

  const kinds: Array<'semilog' | 'loglog'> =
    spec.scale === 'both' ? ['semilog', 'loglog'] : [spec.scale];
  const panels = kinds.map((kind, i) => buildPanel(kind, i, spec, fits));

  return {
    width: MARGIN.left + kinds.length * (PANEL_W + MARGIN.left) + MARGIN.right - MARGIN.left,
    height: MARGIN.top + PANEL_H + MARGIN.bottom,
    panels,
    legend: spec.curves.map((c, i) => ({
      label: c.label,
      color: PALETTE[i % PALETTE.length],
    })),
    fits,
  };
}
