/** Deterministic SVG backend: no timestamps, fixed numeric formatting. */

import { Layout, Panel } from './layout.js';

const FONT = 'font-family="Helvetica, Arial, sans-serif"';

function fmt(v: number): string {
  return v.toFixed(2);
}

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function panelSvg(panel: Panel, clipId: string): string {
  const parts: string[] = [];
  const { x0, y0, width, height } = panel;
  parts.push(`<g transform="translate(${fmt(x0)},${fmt(y0)})">`);
  parts.push(
    `<clipPath id="${clipId}"><rect x="0" y="0" width="${width}" height="${height}"/></clipPath>`,
  );
  parts.push(
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white" stroke="#444" stroke-width="1"/>`,
  );
  for (const tick of panel.xTicks) {
    parts.push(
      `<line x1="${fmt(tick.pos)}" y1="0" x2="${fmt(tick.pos)}" y2="${height}" stroke="#ddd" stroke-width="0.5"/>`,
      `<text x="${fmt(tick.pos)}" y="${height + 18}" text-anchor="middle" font-size="11" ${FONT}>${esc(tick.label)}</text>`,
    );
  }
  for (const tick of panel.yTicks) {
    parts.push(
      `<line x1="0" y1="${fmt(tick.pos)}" x2="${width}" y2="${fmt(tick.pos)}" stroke="#ddd" stroke-width="0.5"/>`,
      `<text x="-6" y="${fmt(tick.pos + 4)}" text-anchor="end" font-size="11" ${FONT}>${esc(tick.label)}</text>`,
    );
  }
  for (const line of panel.lines) {
    if (line.points.length === 0) continue;
    const d = line.points.map((p) => `${fmt(p[0])},${fmt(p[1])}`).join(' ');
    const dash = line.dashed ? ' stroke-dasharray="6,4"' : '';
    parts.push(
      `<polyline points="${d}" fill="none" stroke="${line.color}" stroke-width="1.5"${dash} clip-path="url(#${clipId})"/>`,
    );
  }
  parts.push(
    `<text x="${fmt(width / 2)}" y="-12" text-anchor="middle" font-size="13" ${FONT}>${esc(panel.title)}</text>`,
    `<text x="${fmt(width / 2)}" y="${height + 38}" text-anchor="middle" font-size="12" ${FONT}>${esc(panel.xLabel)}</text>`,
    `<text x="-52" y="${fmt(height / 2)}" text-anchor="middle" font-size="12" ${FONT} transform="rotate(-90 -52 ${fmt(height / 2)})">${esc(panel.yLabel)}</text>`,
  );
  parts.push('</g>');
  return parts.join('\n');
}

export function renderSvg(layout: Layout): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" height="${layout.height}" viewBox="0 0 ${layout.width} ${layout.height}">`,
  );
  parts.push(`<rect width="${layout.width}" height="${layout.height}" fill="white"/>`);
  layout.panels.forEach((panel, i) => parts.push(panelSvg(panel, `clip${i}`)));

  // legend in the first panel's top-right corner
  const p0 = layout.panels[0];
  const lx = p0.x0 + p0.width - 150;
  let ly = p0.y0 + 14;
  for (const entry of layout.legend) {
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(ly - 4)}" x2="${fmt(lx + 22)}" y2="${fmt(ly - 4)}" stroke="${entry.color}" stroke-width="2"/>`,
      `<text x="${fmt(lx + 28)}" y="${fmt(ly)}" font-size="11" ${FONT}>${esc(entry.label)}</text>`,
    );
    ly += 16;
  }
  parts.push('</svg>');
  return parts.join('\n') + '\n';
}
