/** Minimal raster fallback: curves, grid and frame on an RGB canvas,
 * encoded as PNG through node's zlib. Text is SVG-only. */

import { deflateSync } from 'node:zlib';

import { Layout } from './layout.js';

class Canvas {
  data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const k = (yi * this.width + xi) * 3;
    this.data[k] = rgb[0];
    this.data[k + 1] = rgb[1];
    this.data[k + 2] = rgb[2];
  }

  line(x0: number, y0: number, x1: number, y1: number,
       rgb: [number, number, number], dashed = false): void {
    // Bresenham over rounded endpoints; dash pattern 6 on / 4 off
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    let step = 0;
    for (;;) {
      if (!dashed || step % 10 < 6) this.set(xa, ya, rgb);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
      step += 1;
    }
  }
}

function hexToRgb(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

function crc32(buf: Uint8Array): number {
  let crc = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    crc ^= buf[i];
    for (let b = 0; b < 8; b++) {
      crc = (crc >>> 1) ^ (0xedb88320 & -(crc & 1));
    }
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(payload.length, 0);
  head.write(type, 4, 'ascii');
  const crcInput = Buffer.concat([head.subarray(4), payload]);
  const tail = Buffer.alloc(4);
  tail.writeUInt32BE(crc32(crcInput), 0);
  return Buffer.concat([head, payload, tail]);
}

function encodePng(canvas: Canvas): Buffer {
  const { width, height, data } = canvas;
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // color type: truecolor
  // scanlines with filter byte 0
  const raw = Buffer.alloc(height * (1 + width * 3));
  for (let y = 0; y < height; y++) {
    const rowStart = y * (1 + width * 3);
    raw[rowStart] = 0;
    raw.set(data.subarray(y * width * 3, (y + 1) * width * 3), rowStart + 1);
  }
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk('IHDR', ihdr),
    chunk('IDAT', deflateSync(raw, { level: 9 })),
    chunk('IEND', Buffer.alloc(0)),
  ]);
}

export function renderPng(layout: Layout): Buffer {
  const canvas = new Canvas(Math.ceil(layout.width), Math.ceil(layout.height));
  const frame: [number, number, number] = [68, 68, 68];
  const grid: [number, number, number] = [221, 221, 221];
  for (const panel of layout.panels) {
    const { x0, y0, width, height } = panel;
    for (const tick of panel.xTicks) {
      canvas.line(x0 + tick.pos, y0, x0 + tick.pos, y0 + height, grid);
    }
    for (const tick of panel.yTicks) {
      canvas.line(x0, y0 + tick.pos, x0 + width, y0 + tick.pos, grid);
    }
    canvas.line(x0, y0, x0 + width, y0, frame);
    canvas.line(x0 + width, y0, x0 + width, y0 + height, frame);
    canvas.line(x0 + width, y0 + height, x0, y0 + height, frame);
    canvas.line(x0, y0 + height, x0, y0, frame);
    for (const line of panel.lines) {
      const rgb = hexToRgb(line.color);
      for (let i = 1; i < line.points.length; i++) {
        const [ax, ay] = line.points[i - 1];
        const [bx, by] = line.points[i];
        if (
          Math.min(ax, bx) < 0 || Math.max(ax, bx) > width ||
          Math.min(ay, by) < 0 || Math.max(ay, by) > height
        ) {
          continue; // simple clip: drop segments leaving the panel
        }
        canvas.line(x0 + ax, y0 + ay, x0 + bx, y0 + by, rgb, line.dashed);
      }
    }
  }
  return encodePng(canvas);
}
