/**
 * Minimal PNG raster fallback: axes frame, grid lines, and series polylines
 * drawn into an RGBA buffer (no text), encoded with node's zlib. The SVG
 * output is the primary artifact; this exists for viewers without SVG
 * support.
 */
import { deflateSync } from "node:zlib";

import { ChartModel } from "./chart.js";

class Raster {
  data: Uint8Array;

  constructor(public width: number, public height: number) {
    this.data = new Uint8Array(width * height * 4).fill(255);
  }

  set(x: number, y: number, r: number, g: number, b: number): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const o = (yi * this.width + xi) * 4;
    this.data[o] = r;
    this.data[o + 1] = g;
    this.data[o + 2] = b;
    this.data[o + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, rgb: [number, number, number]): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, ...rgb);
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
    }
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (const b of bytes) {
    c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + payload.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, payload.length);
  for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
  out.set(payload, 8);
  view.setUint32(8 + payload.length, crc32(out.subarray(4, 8 + payload.length)));
  return out;
}

function encodePng(raster: Raster): Uint8Array {
  const { width, height, data } = raster;
  const ihdr = new Uint8Array(13);
  const view = new DataView(ihdr.buffer);
  view.setUint32(0, width);
  view.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  // scanlines with filter byte 0
  const rawLines = new Uint8Array(height * (width * 4 + 1));
  for (let y = 0; y < height; y++) {
    rawLines.set(
      data.subarray(y * width * 4, (y + 1) * width * 4),
      y * (width * 4 + 1) + 1
    );
  }
  const idat = deflateSync(rawLines);
  const signature = new Uint8Array([137, 80, 78, 71, 13, 10, 26, 10]);
  const parts = [
    signature,
    chunk("IHDR", ihdr),
    chunk("IDAT", new Uint8Array(idat)),
    chunk("IEND", new Uint8Array(0)),
  ];
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

function hexColor(color: string): [number, number, number] {
  return [
    parseInt(color.slice(1, 3), 16),
    parseInt(color.slice(3, 5), 16),
    parseInt(color.slice(5, 7), 16),
  ];
}

export function renderPng(model: ChartModel): Uint8Array {
  const raster = new Raster(Math.round(model.width), Math.round(model.height));
  const frame: [number, number, number] = [60, 60, 60];
  const grid: [number, number, number] = [225, 225, 225];
  for (const panel of model.panels) {
    const { left, top, width, height } = panel.plot;
    const bottom = top + height;
    const right = left + width;
    const xlen = Math.log(panel.xAxis.max) - Math.log(panel.xAxis.min);
    const ylen = Math.log(panel.yAxis.max) - Math.log(panel.yAxis.min);
    for (const t of panel.xAxis.ticks) {
      const f =
        panel.xAxis.scale === "log"
          ? (Math.log(t) - Math.log(panel.xAxis.min)) / xlen
          : (t - panel.xAxis.min) / (panel.xAxis.max - panel.xAxis.min);
      const x = left + f * width;
      raster.line(x, top, x, bottom, grid);
    }
    for (const t of panel.yAxis.ticks) {
      const f =
        panel.yAxis.scale === "log"
          ? (Math.log(t) - Math.log(panel.yAxis.min)) / ylen
          : (t - panel.yAxis.min) / (panel.yAxis.max - panel.yAxis.min);
      const y = bottom - f * height;
      raster.line(left, y, right, y, grid);
    }
    raster.line(left, top, right, top, frame);
    raster.line(left, bottom, right, bottom, frame);
    raster.line(left, top, left, bottom, frame);
    raster.line(right, top, right, bottom, frame);
    for (const series of panel.series) {
      const rgb = hexColor(series.color);
      for (let i = 1; i < series.screen.length; i++) {
        raster.line(
          series.screen[i - 1].x, series.screen[i - 1].y,
          series.screen[i].x, series.screen[i].y, rgb
        );
      }
    }
  }
  return encodePng(raster);
}
