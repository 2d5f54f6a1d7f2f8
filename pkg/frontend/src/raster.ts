/**
 * Tiny software rasterizer: an RGBA byte buffer with just enough drawing
 * primitives for band and bar charts.  All blending is source-over with a
 * scalar alpha; all inputs are plain pixel coordinates.
 */

import { GLYPHS, GLYPH_H, GLYPH_W } from "./font.js";

export type RGB = [number, number, number];
export interface Pt {
  x: number;
  y: number;
}

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array; // RGBA rows, top to bottom

  constructor(width: number, height: number, bg: RGB = [255, 255, 255]) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = bg[0];
      this.data[4 * i + 1] = bg[1];
      this.data[4 * i + 2] = bg[2];
      this.data[4 * i + 3] = 255;
    }
  }

  blend(x: number, y: number, c: RGB, alpha = 1): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.data[i] = Math.round(c[0] * alpha + this.data[i] * (1 - alpha));
    this.data[i + 1] = Math.round(c[1] * alpha + this.data[i + 1] * (1 - alpha));
    this.data[i + 2] = Math.round(c[2] * alpha + this.data[i + 2] * (1 - alpha));
    this.data[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, c: RGB, alpha = 1): void {
    const xa = Math.round(x0);
    const ya = Math.round(y0);
    for (let y = ya; y < ya + Math.round(h); y++)
      for (let x = xa; x < xa + Math.round(w); x++) this.blend(x, y, c, alpha);
  }

  vspan(x: number, y0: number, y1: number, c: RGB, alpha = 1): void {
    const lo = Math.round(Math.min(y0, y1));
    const hi = Math.round(Math.max(y0, y1));
    for (let y = lo; y <= hi; y++) this.blend(x, y, c, alpha);
  }

  line(x0: number, y0: number, x1: number, y1: number, c: RGB): void {
    // Bresenham on rounded endpoints
    let xa = Math.round(x0), ya = Math.round(y0);
    const xb = Math.round(x1), yb = Math.round(y1);
    const dx = Math.abs(xb - xa), sx = xa < xb ? 1 : -1;
    const dy = -Math.abs(yb - ya), sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.blend(xa, ya, c);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) { err += dy; xa += sx; }
      if (e2 <= dx) { err += dx; ya += sy; }
    }
  }

  polyline(pts: Pt[], c: RGB): void {
    for (let i = 0; i + 1 < pts.length; i++)
      this.line(pts[i].x, pts[i].y, pts[i + 1].x, pts[i + 1].y, c);
  }

  /**
   * Fill the region between two polylines sharing the same x sequence
   * (the percentile band).  Filled column by column so a degenerate band
   * (upper = lower) collapses to a one-pixel line without special cases.
   */
  band(upper: Pt[], lower: Pt[], c: RGB, alpha: number): void {
    if (upper.length < 2 || upper.length !== lower.length) return;
    const first = Math.round(upper[0].x);
    const last = Math.round(upper[upper.length - 1].x);
    let seg = 0;
    for (let cx = first; cx <= last; cx++) {
      while (seg + 2 < upper.length && upper[seg + 1].x < cx) seg++;
      const span = upper[seg + 1].x - upper[seg].x || 1;
      const f = Math.min(1, Math.max(0, (cx - upper[seg].x) / span));
      const yU = upper[seg].y + f * (upper[seg + 1].y - upper[seg].y);
      const yL = lower[seg].y + f * (lower[seg + 1].y - lower[seg].y);
      this.vspan(cx, yU, yL, c, alpha);
    }
  }

  text(x: number, y: number, s: string, c: RGB, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of s) {
      const glyph = GLYPHS[ch];
      if (glyph) {
        for (let row = 0; row < GLYPH_H; row++)
          for (let col = 0; col < GLYPH_W; col++)
            if (glyph[row] & (1 << (GLYPH_W - 1 - col)))
              this.fillRect(cx + col * scale, cy + row * scale, scale, scale, c);
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  textWidth(s: string, scale = 1): number {
    return s.length * (GLYPH_W + 1) * scale - scale;
  }
}
