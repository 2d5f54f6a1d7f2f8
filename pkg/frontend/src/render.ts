/**
 * Paint a computed layout onto a raster: grid, bands or bars, axes,
 * ticks, legend.  No data math happens here; everything positional comes
 * from the layout.
 */

import type { RmseLayout, TransientLayout } from "./layout.js";
import { Raster, type RGB } from "./raster.js";

const AXIS: RGB = [40, 40, 40];
const GRID: RGB = [225, 225, 225];
const TEXT: RGB = [60, 60, 60];
const BAND_ALPHA = 0.25;

export function renderTransient(layout: TransientLayout): Raster {
  const r = new Raster(layout.width, layout.height);
  const { plot } = layout;

  for (const tick of layout.yTicks)
    r.line(plot.x, tick.pos, plot.x + plot.w, tick.pos, GRID);

  for (const s of layout.series) r.band(s.upper, s.lower, s.color, BAND_ALPHA);
  for (const s of layout.series) r.polyline(s.median, s.color);

  // axes frame
  r.line(plot.x, plot.y, plot.x, plot.y + plot.h, AXIS);
  r.line(plot.x, plot.y + plot.h, plot.x + plot.w, plot.y + plot.h, AXIS);

  for (const tick of layout.xTicks) {
    r.line(tick.pos, plot.y + plot.h, tick.pos, plot.y + plot.h + 4, AXIS);
    r.text(tick.pos - r.textWidth(tick.label) / 2, plot.y + plot.h + 8, tick.label, TEXT);
  }
  for (const tick of layout.yTicks) {
    r.line(plot.x - 4, tick.pos, plot.x, tick.pos, AXIS);
    r.text(plot.x - 8 - r.textWidth(tick.label), tick.pos - 3, tick.label, TEXT);
  }
  r.text(plot.x + plot.w / 2 - r.textWidth("t (s)") / 2, layout.height - 14, "t (s)", TEXT);
  r.text(6, plot.y - 16, "squared tracking error (p05/p50/p95)", TEXT);

  // legend, to the right of the plot
  const lx = plot.x + plot.w + 14;
  let ly = plot.y + 8;
  for (const s of layout.series) {
    r.fillRect(lx, ly, 14, 8, s.color, BAND_ALPHA);
    r.line(lx, ly + 4, lx + 14, ly + 4, s.color);
    r.text(lx + 20, ly, s.symmetry, TEXT);
    ly += 16;
  }
  return r;
}

export function renderRmse(layout: RmseLayout): Raster {
  const r = new Raster(layout.width, layout.height);
  const { plot } = layout;

  for (const tick of layout.yTicks)
    r.line(plot.x, tick.pos, plot.x + plot.w, tick.pos, GRID);

  for (const bar of layout.bars) {
    r.fillRect(bar.rect.x, bar.rect.y, bar.rect.w, bar.rect.h, bar.color, 0.55);
    // bar outline at the median
    r.line(bar.rect.x, bar.rect.y, bar.rect.x + bar.rect.w - 1, bar.rect.y, bar.color);
    // whisker from p20 to p80 with end caps
    r.line(bar.whiskerX, bar.whiskerTop, bar.whiskerX, bar.whiskerBottom, AXIS);
    r.line(bar.whiskerX - 5, bar.whiskerTop, bar.whiskerX + 5, bar.whiskerTop, AXIS);
    r.line(bar.whiskerX - 5, bar.whiskerBottom, bar.whiskerX + 5, bar.whiskerBottom, AXIS);
    const label = bar.symmetry;
    r.text(bar.whiskerX - r.textWidth(label) / 2, plot.y + plot.h + 8, label, TEXT);
  }

  r.line(plot.x, plot.y, plot.x, plot.y + plot.h, AXIS);
  r.line(plot.x, plot.y + plot.h, plot.x + plot.w, plot.y + plot.h, AXIS);
  for (const tick of layout.yTicks) {
    r.line(plot.x - 4, tick.pos, plot.x, tick.pos, AXIS);
    r.text(plot.x - 8 - r.textWidth(tick.label), tick.pos - 3, tick.label, TEXT);
  }
  r.text(6, plot.y - 16, "rmse (p20/median/p80)", TEXT);
  return r;
}
