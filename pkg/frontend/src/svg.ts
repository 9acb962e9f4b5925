/**
 * Tiny deterministic SVG scene builder: fixed fonts, fixed precision,
 * no timestamps, so identical input data yields byte-identical files.
 */

export type Scale = 'linear' | 'log';

export interface Axis {
  label: string;
  scale: Scale;
  min: number;
  max: number;
}

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

const PALETTE = ['#1f6fb2', '#d1495b', '#3a7d44', '#8d5a97', '#c77f3d', '#444444'];

export function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}

function fmt(v: number): string {
  if (!isFinite(v)) return '0';
  return v.toFixed(2);
}

export function fmtTick(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return Number(v.toPrecision(4)).toString();
  }
  return v.toExponential(1).replace('e-', 'e-').replace('e+', 'e');
}

export class Plot {
  private parts: string[] = [];
  constructor(
    private xaxis: Axis,
    private yaxis: Axis,
    private title: string,
  ) {}

  private tx(x: number): number {
    const { min, max, scale } = this.xaxis;
    const t = scale === 'log' ? (Math.log(x) - Math.log(min)) / (Math.log(max) - Math.log(min)) : (x - min) / (max - min);
    return MARGIN.left + t * (WIDTH - MARGIN.left - MARGIN.right);
  }

  private ty(y: number): number {
    const { min, max, scale } = this.yaxis;
    const t = scale === 'log' ? (Math.log(y) - Math.log(min)) / (Math.log(max) - Math.log(min)) : (y - min) / (max - min);
    return HEIGHT - MARGIN.bottom - t * (HEIGHT - MARGIN.top - MARGIN.bottom);
  }

  polyline(xs: number[], ys: number[], stroke: string, dash = ''): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      const x = xs[i];
      const y = ys[i];
      if (!isFinite(x) || !isFinite(y)) continue;
      if (this.xaxis.scale === 'log' && x <= 0) continue;
      if (this.yaxis.scale === 'log' && y <= 0) continue;
      pts.push(`${fmt(this.tx(x))},${fmt(this.ty(y))}`);
    }
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : '';
    this.parts.push(
      `<polyline fill="none" stroke="${stroke}" stroke-width="1.5"${dashAttr} points="${pts.join(' ')}"/>`,
    );
  }

  markers(xs: number[], ys: number[], fill: string): void {
    for (let i = 0; i < xs.length; i++) {
      const x = xs[i];
      const y = ys[i];
      if (!isFinite(x) || !isFinite(y)) continue;
      if (this.xaxis.scale === 'log' && x <= 0) continue;
      if (this.yaxis.scale === 'log' && y <= 0) continue;
      this.parts.push(`<circle cx="${fmt(this.tx(x))}" cy="${fmt(this.ty(y))}" r="3" fill="${fill}"/>`);
    }
  }

  annotation(text: string, slot = 0): void {
    const y = MARGIN.top + 16 + 16 * slot;
    this.parts.push(
      `<text x="${MARGIN.left + 12}" y="${y}" font-size="13" fill="#222222">${escapeXml(text)}</text>`,
    );
  }

  legend(entries: { label: string; stroke: string }[]): void {
    entries.forEach((e, i) => {
      const y = MARGIN.top + 16 + 16 * i;
      const x = WIDTH - MARGIN.right - 170;
      this.parts.push(`<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${e.stroke}" stroke-width="2"/>`);
      this.parts.push(`<text x="${x + 28}" y="${y}" font-size="12" fill="#222222">${escapeXml(e.label)}</text>`);
    });
  }

  private ticks(axis: Axis, count = 5): number[] {
    const out: number[] = [];
    if (axis.scale === 'log') {
      const lo = Math.ceil(Math.log10(axis.min) - 1e-9);
      const hi = Math.floor(Math.log10(axis.max) + 1e-9);
      for (let d = lo; d <= hi; d++) out.push(Math.pow(10, d));
      if (out.length < 2) return [axis.min, axis.max];
      return out;
    }
    for (let i = 0; i <= count; i++) out.push(axis.min + ((axis.max - axis.min) * i) / count);
    return out;
  }

  render(): string {
    const frame: string[] = [];
    frame.push(`<?xml version="1.0" encoding="UTF-8"?>`);
    frame.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="DejaVu Sans, Helvetica, sans-serif">`,
    );
    frame.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    frame.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#000000"/>`);
    frame.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#000000"/>`);
    for (const t of this.ticks(this.xaxis)) {
      const px = this.tx(t);
      if (!isFinite(px)) continue;
      frame.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#000000"/>`);
      frame.push(
        `<text x="${fmt(px)}" y="${y0 + 20}" font-size="11" text-anchor="middle" fill="#222222">${fmtTick(t)}</text>`,
      );
    }
    for (const t of this.ticks(this.yaxis)) {
      const py = this.ty(t);
      if (!isFinite(py)) continue;
      frame.push(`<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#000000"/>`);
      frame.push(
        `<text x="${x0 - 8}" y="${fmt(py + 4)}" font-size="11" text-anchor="end" fill="#222222">${fmtTick(t)}</text>`,
      );
    }
    frame.push(
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" font-size="13" text-anchor="middle" fill="#000000">${escapeXml(this.xaxis.label)}</text>`,
    );
    frame.push(
      `<text x="18" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 ${(y0 + y1) / 2})" fill="#000000">${escapeXml(this.yaxis.label)}</text>`,
    );
    frame.push(
      `<text x="${(x0 + x1) / 2}" y="22" font-size="15" text-anchor="middle" fill="#000000">${escapeXml(this.title)}</text>`,
    );
    return frame.concat(this.parts, ['</svg>', '']).join('\n');
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function bounds(values: number[], scale: Scale, pad = 0.08): { min: number; max: number } {
  const finite = values.filter((v) => isFinite(v) && (scale !== 'log' || v > 0));
  if (finite.length === 0) {
    throw new Error('no finite data to scale axis');
  }
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (scale === 'log') {
    if (lo === hi) {
      lo /= 10;
      hi *= 10;
    }
    const l = Math.log(lo);
    const h = Math.log(hi);
    return { min: Math.exp(l - pad * (h - l)), max: Math.exp(h + pad * (h - l)) };
  }
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  return { min: lo - pad * span, max: hi + pad * span };
}
