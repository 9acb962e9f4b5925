/**
 * The four figure kinds, all reading the flat harness CSV schema.
 *
 * residual-decay    log residual aggregate vs level n, one curve per eps,
 *                   per-curve geometric decay rate annotated
 * balance-error     error vs time, one curve per (eps, n)
 * slope-fit         log-log final (max-over-time) error vs eps per n, with
 *                   the fitted exponent +/- standard error annotated
 * gevrey-spectrum   fitted spectral decay rate vs eps (summary of the
 *                   sigma_fit column across a sweep)
 */

import { CsvError, Table, distinct, filterRows, numbers, parseCsv, requireColumns } from './csv.js';
import { linearFit, powerLawFit } from './fit.js';
import { Plot, bounds, color } from './svg.js';
import { FigureSpec } from './spec.js';
import * as fs from 'node:fs';

export interface RenderedFigure {
  svg: string;
  /** fitted exponents keyed by curve label (slope-fit and residual-decay) */
  slopes: Record<string, { slope: number; stderr: number }>;
}

function readTables(paths: string[]): Table {
  const tables = paths.map((p) => parseCsv(fs.readFileSync(p, 'utf8')));
  const columns = tables[0].columns;
  for (const t of tables.slice(1)) {
    if (t.columns.join(',') !== columns.join(',')) {
      throw new CsvError('input files carry different schemas');
    }
  }
  return { columns, rows: tables.flatMap((t) => t.rows) };
}

function fnum(row: Record<string, string>, col: string): number {
  return Number.parseFloat(row[col]);
}

export function renderFigure(spec: FigureSpec): RenderedFigure {
  const table = readTables(spec.input);
  switch (spec.kind) {
    case 'residual-decay':
      return residualDecay(table, spec);
    case 'balance-error':
      return balanceError(table, spec);
    case 'slope-fit':
      return slopeFit(table, spec);
    case 'gevrey-spectrum':
      return gevreySpectrum(table, spec);
  }
}

function residualDecay(table: Table, spec: FigureSpec): RenderedFigure {
  requireColumns(table, ['eps', 'n', 'res_aggregate_s']);
  const epsValues = distinct(table, 'eps');
  const ys = numbers(table, 'res_aggregate_s').filter((v) => isFinite(v) && v > 0);
  const ns = numbers(table, 'n');
  const plot = new Plot(
    { label: 'level n', scale: spec.xscale ?? 'linear', ...bounds(ns, spec.xscale ?? 'linear') },
    { label: 'residual aggregate (H^s)', scale: spec.yscale ?? 'log', ...bounds(ys, spec.yscale ?? 'log') },
    spec.title ?? 'Residual decay across slaving levels',
  );
  const slopes: RenderedFigure['slopes'] = {};
  const legend: { label: string; stroke: string }[] = [];
  epsValues.forEach((eps, i) => {
    const sub = filterRows(table, (r) => r['eps'] === eps);
    const xs = numbers(sub, 'n');
    const yv = numbers(sub, 'res_aggregate_s');
    plot.polyline(xs, yv, color(i));
    plot.markers(xs, yv, color(i));
    const fit = linearFit(xs, yv.map(Math.log));
    slopes[`eps=${eps}`] = { slope: fit.slope, stderr: fit.stderr };
    plot.annotation(`eps=${eps}: log-residual slope ${fit.slope.toFixed(6)} ± ${fit.stderr.toFixed(6)}`, i);
    legend.push({ label: `eps=${eps}`, stroke: color(i) });
  });
  plot.legend(legend);
  return { svg: plot.render(), slopes };
}

function balanceError(table: Table, spec: FigureSpec): RenderedFigure {
  const col = spec.column ?? 'combined';
  requireColumns(table, ['eps', 'n', 't', col]);
  const ts = numbers(table, 't');
  const ys = numbers(table, col).filter((v) => isFinite(v) && v > 0);
  const plot = new Plot(
    { label: 't', scale: spec.xscale ?? 'linear', ...bounds(ts, spec.xscale ?? 'linear') },
    { label: col, scale: spec.yscale ?? 'log', ...bounds(ys, spec.yscale ?? 'log') },
    spec.title ?? 'Balance error along the trajectory',
  );
  const legend: { label: string; stroke: string }[] = [];
  let i = 0;
  for (const eps of distinct(table, 'eps')) {
    for (const n of distinct(filterRows(table, (r) => r['eps'] === eps), 'n')) {
      const sub = filterRows(table, (r) => r['eps'] === eps && r['n'] === n);
      plot.polyline(numbers(sub, 't'), numbers(sub, col), color(i));
      legend.push({ label: `eps=${eps} n=${n}`, stroke: color(i) });
      i += 1;
    }
  }
  plot.legend(legend);
  return { svg: plot.render(), slopes: {} };
}

function slopeFit(table: Table, spec: FigureSpec): RenderedFigure {
  const col = spec.column ?? 'combined';
  requireColumns(table, ['eps', 'n', 't', col]);
  const slopes: RenderedFigure['slopes'] = {};
  const series: { label: string; xs: number[]; ys: number[] }[] = [];
  for (const n of distinct(table, 'n')) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (const eps of distinct(filterRows(table, (r) => r['n'] === n), 'eps')) {
      const sub = filterRows(table, (r) => r['eps'] === eps && r['n'] === n);
      const vals = numbers(sub, col).filter((v, j) => isFinite(v) && fnum(sub.rows[j], 't') > 0);
      if (vals.length === 0) continue;
      xs.push(Number.parseFloat(eps));
      ys.push(Math.max(...vals));
    }
    if (xs.length >= 2) {
      series.push({ label: `n=${n}`, xs, ys });
    }
  }
  if (series.length === 0) {
    throw new CsvError('slope-fit: no (eps, n) series with positive data');
  }
  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const plot = new Plot(
    { label: 'eps', scale: 'log', ...bounds(allX, 'log') },
    { label: `max_t ${col}`, scale: 'log', ...bounds(allY, 'log') },
    spec.title ?? 'Error scaling in eps',
  );
  const legend: { label: string; stroke: string }[] = [];
  series.forEach((s, i) => {
    plot.polyline(s.xs, s.ys, color(i));
    plot.markers(s.xs, s.ys, color(i));
    const fit = powerLawFit(s.xs, s.ys);
    slopes[s.label] = { slope: fit.slope, stderr: fit.stderr };
    plot.annotation(`${s.label}: slope ${fit.slope.toFixed(6)} ± ${fit.stderr.toFixed(6)}`, i);
    legend.push({ label: s.label, stroke: color(i) });
  });
  plot.legend(legend);
  return { svg: plot.render(), slopes };
}

function gevreySpectrum(table: Table, spec: FigureSpec): RenderedFigure {
  requireColumns(table, ['eps', 'sigma_fit']);
  const pairs = table.rows
    .map((r) => [fnum(r, 'eps'), fnum(r, 'sigma_fit')] as const)
    .filter(([e, s]) => isFinite(e) && isFinite(s));
  if (pairs.length === 0) {
    throw new CsvError('gevrey-spectrum: no finite sigma_fit entries');
  }
  const seen = new Map<number, number>();
  for (const [e, s] of pairs) if (!seen.has(e)) seen.set(e, s);
  const xs = [...seen.keys()];
  const ys = [...seen.values()];
  const plot = new Plot(
    { label: 'eps', scale: spec.xscale ?? 'log', ...bounds(xs, spec.xscale ?? 'log') },
    { label: 'fitted spectral decay rate', scale: spec.yscale ?? 'linear', ...bounds(ys, spec.yscale ?? 'linear') },
    spec.title ?? 'Spectral decay rate across the sweep',
  );
  plot.polyline(xs, ys, color(0));
  plot.markers(xs, ys, color(0));
  return { svg: plot.render(), slopes: {} };
}

export function renderToFile(spec: FigureSpec): RenderedFigure {
  const fig = renderFigure(spec);
  fs.writeFileSync(spec.output, fig.svg);
  return fig;
}
