import { describe, expect, it } from 'vitest';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { CsvError, SCHEMA_COLUMNS, parseCsv } from '../src/csv.js';
import { linearFit, powerLawFit } from '../src/fit.js';
import { parseSpec, SpecError } from '../src/spec.js';
import { renderFigure, renderToFile } from '../src/figures.js';

function tmpFile(name: string, content: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'qgbal-plots-'));
  const p = path.join(dir, name);
  fs.writeFileSync(p, content);
  return p;
}

function schemaCsv(rows: Partial<Record<(typeof SCHEMA_COLUMNS)[number], string>>[]): string {
  const header = SCHEMA_COLUMNS.join(',');
  const body = rows.map((r) => SCHEMA_COLUMNS.map((c) => r[c] ?? 'nan').join(','));
  return [header, ...body].join('\n') + '\n';
}

/** independent least-squares recomputation for cross-checking annotations */
function referenceSlope(x: number[], y: number[]): number {
  const n = x.length;
  const sx = x.reduce((a, b) => a + b, 0);
  const sy = y.reduce((a, b) => a + b, 0);
  const sxx = x.reduce((a, b) => a + b * b, 0);
  const sxy = x.reduce((a, b, i) => a + b * y[i], 0);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

describe('fit', () => {
  it('recovers an exact power law with slope 2.00 +/- 0.01', () => {
    const xs = [0.1, 0.05, 0.025, 0.0125];
    const ys = xs.map((x) => 3.7 * x * x);
    const fit = powerLawFit(xs, ys);
    expect(Math.abs(fit.slope - 2.0)).toBeLessThanOrEqual(0.01);
    expect(fit.stderr).toBeLessThanOrEqual(0.01);
  });

  it('reports a standard error for noisy data', () => {
    const xs = [1, 2, 3, 4, 5];
    const ys = [1.1, 1.9, 3.2, 3.8, 5.1];
    const fit = linearFit(xs, ys);
    expect(fit.slope).toBeCloseTo(referenceSlope(xs, ys), 12);
    expect(fit.stderr).toBeGreaterThan(0);
  });

  it('rejects degenerate input', () => {
    expect(() => linearFit([1, 1], [2, 3])).toThrow(/degenerate/);
  });
});

describe('csv', () => {
  it('rejects an empty file', () => {
    expect(() => parseCsv('')).toThrow(CsvError);
    expect(() => parseCsv('a,b\n')).toThrow(/no data rows/);
  });

  it('rejects ragged rows', () => {
    expect(() => parseCsv('a,b\n1,2,3\n')).toThrow(/expected 2 fields/);
  });
});

describe('spec', () => {
  it('parses a full spec', () => {
    const spec = parseSpec(
      'kind = "slope-fit"\ninput = ["x.csv", "y.csv"]\noutput = "o.svg"\nyscale = "log"\n',
    );
    expect(spec.kind).toBe('slope-fit');
    expect(spec.input).toEqual(['x.csv', 'y.csv']);
  });

  it('rejects unknown keys and bad kinds', () => {
    expect(() => parseSpec('mode = "x"\n')).toThrow(SpecError);
    expect(() => parseSpec('kind = "pie"\ninput = "a"\noutput = "b"\n')).toThrow(/kind/);
  });
});

describe('figures', () => {
  const errorRows = (() => {
    const rows: Partial<Record<(typeof SCHEMA_COLUMNS)[number], string>>[] = [];
    for (const eps of [0.1, 0.05, 0.025]) {
      for (const n of [0, 1]) {
        for (const t of [0, 0.5, 1.0]) {
          // max-over-time error exactly C * eps^(n+1), constant in t > 0
          const err = t === 0 ? 0 : 2.5 * Math.pow(eps, n + 1);
          rows.push({
            run_id: 'fix',
            eps: String(eps),
            n: String(n),
            t: String(t),
            combined: String(err * err),
            err_v: String(err),
            err_rho: '0',
          });
        }
      }
    }
    return rows;
  })();

  it('slope-fit annotation matches an independent recomputation to 1e-6', () => {
    const csv = tmpFile('err.csv', schemaCsv(errorRows));
    const fig = renderFigure({
      kind: 'slope-fit',
      input: [csv],
      output: 'unused.svg',
      column: 'err_v',
    });
    for (const [label, fit] of Object.entries(fig.slopes)) {
      const n = Number(label.split('=')[1]);
      const eps = [0.1, 0.05, 0.025];
      const ys = eps.map((e) => Math.log(2.5 * Math.pow(e, n + 1)));
      const xs = eps.map(Math.log);
      const ref = referenceSlope(xs, ys);
      expect(Math.abs(fit.slope - ref)).toBeLessThanOrEqual(1e-6);
      // the rendered annotation string carries the same number
      const match = fig.svg.match(new RegExp(`n=${n}: slope ([-0-9.]+)`));
      expect(match).not.toBeNull();
      expect(Math.abs(Number(match![1]) - ref)).toBeLessThanOrEqual(1e-6 + 5e-7);
    }
  });

  it('synthetic quadratic fixture yields slope 2.00 +/- 0.01', () => {
    const csv = tmpFile('err2.csv', schemaCsv(errorRows));
    const fig = renderFigure({
      kind: 'slope-fit',
      input: [csv],
      output: 'unused.svg',
      column: 'err_v',
    });
    expect(Math.abs(fig.slopes['n=1'].slope - 2.0)).toBeLessThanOrEqual(0.01);
  });

  it('residual-decay renders a descending log plot', () => {
    const rows = [0, 1, 2, 3].map((n) => ({
      run_id: 'fix',
      eps: '0.0001',
      n: String(n),
      t: '0',
      res_aggregate_s: String(0.3 * Math.pow(1e-3, n)),
    }));
    const csv = tmpFile('resid.csv', schemaCsv(rows));
    const fig = renderFigure({ kind: 'residual-decay', input: [csv], output: 'u.svg' });
    const poly = fig.svg.match(/points="([^"]+)"/);
    expect(poly).not.toBeNull();
    const ys = poly![1].split(' ').map((p) => Number(p.split(',')[1]));
    for (let i = 1; i < ys.length; i++) {
      expect(ys[i]).toBeGreaterThan(ys[i - 1]); // svg y grows downward
    }
    expect(fig.slopes['eps=0.0001'].slope).toBeCloseTo(Math.log(1e-3), 6);
  });

  it('residual-decay annotation matches an independent recomputation to 1e-6', () => {
    const amps = [0.31, 2.1e-5, 8.7e-10, 3.3e-13];
    const rows = amps.map((a, n) => ({
      run_id: 'fix',
      eps: '0.0001',
      n: String(n),
      t: '0',
      res_aggregate_s: String(a),
    }));
    const csv = tmpFile('resid2.csv', schemaCsv(rows));
    const fig = renderFigure({ kind: 'residual-decay', input: [csv], output: 'u.svg' });
    const ref = referenceSlope([0, 1, 2, 3], amps.map(Math.log));
    expect(Math.abs(fig.slopes['eps=0.0001'].slope - ref)).toBeLessThanOrEqual(1e-6);
    const match = fig.svg.match(/eps=0.0001: log-residual slope ([-0-9.]+)/);
    expect(match).not.toBeNull();
    expect(Math.abs(Number(match![1]) - ref)).toBeLessThanOrEqual(1e-6 + 5e-7);
  });

  it('balance-error consumes the schema and draws one curve per (eps, n)', () => {
    const csv = tmpFile('be.csv', schemaCsv(errorRows));
    const fig = renderFigure({ kind: 'balance-error', input: [csv], output: 'u.svg' });
    const curves = fig.svg.match(/<polyline/g) ?? [];
    expect(curves.length).toBe(6);
  });

  it('gevrey-spectrum summarizes sigma_fit across the sweep', () => {
    const rows = [0.1, 0.01, 0.001].map((eps) => ({
      run_id: 'fix',
      eps: String(eps),
      n: '0',
      t: '0',
      sigma_fit: String(0.8),
    }));
    const csv = tmpFile('gev.csv', schemaCsv(rows));
    const fig = renderFigure({ kind: 'gevrey-spectrum', input: [csv], output: 'u.svg' });
    expect(fig.svg).toContain('decay rate');
  });

  it('missing columns produce a descriptive failure', () => {
    const csv = tmpFile('short.csv', 'run_id,eps\nx,0.1\n');
    expect(() =>
      renderFigure({ kind: 'residual-decay', input: [csv], output: 'u.svg' }),
    ).toThrow(/missing columns: n, res_aggregate_s/);
  });

  it('empty CSV produces a descriptive failure', () => {
    const csv = tmpFile('empty.csv', '');
    expect(() => renderFigure({ kind: 'balance-error', input: [csv], output: 'u.svg' })).toThrow(
      /empty CSV/,
    );
  });

  it('same CSV in, byte-identical figure out', () => {
    const csv = tmpFile('det.csv', schemaCsv(errorRows));
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'qgbal-out-'));
    const out1 = path.join(dir, 'a.svg');
    const out2 = path.join(dir, 'b.svg');
    renderToFile({ kind: 'balance-error', input: [csv], output: out1 });
    renderToFile({ kind: 'balance-error', input: [csv], output: out2 });
    expect(fs.readFileSync(out1)).toEqual(fs.readFileSync(out2));
  });
});
