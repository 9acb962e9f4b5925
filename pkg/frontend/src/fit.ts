/** Least-squares line fit with the standard error of the slope. */

export interface LineFit {
  slope: number;
  intercept: number;
  stderr: number;
  n: number;
}

export function linearFit(x: number[], y: number[]): LineFit {
  if (x.length !== y.length) {
    throw new Error(`length mismatch: ${x.length} vs ${y.length}`);
  }
  const pairs = x.map((xi, i) => [xi, y[i]] as const).filter(([a, b]) => isFinite(a) && isFinite(b));
  const n = pairs.length;
  if (n < 2) {
    throw new Error(`need at least 2 finite points, got ${n}`);
  }
  const mx = pairs.reduce((s, [a]) => s + a, 0) / n;
  const my = pairs.reduce((s, [, b]) => s + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (const [a, b] of pairs) {
    sxx += (a - mx) * (a - mx);
    sxy += (a - mx) * (b - my);
  }
  if (sxx === 0) {
    throw new Error('degenerate fit: all x equal');
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssr = 0;
  for (const [a, b] of pairs) {
    const r = b - (intercept + slope * a);
    ssr += r * r;
  }
  const stderr = n > 2 ? Math.sqrt(ssr / (n - 2) / sxx) : 0;
  return { slope, intercept, stderr, n };
}

/** Fit y = C * x^p through log-log least squares. */
export function powerLawFit(x: number[], y: number[]): LineFit {
  const lx = x.map(Math.log);
  const ly = y.map(Math.log);
  return linearFit(lx, ly);
}
