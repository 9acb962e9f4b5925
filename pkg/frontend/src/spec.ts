/**
 * Figure-spec files: a small TOML-like format of `key = value` lines.
 *
 * Values: quoted strings, numbers, or arrays of quoted strings.  Comments
 * start with '#'.  Example:
 *
 *   kind = "slope-fit"
 *   input = ["runs/a/results.csv"]
 *   output = "error-vs-eps.svg"
 *   yscale = "log"
 */

export interface FigureSpec {
  kind: 'residual-decay' | 'balance-error' | 'slope-fit' | 'gevrey-spectrum';
  input: string[];
  output: string;
  xscale?: 'linear' | 'log';
  yscale?: 'linear' | 'log';
  title?: string;
  /** balance-error / slope-fit: which error column to plot (default combined). */
  column?: string;
}

export class SpecError extends Error {}

const KINDS = ['residual-decay', 'balance-error', 'slope-fit', 'gevrey-spectrum'];
const KEYS = ['kind', 'input', 'output', 'xscale', 'yscale', 'title', 'column'];

function parseValue(raw: string, line: number): string | number | string[] {
  const t = raw.trim();
  if (t.startsWith('[')) {
    if (!t.endsWith(']')) throw new SpecError(`line ${line}: unterminated array`);
    const inner = t.slice(1, -1).trim();
    if (inner === '') return [];
    return inner.split(',').map((item) => {
      const s = item.trim();
      if (!s.startsWith('"') || !s.endsWith('"')) {
        throw new SpecError(`line ${line}: array items must be quoted strings`);
      }
      return s.slice(1, -1);
    });
  }
  if (t.startsWith('"')) {
    if (!t.endsWith('"') || t.length < 2) throw new SpecError(`line ${line}: unterminated string`);
    return t.slice(1, -1);
  }
  const num = Number(t);
  if (Number.isNaN(num)) throw new SpecError(`line ${line}: cannot parse value ${t}`);
  return num;
}

export function parseSpec(text: string): FigureSpec {
  const values: Record<string, string | number | string[]> = {};
  text.split(/\r?\n/).forEach((rawLine, i) => {
    const line = rawLine.replace(/#.*$/, '').trim();
    if (line === '') return;
    const eq = line.indexOf('=');
    if (eq < 0) throw new SpecError(`line ${i + 1}: expected key = value`);
    const key = line.slice(0, eq).trim();
    if (!KEYS.includes(key)) throw new SpecError(`line ${i + 1}: unknown key ${key}`);
    if (key in values) throw new SpecError(`line ${i + 1}: duplicate key ${key}`);
    values[key] = parseValue(line.slice(eq + 1), i + 1);
  });

  const kind = values['kind'];
  if (typeof kind !== 'string' || !KINDS.includes(kind)) {
    throw new SpecError(`kind must be one of ${KINDS.join(', ')}`);
  }
  let input = values['input'];
  if (typeof input === 'string') input = [input];
  if (!Array.isArray(input) || input.length === 0) {
    throw new SpecError('input must name at least one CSV file');
  }
  const output = values['output'];
  if (typeof output !== 'string' || output === '') {
    throw new SpecError('output must be a file path');
  }
  const spec: FigureSpec = {
    kind: kind as FigureSpec['kind'],
    input: input as string[],
    output,
  };
  for (const scaleKey of ['xscale', 'yscale'] as const) {
    const v = values[scaleKey];
    if (v !== undefined) {
      if (v !== 'linear' && v !== 'log') throw new SpecError(`${scaleKey} must be linear or log`);
      spec[scaleKey] = v;
    }
  }
  if (typeof values['title'] === 'string') spec.title = values['title'] as string;
  if (typeof values['column'] === 'string') spec.column = values['column'] as string;
  return spec;
}
