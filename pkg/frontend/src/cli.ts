#!/usr/bin/env node
/** `plot <spec-file>`: render one figure from a harness CSV. */

import * as fs from 'node:fs';
import { SpecError, parseSpec } from './spec.js';
import { renderToFile } from './figures.js';
import { CsvError } from './csv.js';

export function main(argv: string[]): number {
  if (argv.length !== 1 || argv[0] === '--help' || argv[0] === '-h') {
    process.stderr.write('usage: plot <spec-file>\n');
    return argv.length === 1 ? 0 : 2;
  }
  let specText: string;
  try {
    specText = fs.readFileSync(argv[0], 'utf8');
  } catch (err) {
    process.stderr.write(`cannot read spec: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const spec = parseSpec(specText);
    const fig = renderToFile(spec);
    process.stdout.write(`wrote ${spec.output}\n`);
    for (const [label, fit] of Object.entries(fig.slopes)) {
      process.stdout.write(`${label}: slope ${fit.slope.toFixed(6)} +/- ${fit.stderr.toFixed(6)}\n`);
    }
    return 0;
  } catch (err) {
    if (err instanceof SpecError || err instanceof CsvError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('cli.js') || entry.endsWith('cli.ts')) {
  process.exit(main(process.argv.slice(2)));
}
