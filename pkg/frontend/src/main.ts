#!/usr/bin/env node
// CLI: render <trajectory.csv> <out.svg>
//
// Exit 0 on success (an empty-but-valid CSV yields empty axes), exit 1 with
// a message on a schema mismatch or I/O failure.

import {readLog, SchemaError} from './csv';
import {buildFigure} from './figure';
import {writeFigure} from './render';

export function main(argv: string[]): number {
  const args = argv.filter((a) => a !== 'render');
  if (args.length !== 2) {
    process.stderr.write('usage: render <trajectory.csv> <out.svg>\n');
    return 1;
  }
  const [csvPath, outPath] = args;
  try {
    const log = readLog(csvPath);
    writeFigure(buildFigure(log), outPath);
  } catch (err) {
    const kind = err instanceof SchemaError ? 'schema mismatch' : 'render failure';
    process.stderr.write(`${kind}: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
