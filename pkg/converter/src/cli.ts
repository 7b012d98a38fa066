#!/usr/bin/env node
/**
 * convert --in <dir> --out <dir> --subject <name>
 *
 * Exit codes: 0 success, 1 validation/schema error, 3 unreadable source.
 */

import { pathToFileURL } from "node:url";

import { SchemaMismatch, convert, describeSource } from "./convert.js";
import { UnreadableSource } from "./mat5.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag || !flag.startsWith("--") || value === undefined) {
      throw new SchemaMismatch(`malformed arguments near ${flag ?? "<end>"}`);
    }
    out.set(flag.slice(2), value);
  }
  return out;
}

export function main(argv: string[]): number {
  try {
    if (argv[0] !== "convert") {
      throw new SchemaMismatch("usage: convert --in <dir> --out <dir> --subject <name>");
    }
    const args = parseArgs(argv.slice(1));
    const inDir = args.get("in");
    const outDir = args.get("out");
    const subject = args.get("subject");
    if (!inDir || !outDir || !subject) {
      throw new SchemaMismatch("usage: convert --in <dir> --out <dir> --subject <name>");
    }
    const src = describeSource(inDir, subject);
    const manifest = convert(src, outDir);
    console.log(
      `${manifest.subject}: ${manifest.trainMarkers} train + ${manifest.testMarkers} test markers ` +
        `(${manifest.labeledTestMarkers} test labels known) -> ${outDir}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof UnreadableSource) {
      console.error(`error: ${err.message}`);
      return 3;
    }
    if (err instanceof SchemaMismatch) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${err}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
