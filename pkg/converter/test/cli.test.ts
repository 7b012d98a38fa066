import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { makeFixture, writeFixture } from "./fixtures.js";

const tmpRoots: string[] = [];

function tmpDir(prefix: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), prefix));
  tmpRoots.push(dir);
  return dir;
}

afterAll(() => {
  for (const dir of tmpRoots) {
    fs.rmSync(dir, { recursive: true, force: true });
  }
});

describe("cli", () => {
  it("converts a bundle and exits 0", () => {
    const inDir = tmpDir("cli-in-");
    const outDir = tmpDir("cli-out-");
    writeFixture(inDir, "aa", makeFixture("aa"), true);
    const code = main(["convert", "--in", inDir, "--out", outDir, "--subject", "aa"]);
    expect(code).toBe(0);
    for (const file of ["aa.meta", "aa.f32", "aa.markers.csv", "manifest.txt"]) {
      expect(fs.existsSync(path.join(outDir, file))).toBe(true);
    }
  });

  it("exits 1 on bad usage and schema mismatches", () => {
    expect(main(["convert", "--in"])).toBe(1);
    expect(main(["frobnicate"])).toBe(1);
    const inDir = tmpDir("cli-in-");
    const outDir = tmpDir("cli-out-");
    writeFixture(inDir, "aa", makeFixture("aa", { channels: 12 }), false);
    expect(main(["convert", "--in", inDir, "--out", outDir, "--subject", "aa"])).toBe(1);
  });

  it("exits 3 when the source is unreadable", () => {
    const outDir = tmpDir("cli-out-");
    expect(
      main(["convert", "--in", path.join(outDir, "missing"), "--out", outDir, "--subject", "aa"]),
    ).toBe(3);
  });
});
