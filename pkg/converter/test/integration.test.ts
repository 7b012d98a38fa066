/**
 * Acceptance: converted neutral files must pass the analysis pipeline's own
 * validation. The check goes through the pipeline's external CLI only
 * (export-graph loads, filters, epochs and builds the train-split graph).
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { convert, describeSource } from "../src/convert.js";
import { makeFixture, writeFixture } from "./fixtures.js";

function pipelineAvailable(): boolean {
  const probe = spawnSync("python3", ["-c", "import graphmi"], { encoding: "utf-8" });
  return probe.status === 0;
}

describe.skipIf(!pipelineAvailable())("neutral files feed the analysis pipeline", () => {
  it("export-graph accepts a converted subject", () => {
    const inDir = fs.mkdtempSync(path.join(os.tmpdir(), "integ-in-"));
    const outDir = fs.mkdtempSync(path.join(os.tmpdir(), "integ-out-"));
    try {
      // wider cue spacing so the default 0.5-2.5 s epochs do not overlap
      writeFixture(inDir, "aa", makeFixture("aa", { cueSpacing: 350 }), true);
      convert(describeSource(inDir, "aa"), outDir);
      const adjacency = path.join(outDir, "adjacency.csv");
      const run = spawnSync(
        "python3",
        [
          "-m",
          "graphmi.cli",
          "export-graph",
          "--data",
          outDir,
          "--subject",
          "aa",
          "--out",
          adjacency,
        ],
        { encoding: "utf-8" },
      );
      expect(run.stderr).toBe("");
      expect(run.status).toBe(0);
      const rows = fs.readFileSync(adjacency, "utf-8").trimEnd().split("\n");
      expect(rows.length).toBe(118);
      expect(rows[0]!.split(",").length).toBe(118);
    } finally {
      fs.rmSync(inDir, { recursive: true, force: true });
      fs.rmSync(outDir, { recursive: true, force: true });
    }
  }, 120_000);
});
