/**
 * Fabricated source bundles shaped like the public 100 Hz distribution:
 * continuous int16 EEG `cnt` (time x channels), marker struct `mrk` with
 * 1-based cue positions and NaN labels on the unlabeled (test) trials, and
 * an info struct `nfo` carrying the sampling rate.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { MatWriter, MX_INT16 } from "./matwrite.js";

const MI_INT16 = 3;

export const TRAIN_FRACTIONS: Record<string, number> = {
  aa: 0.6,
  al: 0.8,
  av: 0.3,
  aw: 0.2,
  ay: 0.1,
};

export interface FixtureOptions {
  channels?: number;
  markers?: number;
  fs?: number;
  cueSpacing?: number;
  firstCue?: number; // 1-based
  transposed?: boolean; // store cnt as channels x time
  compressed?: boolean;
  badLabelAt?: number; // inject an invalid label value at this marker
}

export interface Fixture {
  dataBytes: Buffer;
  trueLabelBytes: Buffer;
  nSamples: number;
  channels: number;
  trainCount: number;
  labels: number[]; // full true labels, 1/2
  positions: number[]; // 1-based cue positions
  /** deterministic source value at (sample t, channel c), int16 range */
  valueAt(t: number, c: number): number;
}

export function makeFixture(subject: string, options: FixtureOptions = {}): Fixture {
  const channels = options.channels ?? 118;
  const markers = options.markers ?? 280;
  const rate = options.fs ?? 100;
  const spacing = options.cueSpacing ?? 10;
  const firstCue = options.firstCue ?? 401;
  const nSamples = firstCue + spacing * (markers - 1) + 400;
  const trainCount = Math.round((TRAIN_FRACTIONS[subject] ?? 0.5) * markers);

  const valueAt = (t: number, c: number) => ((t * 31 + c * 17) % 2001) - 1000;

  const labels: number[] = [];
  const positions: number[] = [];
  const observed: number[] = [];
  for (let k = 0; k < markers; k++) {
    positions.push(firstCue + k * spacing);
    const label = (k % 2) + 1;
    labels.push(label);
    if (options.badLabelAt === k) {
      observed.push(7);
    } else {
      observed.push(k < trainCount ? label : NaN);
    }
  }

  const w = new MatWriter();
  const cntValues: number[] = new Array(nSamples * channels);
  if (options.transposed) {
    // channels x time, column-major: time runs within each column
    for (let t = 0; t < nSamples; t++) {
      for (let c = 0; c < channels; c++) {
        cntValues[t * channels + c] = valueAt(t, c);
      }
    }
  } else {
    // time x channels, column-major: each channel is contiguous
    for (let c = 0; c < channels; c++) {
      for (let t = 0; t < nSamples; t++) {
        cntValues[c * nSamples + t] = valueAt(t, c);
      }
    }
  }
  const cntDims = options.transposed ? [channels, nSamples] : [nSamples, channels];
  const cnt = w.numericMatrix("cnt", cntDims, cntValues, MX_INT16, MI_INT16);
  const mrk = w.struct("mrk", [
    ["pos", w.numericMatrix("", [1, markers], positions)],
    ["y", w.numericMatrix("", [1, markers], observed)],
    ["className", w.cellOfStrings("", ["right", "foot"])],
  ]);
  const nfo = w.struct("nfo", [
    ["fs", w.numericMatrix("", [1, 1], [rate])],
    ["name", w.charMatrix("", `data_set_IVa_${subject}`)],
  ]);
  const elements = options.compressed
    ? [w.compressed(cnt), w.compressed(mrk), w.compressed(nfo)]
    : [cnt, mrk, nfo];
  const dataBytes = w.file(elements);

  const trueLabelBytes = w.file([w.numericMatrix("true_y", [1, markers], labels)]);

  return {
    dataBytes,
    trueLabelBytes,
    nSamples,
    channels,
    trainCount,
    labels,
    positions,
    valueAt,
  };
}

export function writeFixture(
  dir: string,
  subject: string,
  fixture: Fixture,
  withTrueLabels: boolean,
): void {
  fs.mkdirSync(dir, { recursive: true });
  fs.writeFileSync(path.join(dir, `data_set_IVa_${subject}.mat`), fixture.dataBytes);
  if (withTrueLabels) {
    fs.writeFileSync(path.join(dir, `true_labels_${subject}.mat`), fixture.trueLabelBytes);
  }
}
