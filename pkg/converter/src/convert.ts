/**
 * Conversion from the public 100 Hz MATLAB distribution of the two-class
 * motor-imagery benchmark (continuous EEG `cnt`, marker struct `mrk`, info
 * struct `nfo`) to the neutral recording format.
 *
 * Declared expectations (118 channels, 100 Hz, 280 cues) are verified
 * against the file contents before anything is written. Train markers carry
 * the competition labels (1 = right hand, 2 = right foot); markers whose
 * label is NaN belong to the test split and receive the published true
 * label when a true-labels file sits next to the data file, otherwise 0.
 * The only lossy step is the cast to 32-bit floats (exact for the int16
 * source data); raw amplitudes are written unscaled.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { MatValue, NumericArray, StructArray, UnreadableSource, parseMat } from "./mat5.js";
import {
  ManifestEntry,
  NeutralMarker,
  NeutralRecording,
  writeManifest,
  writeNeutral,
} from "./neutral.js";

export class SchemaMismatch extends Error {}

export const SUBJECTS = ["aa", "al", "av", "aw", "ay"] as const;
export type Subject = (typeof SUBJECTS)[number];

export interface SourceDescriptor {
  subject: Subject;
  sourcePath: string;
  trueLabelsPath?: string;
  expectedChannels: number;
  expectedFs: number;
  expectedMarkers: number;
}

export interface ConversionManifest {
  subject: Subject;
  entries: ManifestEntry[];
  trainMarkers: number;
  testMarkers: number;
  labeledTestMarkers: number;
}

export function describeSource(
  inDir: string,
  subject: string,
  overrides: Partial<SourceDescriptor> = {},
): SourceDescriptor {
  if (!(SUBJECTS as readonly string[]).includes(subject)) {
    throw new SchemaMismatch(`unknown subject ${subject}; expected one of ${SUBJECTS.join(", ")}`);
  }
  let names: string[];
  try {
    names = fs.readdirSync(inDir);
  } catch (err) {
    throw new UnreadableSource(`cannot list ${inDir}: ${err}`);
  }
  const isSubjectMat = (n: string) =>
    n.toLowerCase().endsWith(".mat") && n.toLowerCase().includes(subject);
  const dataName = names.find((n) => isSubjectMat(n) && !n.toLowerCase().includes("true_labels"));
  if (!dataName) {
    throw new UnreadableSource(`no .mat data file for subject ${subject} in ${inDir}`);
  }
  const labelsName = names.find(
    (n) => isSubjectMat(n) && n.toLowerCase().includes("true_labels"),
  );
  return {
    subject: subject as Subject,
    sourcePath: path.join(inDir, dataName),
    trueLabelsPath: labelsName ? path.join(inDir, labelsName) : undefined,
    expectedChannels: 118,
    expectedFs: 100,
    expectedMarkers: 280,
    ...overrides,
  };
}

function loadMat(filePath: string): Map<string, MatValue> {
  let bytes: Buffer;
  try {
    bytes = fs.readFileSync(filePath);
  } catch (err) {
    throw new UnreadableSource(`cannot read ${filePath}: ${err}`);
  }
  return parseMat(new Uint8Array(bytes.buffer, bytes.byteOffset, bytes.byteLength));
}

function requireNumeric(value: MatValue | undefined, what: string): NumericArray {
  if (!value || value.kind !== "numeric") {
    throw new SchemaMismatch(`${what} is missing or not numeric`);
  }
  return value;
}

function requireStruct(value: MatValue | undefined, what: string): StructArray {
  if (!value || value.kind !== "struct") {
    throw new SchemaMismatch(`${what} is missing or not a struct`);
  }
  return value;
}

function structField(s: StructArray, field: string, what: string): MatValue {
  const values = s.fields.get(field);
  if (!values || values.length === 0) {
    throw new SchemaMismatch(`${what} lacks field ${field}`);
  }
  return values[0]!;
}

function scalarOf(value: MatValue, what: string): number {
  if (value.kind !== "numeric" || value.data.length !== 1) {
    throw new SchemaMismatch(`${what} is not a numeric scalar`);
  }
  return value.data[0]!;
}

interface Oriented {
  nSamples: number;
  nChannels: number;
  /** value at (sample t, channel c) of the column-major source array */
  at(t: number, c: number): number;
}

function orientContinuous(cnt: NumericArray, expectedChannels: number): Oriented {
  if (cnt.dims.length !== 2) {
    throw new SchemaMismatch(`continuous signal must be 2-D, got dims [${cnt.dims}]`);
  }
  const [d0, d1] = cnt.dims as [number, number];
  const data = cnt.data;
  // the official layout is time x channels, but accept the transpose; the
  // channel axis is identified by the declared electrode count
  if (d1 === expectedChannels && d0 !== expectedChannels) {
    return { nSamples: d0, nChannels: d1, at: (t, c) => data[c * d0 + t]! };
  }
  if (d0 === expectedChannels && d1 !== expectedChannels) {
    return { nSamples: d1, nChannels: d0, at: (t, c) => data[t * d0 + c]! };
  }
  if (d0 === expectedChannels && d1 === expectedChannels) {
    throw new SchemaMismatch("square continuous array: channel axis is ambiguous");
  }
  throw new SchemaMismatch(
    `neither dimension of [${cnt.dims}] matches the ${expectedChannels} expected channels`,
  );
}

function readTrueLabels(filePath: string, expectedMarkers: number): Float64Array {
  const variables = loadMat(filePath);
  const trueY =
    variables.get("true_y") ??
    variables.get("truey") ??
    variables.get("y") ??
    undefined;
  const arr = requireNumeric(trueY, `true labels in ${path.basename(filePath)}`);
  if (arr.data.length !== expectedMarkers) {
    throw new SchemaMismatch(
      `true labels: ${arr.data.length} entries, expected ${expectedMarkers}`,
    );
  }
  return arr.data;
}

export function convert(src: SourceDescriptor, outDir: string): ConversionManifest {
  const variables = loadMat(src.sourcePath);
  const cnt = requireNumeric(variables.get("cnt"), "cnt");
  const mrk = requireStruct(variables.get("mrk"), "mrk");
  const nfo = requireStruct(variables.get("nfo"), "nfo");

  const fs_ = scalarOf(structField(nfo, "fs", "nfo"), "nfo.fs");
  if (fs_ !== src.expectedFs) {
    throw new SchemaMismatch(`sampling rate ${fs_} Hz, expected ${src.expectedFs} Hz`);
  }
  const oriented = orientContinuous(cnt, src.expectedChannels);

  const pos = requireNumeric(structField(mrk, "pos", "mrk"), "mrk.pos").data;
  const labels = requireNumeric(structField(mrk, "y", "mrk"), "mrk.y").data;
  if (pos.length !== src.expectedMarkers || labels.length !== src.expectedMarkers) {
    throw new SchemaMismatch(
      `marker counts pos=${pos.length} y=${labels.length}, expected ${src.expectedMarkers}`,
    );
  }

  let trueLabels: Float64Array | undefined;
  if (src.trueLabelsPath) {
    trueLabels = readTrueLabels(src.trueLabelsPath, src.expectedMarkers);
  }

  const markers: NeutralMarker[] = [];
  let trainMarkers = 0;
  let labeledTestMarkers = 0;
  for (let k = 0; k < pos.length; k++) {
    const onePos = pos[k]!;
    if (!Number.isFinite(onePos) || onePos < 1 || onePos > oriented.nSamples) {
      throw new SchemaMismatch(`marker ${k}: position ${onePos} outside 1..${oriented.nSamples}`);
    }
    const cueSample = onePos - 1; // MATLAB indices are 1-based
    const y = labels[k]!;
    if (Number.isNaN(y)) {
      let label: 0 | 1 | 2 = 0;
      if (trueLabels) {
        const t = trueLabels[k]!;
        if (t !== 1 && t !== 2) {
          throw new SchemaMismatch(`true label for marker ${k} is ${t}, expected 1 or 2`);
        }
        label = t as 1 | 2;
        labeledTestMarkers++;
      }
      markers.push({ cueSample, label, split: "test" });
    } else if (y === 1 || y === 2) {
      if (trueLabels && trueLabels[k] !== y) {
        throw new SchemaMismatch(
          `marker ${k}: training label ${y} disagrees with true label ${trueLabels[k]}`,
        );
      }
      markers.push({ cueSample, label: y as 1 | 2, split: "train" });
      trainMarkers++;
    } else {
      throw new SchemaMismatch(`marker ${k}: label ${y} is neither 1, 2 nor NaN`);
    }
  }

  // time-major float32 with round-to-nearest-even (the Float32Array cast)
  const samples = new Float32Array(oriented.nSamples * oriented.nChannels);
  for (let t = 0; t < oriented.nSamples; t++) {
    const base = t * oriented.nChannels;
    for (let c = 0; c < oriented.nChannels; c++) {
      samples[base + c] = oriented.at(t, c);
    }
  }

  const rec: NeutralRecording = {
    channels: oriented.nChannels,
    sampleRateHz: src.expectedFs,
    samples,
    markers,
  };
  const entries = writeNeutral(outDir, src.subject, rec);
  writeManifest(outDir, src.subject, entries);
  return {
    subject: src.subject,
    entries,
    trainMarkers,
    testMarkers: markers.length - trainMarkers,
    labeledTestMarkers,
  };
}
