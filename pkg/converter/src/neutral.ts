/**
 * Writers for the neutral recording format consumed by the analysis
 * pipeline, byte-exact and deterministic:
 *
 *   <name>.meta         key=value lines: channels, sample_rate_hz, samples
 *   <name>.f32          little-endian float32, time-major
 *   <name>.markers.csv  header cue_sample,label,split
 *
 * plus manifest.txt listing sizes and sha256 digests of the written files.
 */

import * as crypto from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

export interface NeutralMarker {
  cueSample: number;
  label: 0 | 1 | 2;
  split: "train" | "test";
}

export interface NeutralRecording {
  channels: number;
  sampleRateHz: number;
  /** time-major: samples[t * channels + c], already float32-rounded values */
  samples: Float32Array;
  markers: NeutralMarker[];
}

export function metaText(rec: NeutralRecording): string {
  const nSamples = rec.samples.length / rec.channels;
  return (
    `channels=${rec.channels}\n` +
    `sample_rate_hz=${rec.sampleRateHz}\n` +
    `samples=${nSamples}\n`
  );
}

export function markersText(rec: NeutralRecording): string {
  const lines = ["cue_sample,label,split"];
  for (const m of rec.markers) {
    lines.push(`${m.cueSample},${m.label},${m.split}`);
  }
  return lines.join("\n") + "\n";
}

export function f32Bytes(rec: NeutralRecording): Buffer {
  const buf = Buffer.alloc(rec.samples.length * 4);
  for (let i = 0; i < rec.samples.length; i++) {
    buf.writeFloatLE(rec.samples[i]!, i * 4);
  }
  return buf;
}

export interface ManifestEntry {
  file: string;
  size: number;
  sha256: string;
}

export function writeNeutral(
  outDir: string,
  name: string,
  rec: NeutralRecording,
): ManifestEntry[] {
  if (rec.samples.length % rec.channels !== 0) {
    throw new Error(
      `sample count ${rec.samples.length} is not a multiple of ${rec.channels} channels`,
    );
  }
  fs.mkdirSync(outDir, { recursive: true });
  const payloads: Array<[string, Buffer]> = [
    [`${name}.meta`, Buffer.from(metaText(rec), "utf-8")],
    [`${name}.f32`, f32Bytes(rec)],
    [`${name}.markers.csv`, Buffer.from(markersText(rec), "utf-8")],
  ];
  const entries: ManifestEntry[] = [];
  for (const [file, payload] of payloads) {
    fs.writeFileSync(path.join(outDir, file), payload);
    entries.push({
      file,
      size: payload.byteLength,
      sha256: crypto.createHash("sha256").update(payload).digest("hex"),
    });
  }
  return entries;
}

export function manifestText(subject: string, entries: ManifestEntry[]): string {
  const lines = [`subject=${subject}`];
  for (const e of entries) {
    lines.push(`file=${e.file} size=${e.size} sha256=${e.sha256}`);
  }
  return lines.join("\n") + "\n";
}

export function writeManifest(
  outDir: string,
  subject: string,
  entries: ManifestEntry[],
): string {
  const text = manifestText(subject, entries);
  fs.writeFileSync(path.join(outDir, "manifest.txt"), Buffer.from(text, "utf-8"));
  return text;
}
