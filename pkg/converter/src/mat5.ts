/**
 * Reader for the MATLAB Level 5 MAT-file binary format, covering what the
 * BCI Competition III Dataset IVa bundles contain: numeric arrays (with
 * narrow storage types), structs, cells, char arrays, and zlib-compressed
 * elements. Both byte orders are handled; v7.3 (HDF5) files are rejected.
 */

import * as zlib from "node:zlib";

export class UnreadableSource extends Error {}

// MAT data types
const MI_INT8 = 1;
const MI_UINT8 = 2;
const MI_INT16 = 3;
const MI_UINT16 = 4;
const MI_INT32 = 5;
const MI_UINT32 = 6;
const MI_SINGLE = 7;
const MI_DOUBLE = 9;
const MI_INT64 = 12;
const MI_UINT64 = 13;
const MI_MATRIX = 14;
const MI_COMPRESSED = 15;
const MI_UTF8 = 16;
const MI_UTF16 = 17;

// array classes
const MX_CELL = 1;
const MX_STRUCT = 2;
const MX_CHAR = 4;
const MX_DOUBLE = 6;
const MX_SINGLE = 7;
const MX_INT8 = 8;
const MX_UINT8 = 9;
const MX_INT16 = 10;
const MX_UINT16 = 11;
const MX_INT32 = 12;
const MX_UINT32 = 13;

const NUMERIC_CLASSES = new Set([
  MX_DOUBLE,
  MX_SINGLE,
  MX_INT8,
  MX_UINT8,
  MX_INT16,
  MX_UINT16,
  MX_INT32,
  MX_UINT32,
]);

export type MatValue =
  | NumericArray
  | CharArray
  | CellArray
  | StructArray
  | OpaqueArray;

export interface NumericArray {
  kind: "numeric";
  dims: number[];
  /** column-major values promoted to float64 */
  data: Float64Array;
}

export interface CharArray {
  kind: "char";
  dims: number[];
  text: string;
}

export interface CellArray {
  kind: "cell";
  dims: number[];
  items: MatValue[];
}

export interface StructArray {
  kind: "struct";
  dims: number[];
  /** field name -> one value per struct-array element */
  fields: Map<string, MatValue[]>;
}

export interface OpaqueArray {
  kind: "opaque";
  dims: number[];
  classId: number;
}

interface Cursor {
  view: DataView;
  bytes: Uint8Array;
  offset: number;
  le: boolean;
}

function remaining(c: Cursor): number {
  return c.view.byteLength - c.offset;
}

interface Tag {
  type: number;
  byteLength: number;
  dataOffset: number;
  nextOffset: number;
}

function readTag(c: Cursor): Tag {
  if (remaining(c) < 8) {
    throw new UnreadableSource("truncated element tag");
  }
  const word0 = c.view.getUint32(c.offset, c.le);
  const small = word0 >>> 16;
  if (small !== 0) {
    // small data element: length in the upper half word, payload in 4 bytes
    return {
      type: word0 & 0xffff,
      byteLength: small,
      dataOffset: c.offset + 4,
      nextOffset: c.offset + 8,
    };
  }
  const byteLength = c.view.getUint32(c.offset + 4, c.le);
  const dataOffset = c.offset + 8;
  const padded = byteLength + ((8 - (byteLength % 8)) % 8);
  return { type: word0, byteLength, dataOffset, nextOffset: dataOffset + padded };
}

function elementSizeOf(type: number): number {
  switch (type) {
    case MI_INT8:
    case MI_UINT8:
    case MI_UTF8:
      return 1;
    case MI_INT16:
    case MI_UINT16:
    case MI_UTF16:
      return 2;
    case MI_INT32:
    case MI_UINT32:
    case MI_SINGLE:
      return 4;
    case MI_DOUBLE:
    case MI_INT64:
    case MI_UINT64:
      return 8;
    default:
      throw new UnreadableSource(`unsupported numeric storage type ${type}`);
  }
}

function readNumericPayload(c: Cursor, tag: Tag): Float64Array {
  const size = elementSizeOf(tag.type);
  const count = tag.byteLength / size;
  if (!Number.isInteger(count)) {
    throw new UnreadableSource("numeric payload length not a multiple of the element size");
  }
  const out = new Float64Array(count);
  const { view, le } = c;
  let at = tag.dataOffset;
  for (let i = 0; i < count; i++, at += size) {
    switch (tag.type) {
      case MI_INT8:
        out[i] = view.getInt8(at);
        break;
      case MI_UINT8:
      case MI_UTF8:
        out[i] = view.getUint8(at);
        break;
      case MI_INT16:
        out[i] = view.getInt16(at, le);
        break;
      case MI_UINT16:
      case MI_UTF16:
        out[i] = view.getUint16(at, le);
        break;
      case MI_INT32:
        out[i] = view.getInt32(at, le);
        break;
      case MI_UINT32:
        out[i] = view.getUint32(at, le);
        break;
      case MI_SINGLE:
        out[i] = view.getFloat32(at, le);
        break;
      case MI_DOUBLE:
        out[i] = view.getFloat64(at, le);
        break;
      case MI_INT64:
        out[i] = Number(view.getBigInt64(at, le));
        break;
      case MI_UINT64:
        out[i] = Number(view.getBigUint64(at, le));
        break;
    }
  }
  return out;
}

function countElements(dims: number[]): number {
  return dims.reduce((a, b) => a * b, 1);
}

function parseMatrix(c: Cursor, tag: Tag): { name: string; value: MatValue } {
  const end = tag.dataOffset + tag.byteLength;
  const sub: Cursor = { ...c, offset: tag.dataOffset };

  const flagsTag = readTag(sub);
  if (flagsTag.type !== MI_UINT32 || flagsTag.byteLength !== 8) {
    throw new UnreadableSource("malformed array flags subelement");
  }
  const flagsWord = sub.view.getUint32(flagsTag.dataOffset, sub.le);
  const classId = flagsWord & 0xff;
  const complex = (flagsWord & 0x0800) !== 0;
  sub.offset = flagsTag.nextOffset;

  const dimsTag = readTag(sub);
  if (dimsTag.type !== MI_INT32) {
    throw new UnreadableSource("malformed dimensions subelement");
  }
  const dims = Array.from(readNumericPayload(sub, dimsTag), (v) => v | 0);
  sub.offset = dimsTag.nextOffset;

  const nameTag = readTag(sub);
  if (nameTag.type !== MI_INT8) {
    throw new UnreadableSource("malformed array name subelement");
  }
  const name = new TextDecoder("utf-8").decode(
    c.bytes.subarray(nameTag.dataOffset, nameTag.dataOffset + nameTag.byteLength),
  );
  sub.offset = nameTag.nextOffset;

  if (NUMERIC_CLASSES.has(classId)) {
    const realTag = readTag(sub);
    const data = readNumericPayload(sub, realTag);
    if (data.length !== countElements(dims)) {
      throw new UnreadableSource(
        `numeric array ${name || "?"}: ${data.length} values for dims [${dims}]`,
      );
    }
    if (complex) {
      // imaginary part is present but never used by this converter
      sub.offset = realTag.nextOffset;
      readTag(sub);
    }
    return { name, value: { kind: "numeric", dims, data } };
  }

  if (classId === MX_CHAR) {
    const dataTag = readTag(sub);
    const codes = readNumericPayload(sub, dataTag);
    const text = String.fromCharCode(...Array.from(codes, (v) => v | 0));
    return { name, value: { kind: "char", dims, text } };
  }

  if (classId === MX_CELL) {
    const items: MatValue[] = [];
    let at = sub.offset;
    for (let i = 0; i < countElements(dims); i++) {
      const cellCursor: Cursor = { ...c, offset: at };
      const cellTag = readTag(cellCursor);
      if (cellTag.type !== MI_MATRIX) {
        throw new UnreadableSource("cell element is not a matrix");
      }
      items.push(parseMatrix(cellCursor, cellTag).value);
      at = cellTag.nextOffset;
    }
    return { name, value: { kind: "cell", dims, items } };
  }

  if (classId === MX_STRUCT) {
    const lenTag = readTag(sub);
    if (lenTag.type !== MI_INT32) {
      throw new UnreadableSource("malformed struct field-name length");
    }
    const fieldNameLength = sub.view.getInt32(lenTag.dataOffset, sub.le);
    sub.offset = lenTag.nextOffset;
    const namesTag = readTag(sub);
    if (namesTag.type !== MI_INT8) {
      throw new UnreadableSource("malformed struct field names");
    }
    const nFields = namesTag.byteLength / fieldNameLength;
    const fieldNames: string[] = [];
    for (let i = 0; i < nFields; i++) {
      const start = namesTag.dataOffset + i * fieldNameLength;
      const raw = c.bytes.subarray(start, start + fieldNameLength);
      const zero = raw.indexOf(0);
      fieldNames.push(
        new TextDecoder("utf-8").decode(zero >= 0 ? raw.subarray(0, zero) : raw),
      );
    }
    const fields = new Map<string, MatValue[]>(fieldNames.map((f) => [f, []]));
    let at = namesTag.nextOffset;
    for (let el = 0; el < countElements(dims); el++) {
      for (const fieldName of fieldNames) {
        const fieldCursor: Cursor = { ...c, offset: at };
        const fieldTag = readTag(fieldCursor);
        if (fieldTag.type !== MI_MATRIX) {
          throw new UnreadableSource(`struct field ${fieldName} is not a matrix`);
        }
        fields.get(fieldName)!.push(parseMatrix(fieldCursor, fieldTag).value);
        at = fieldTag.nextOffset;
      }
    }
    return { name, value: { kind: "struct", dims, fields } };
  }

  // sparse, function handles, objects: recorded but not interpreted
  void end;
  return { name, value: { kind: "opaque", dims, classId } };
}

function parseTopLevel(c: Cursor, out: Map<string, MatValue>): void {
  while (remaining(c) >= 8) {
    const tag = readTag(c);
    if (tag.type === MI_COMPRESSED) {
      const payload = c.bytes.subarray(tag.dataOffset, tag.dataOffset + tag.byteLength);
      let inflated: Buffer;
      try {
        inflated = zlib.inflateSync(payload);
      } catch (err) {
        throw new UnreadableSource(`failed to inflate compressed element: ${err}`);
      }
      const inner: Cursor = {
        view: new DataView(inflated.buffer, inflated.byteOffset, inflated.byteLength),
        bytes: new Uint8Array(inflated.buffer, inflated.byteOffset, inflated.byteLength),
        offset: 0,
        le: c.le,
      };
      parseTopLevel(inner, out);
    } else if (tag.type === MI_MATRIX) {
      const { name, value } = parseMatrix(c, tag);
      if (name) {
        out.set(name, value);
      }
    } else {
      throw new UnreadableSource(`unexpected top-level element type ${tag.type}`);
    }
    c.offset = tag.nextOffset;
  }
}

/** Parse a complete MAT 5 file into a map of top-level variable name to value. */
export function parseMat(bytes: Uint8Array): Map<string, MatValue> {
  if (bytes.byteLength < 128) {
    throw new UnreadableSource("file shorter than the 128-byte MAT header");
  }
  const headerText = new TextDecoder("utf-8").decode(bytes.subarray(0, 116));
  if (headerText.includes("MATLAB 7.3")) {
    throw new UnreadableSource("MATLAB v7.3 (HDF5) files are not supported; re-save as v7");
  }
  if (!headerText.startsWith("MATLAB 5.0 MAT-file")) {
    throw new UnreadableSource("missing MATLAB 5.0 MAT-file header");
  }
  let le: boolean;
  if (bytes[126] === 0x49 && bytes[127] === 0x4d) {
    le = true; // "IM"
  } else if (bytes[126] === 0x4d && bytes[127] === 0x49) {
    le = false; // "MI"
  } else {
    throw new UnreadableSource("bad endian indicator in MAT header");
  }
  const cursor: Cursor = {
    view: new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength),
    bytes,
    offset: 128,
    le,
  };
  const out = new Map<string, MatValue>();
  parseTopLevel(cursor, out);
  return out;
}
