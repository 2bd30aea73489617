/**
 * Conformance against the shared wire-format vectors in
 * fixtures/protocol/. The Python side generates and tests the same
 * files, so a codec drift on either side fails here.
 */

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  CODEC_NAMES,
  Codec,
  HEADER_SIZE,
  ProtocolError,
  decodeFrame,
  decodeReply,
  encodeFrame,
} from "../src/protocol";

const here = path.dirname(fileURLToPath(import.meta.url));
const FIXTURES = path.join(here, "..", "..", "fixtures", "protocol");

interface FrameEntry {
  file: string;
  valid: boolean;
  frame_id?: number;
  codec?: "png" | "jpeg";
  payload_file?: string;
  error?: string;
}

interface ReplyEntry {
  file: string;
  frame_id: number;
  codec: "png" | "jpeg";
  payload_file?: string;
  trailer: Record<string, unknown>;
}

const manifest = JSON.parse(
  readFileSync(path.join(FIXTURES, "manifest.json"), "utf-8"),
) as {
  version: number;
  header_size: number;
  frames: FrameEntry[];
  replies: ReplyEntry[];
  controls: { valid: Array<Record<string, unknown>>; invalid: unknown[] };
};

function fixture(name: string): Uint8Array {
  return new Uint8Array(readFileSync(path.join(FIXTURES, name)));
}

describe("manifest", () => {
  it("agrees on version and header size", () => {
    expect(manifest.version).toBe(1);
    expect(manifest.header_size).toBe(HEADER_SIZE);
  });
});

describe("frame vectors", () => {
  for (const entry of manifest.frames.filter((f) => f.valid)) {
    it(`decodes ${entry.file}`, () => {
      const data = fixture(entry.file);
      const msg = decodeFrame(data);
      expect(Number(msg.frameId)).toBe(entry.frame_id);
      expect(CODEC_NAMES[msg.codec]).toBe(entry.codec);
      if (entry.payload_file) {
        expect(msg.payload).toEqual(fixture(entry.payload_file));
      }
      // Re-encoding reproduces the vector byte for byte.
      expect(encodeFrame(msg.frameId, msg.codec, msg.payload)).toEqual(data);
    });
  }

  for (const entry of manifest.frames.filter((f) => !f.valid)) {
    it(`rejects ${entry.file} (${entry.error})`, () => {
      const data = fixture(entry.file);
      let kind: string | null = null;
      try {
        decodeFrame(data);
      } catch (e) {
        expect(e).toBeInstanceOf(ProtocolError);
        kind = (e as ProtocolError).kind;
      }
      expect(kind).toBe(entry.error);
    });
  }
});

describe("reply vectors", () => {
  for (const entry of manifest.replies) {
    it(`decodes ${entry.file}`, () => {
      const { frame, trailer } = decodeReply(fixture(entry.file));
      expect(Number(frame.frameId)).toBe(entry.frame_id);
      expect(CODEC_NAMES[frame.codec]).toBe(entry.codec);
      if (entry.payload_file) {
        expect(frame.payload).toEqual(fixture(entry.payload_file));
      }
      expect(trailer).toEqual(entry.trailer);
    });
  }

  it("rejects a reply with a missing trailer", () => {
    const bare = encodeFrame(1n, Codec.png, new Uint8Array([1, 2, 3]));
    expect(() => decodeReply(bare)).toThrow(ProtocolError);
  });
});

describe("control vectors", () => {
  const KNOWN = new Set([
    "set_stage", "set_profile", "set_fixation", "set_param",
    "get_profile", "ping",
  ]);

  it("covers every valid control type", () => {
    for (const msg of manifest.controls.valid) {
      expect(KNOWN.has(msg.type as string)).toBe(true);
    }
  });
});

describe("u64 frame ids", () => {
  it("round-trips the extremes", () => {
    for (const id of [0n, 1n, 2n ** 53n, 2n ** 64n - 1n]) {
      const data = encodeFrame(id, Codec.jpeg, new Uint8Array(0));
      expect(decodeFrame(data).frameId).toBe(id);
    }
  });

  it("rejects out-of-range ids", () => {
    expect(() => encodeFrame(-1n, Codec.png, new Uint8Array(0))).toThrow(ProtocolError);
    expect(() => encodeFrame(2n ** 64n, Codec.png, new Uint8Array(0))).toThrow(ProtocolError);
  });
});

describe("strictness", () => {
  it("rejects trailing bytes after the payload", () => {
    const data = encodeFrame(5n, Codec.png, new Uint8Array([9]));
    const padded = new Uint8Array(data.length + 1);
    padded.set(data);
    expect(() => decodeFrame(padded)).toThrow(/trailing/);
  });

  it("rejects a trailer length that disagrees with the body", () => {
    const head = encodeFrame(5n, Codec.png, new Uint8Array([9]));
    const out = new Uint8Array(head.length + 4 + 2);
    out.set(head);
    new DataView(out.buffer).setUint32(head.length, 99, true);
    out.set([0x7b, 0x7d], head.length + 4); // "{}"
    expect(() => decodeReply(out)).toThrow(/trailer length mismatch/);
  });
});
