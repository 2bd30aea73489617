/**
 * Wire protocol, version 1. Mirrors the service's framing byte for byte;
 * the shared vectors in fixtures/protocol/ hold both sides to the same
 * layout.
 *
 * Binary frame (little-endian):
 *   offset 0  4  magic "VSIM"
 *   offset 4  1  version = 1
 *   offset 5  1  codec: 1 = PNG, 2 = JPEG
 *   offset 6  8  frame_id, u64
 *   offset 14 4  payload length, u32
 *   offset 18 n  payload (encoded image)
 *
 * Server replies reuse the layout and append a u32 trailer length plus a
 * UTF-8 JSON trailer {frame_id, timing, dropped, warnings}.
 */

export const MAGIC = "VSIM";
export const VERSION = 1;
export const HEADER_SIZE = 18;

export const Codec = { png: 1, jpeg: 2 } as const;
export type CodecName = keyof typeof Codec;
export type CodecId = (typeof Codec)[CodecName];

export const CODEC_NAMES: Record<CodecId, CodecName> = { 1: "png", 2: "jpeg" };

export type ProtocolErrorKind =
  | "magic"
  | "version"
  | "codec"
  | "length"
  | "trailer"
  | "frame_id";

export class ProtocolError extends Error {
  constructor(public kind: ProtocolErrorKind, message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

export interface FrameMessage {
  frameId: bigint;
  codec: CodecId;
  payload: Uint8Array;
}

export interface FilterTiming {
  name: string;
  us: number;
}

export interface TimingReport {
  width: number;
  height: number;
  filters: FilterTiming[];
  total_us: number;
  budget_us: number;
  over_budget: boolean;
}

export interface ReplyTrailer {
  frame_id: number;
  timing: TimingReport;
  dropped: number[];
  warnings: string[];
}

const U64_MAX = (1n << 64n) - 1n;

export function encodeFrame(
  frameId: bigint,
  codec: CodecId,
  payload: Uint8Array,
): Uint8Array {
  if (!(codec in CODEC_NAMES)) {
    throw new ProtocolError("codec", `codec must be 1 (PNG) or 2 (JPEG), got ${codec}`);
  }
  if (frameId < 0n || frameId > U64_MAX) {
    throw new ProtocolError("frame_id", `frame_id must fit u64, got ${frameId}`);
  }
  const out = new Uint8Array(HEADER_SIZE + payload.length);
  const view = new DataView(out.buffer);
  out[0] = 0x56; // V
  out[1] = 0x53; // S
  out[2] = 0x49; // I
  out[3] = 0x4d; // M
  out[4] = VERSION;
  out[5] = codec;
  view.setBigUint64(6, frameId, true);
  view.setUint32(14, payload.length, true);
  out.set(payload, HEADER_SIZE);
  return out;
}

interface Parsed {
  msg: FrameMessage;
  end: number; // offset just past the payload
}

function parseHeader(data: Uint8Array): Parsed {
  if (data.length < HEADER_SIZE) {
    throw new ProtocolError(
      "length",
      `frame message too short: ${data.length} < ${HEADER_SIZE} bytes`,
    );
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const magic = String.fromCharCode(data[0], data[1], data[2], data[3]);
  if (magic !== MAGIC) {
    throw new ProtocolError("magic", `bad magic ${JSON.stringify(magic)}, expected "VSIM"`);
  }
  if (data[4] !== VERSION) {
    throw new ProtocolError("version", `unsupported protocol version ${data[4]}`);
  }
  const codec = data[5];
  if (!(codec in CODEC_NAMES)) {
    throw new ProtocolError("codec", `unknown codec ${codec}`);
  }
  const frameId = view.getBigUint64(6, true);
  const length = view.getUint32(14, true);
  if (data.length < HEADER_SIZE + length) {
    throw new ProtocolError(
      "length",
      `truncated payload: header says ${length} bytes, ${data.length - HEADER_SIZE} present`,
    );
  }
  return {
    msg: {
      frameId,
      codec: codec as CodecId,
      payload: data.subarray(HEADER_SIZE, HEADER_SIZE + length),
    },
    end: HEADER_SIZE + length,
  };
}

/** Parse a frame message; rejects trailing garbage. */
export function decodeFrame(data: Uint8Array): FrameMessage {
  const { msg, end } = parseHeader(data);
  if (data.length !== end) {
    throw new ProtocolError("length", "trailing bytes after payload");
  }
  return msg;
}

/** Parse a server reply into its frame and decoded JSON trailer. */
export function decodeReply(data: Uint8Array): {
  frame: FrameMessage;
  trailer: ReplyTrailer;
} {
  const { msg, end } = parseHeader(data);
  if (data.length < end + 4) {
    throw new ProtocolError("trailer", "reply missing trailer length");
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const tlen = view.getUint32(end, true);
  if (data.length !== end + 4 + tlen) {
    throw new ProtocolError(
      "trailer",
      `trailer length mismatch: header says ${tlen}, ${data.length - end - 4} present`,
    );
  }
  const raw = new TextDecoder().decode(data.subarray(end + 4, end + 4 + tlen));
  let trailer: ReplyTrailer;
  try {
    trailer = JSON.parse(raw) as ReplyTrailer;
  } catch (e) {
    throw new ProtocolError("trailer", `trailer is not valid JSON: ${e}`);
  }
  return { frame: msg, trailer };
}

// ---------------------------------------------------------------------------
// Control messages (JSON text)

export type ControlMsg =
  | { type: "set_stage"; stage: number }
  | { type: "set_profile"; profile: Record<string, unknown> }
  | { type: "set_fixation"; x: number; y: number }
  | { type: "set_param"; path: string; value: unknown }
  | { type: "get_profile" }
  | { type: "ping" };

export interface ControlError {
  message: string;
  field: string | null;
}

/**
 * Text replies: control acks carry the full acknowledged profile;
 * failures leave the session unchanged and name the offending field.
 * A text reply with type "frame" reports a malformed or oversized
 * binary frame instead (frame_id is null when unrecoverable).
 */
export type TextReply =
  | { ok: true; type: string; profile?: Record<string, unknown>; pong?: boolean; version?: string }
  | { ok: false; type: string | null; frame_id?: number | null; error: ControlError };

export function parseTextReply(raw: string): TextReply {
  return JSON.parse(raw) as TextReply;
}
