/**
 * One live connection to the service's WS /session endpoint.
 *
 * The server processes messages strictly in arrival order and answers
 * every control with exactly one text reply, so control acks correlate
 * by FIFO position (text replies with type "frame" are frame errors,
 * not acks). Frames correlate by frame_id. At most maxInFlight frames
 * are outstanding; excess captures are dropped client-side and counted,
 * never queued, so a slow link degrades to a lower rate instead of
 * growing latency.
 */

import {
  type CodecId,
  type ControlMsg,
  type ReplyTrailer,
  type TextReply,
  decodeReply,
  encodeFrame,
  parseTextReply,
} from "./protocol";
import { RollingLatency, type SessionCounters, freshCounters } from "./stats";

/** The subset of WebSocket both browsers and the ws package provide. */
export interface WsLike {
  binaryType: string;
  readyState: number;
  send(data: string | ArrayBufferLike | Uint8Array): void;
  close(): void;
  addEventListener(type: "open" | "close" | "error", fn: (ev: unknown) => void): void;
  addEventListener(type: "message", fn: (ev: { data: unknown }) => void): void;
}

export type WsFactory = (url: string) => WsLike;

export interface ReplyEvent {
  frameId: bigint;
  codec: CodecId;
  payload: Uint8Array;
  trailer: ReplyTrailer;
  rttMs: number;
}

export interface SessionHooks {
  onStatus?(status: "connecting" | "connected" | "closed" | "error", detail?: string): void;
  onReply?(reply: ReplyEvent): void;
  onFrameError?(frameId: number | null, message: string): void;
  onCountersChanged?(): void;
}

interface PendingControl {
  msg: ControlMsg;
  resolve(reply: TextReply): void;
  reject(err: Error): void;
}

const OPEN = 1;

export class VsimSession {
  readonly latency = new RollingLatency(30);
  readonly counters: SessionCounters = freshCounters();

  private ws: WsLike | null = null;
  private nextFrameId = 0n;
  private inFlight = new Map<bigint, number>(); // frame_id -> send time ms
  private pendingControls: PendingControl[] = [];
  private now: () => number;

  constructor(
    private readonly url: string,
    private readonly wsFactory: WsFactory,
    private readonly hooks: SessionHooks = {},
    private readonly maxInFlight = 2,
    now?: () => number,
  ) {
    this.now = now ?? (() => performance.now());
  }

  connect(): Promise<void> {
    this.hooks.onStatus?.("connecting");
    return new Promise((resolve, reject) => {
      let settled = false;
      const ws = this.wsFactory(this.url);
      ws.binaryType = "arraybuffer";
      ws.addEventListener("open", () => {
        settled = true;
        this.hooks.onStatus?.("connected");
        resolve();
      });
      ws.addEventListener("error", () => {
        this.hooks.onStatus?.("error", `cannot reach ${this.url}`);
        if (!settled) {
          settled = true;
          reject(new Error(`websocket connection failed: ${this.url}`));
        }
      });
      ws.addEventListener("close", () => {
        this.failPendingControls(new Error("connection closed"));
        this.hooks.onStatus?.("closed");
      });
      ws.addEventListener("message", (ev) => this.onMessage(ev.data));
      this.ws = ws;
    });
  }

  close(): void {
    this.ws?.close();
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === OPEN;
  }

  get framesInFlight(): number {
    return this.inFlight.size;
  }

  /** Send one control message; resolves with the server's reply. */
  request(msg: ControlMsg): Promise<TextReply> {
    if (!this.connected || !this.ws) {
      return Promise.reject(new Error("not connected"));
    }
    return new Promise((resolve, reject) => {
      this.pendingControls.push({ msg, resolve, reject });
      this.ws!.send(JSON.stringify(msg));
    });
  }

  /**
   * Send one encoded image; returns its frame_id, or null when the
   * in-flight cap was hit and the capture was dropped client-side.
   */
  sendFrame(payload: Uint8Array, codec: CodecId): bigint | null {
    if (!this.connected || !this.ws) return null;
    if (this.inFlight.size >= this.maxInFlight) {
      this.counters.droppedClient++;
      this.hooks.onCountersChanged?.();
      return null;
    }
    const id = this.nextFrameId++;
    this.inFlight.set(id, this.now());
    this.ws.send(encodeFrame(id, codec, payload));
    this.counters.framesSent++;
    this.hooks.onCountersChanged?.();
    return id;
  }

  private onMessage(data: unknown): void {
    if (typeof data === "string") {
      this.onText(data);
    } else if (data instanceof ArrayBuffer) {
      this.onBinary(new Uint8Array(data));
    } else if (ArrayBuffer.isView(data)) {
      const v = data as ArrayBufferView;
      this.onBinary(new Uint8Array(v.buffer, v.byteOffset, v.byteLength));
    }
  }

  private onText(raw: string): void {
    let reply: TextReply;
    try {
      reply = parseTextReply(raw);
    } catch {
      return; // not JSON; nothing sane to do
    }
    if (!reply.ok && reply.type === "frame") {
      // Frame-level failure: frees the in-flight slot, no control ack.
      const fid = reply.frame_id;
      if (fid !== null && fid !== undefined) this.inFlight.delete(BigInt(fid));
      this.counters.frameErrors++;
      this.hooks.onCountersChanged?.();
      this.hooks.onFrameError?.(fid ?? null, reply.error.message);
      return;
    }
    const pending = this.pendingControls.shift();
    pending?.resolve(reply);
  }

  private onBinary(data: Uint8Array): void {
    let frame, trailer;
    try {
      ({ frame, trailer } = decodeReply(data));
    } catch (e) {
      this.counters.frameErrors++;
      this.hooks.onCountersChanged?.();
      this.hooks.onFrameError?.(null, String(e));
      return;
    }
    // Server-side drops never get replies of their own; the trailer is
    // the only notice, so release their slots here.
    for (const id of trailer.dropped) {
      this.inFlight.delete(BigInt(id));
      this.counters.droppedServer++;
    }
    const sent = this.inFlight.get(frame.frameId);
    if (sent === undefined) {
      this.counters.idMismatches++;
      this.hooks.onCountersChanged?.();
      return; // discard: nothing we sent has this id
    }
    this.inFlight.delete(frame.frameId);
    const rtt = this.now() - sent;
    this.latency.push(rtt);
    this.counters.repliesReceived++;
    this.hooks.onCountersChanged?.();
    this.hooks.onReply?.({
      frameId: frame.frameId,
      codec: frame.codec,
      payload: frame.payload,
      trailer,
      rttMs: rtt,
    });
  }

  private failPendingControls(err: Error): void {
    const pending = this.pendingControls;
    this.pendingControls = [];
    for (const p of pending) p.reject(err);
  }
}
