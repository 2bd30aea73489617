/** Rolling round-trip latency window plus the session's frame counters. */

export class RollingLatency {
  private samples: number[] = [];

  constructor(private readonly window = 30) {}

  push(ms: number): void {
    this.samples.push(ms);
    if (this.samples.length > this.window) this.samples.shift();
  }

  get count(): number {
    return this.samples.length;
  }

  get last(): number | null {
    return this.samples.length ? this.samples[this.samples.length - 1] : null;
  }

  get mean(): number | null {
    if (!this.samples.length) return null;
    return this.samples.reduce((a, b) => a + b, 0) / this.samples.length;
  }

  get median(): number | null {
    if (!this.samples.length) return null;
    const s = [...this.samples].sort((a, b) => a - b);
    const mid = s.length >> 1;
    return s.length % 2 ? s[mid] : (s[mid - 1] + s[mid]) / 2;
  }
}

export interface SessionCounters {
  framesSent: number;
  repliesReceived: number;
  /** Frames the server discarded under backpressure (from reply trailers). */
  droppedServer: number;
  /** Captures skipped client-side because max in-flight was reached. */
  droppedClient: number;
  /** Replies whose frame_id matched nothing we sent; frame discarded. */
  idMismatches: number;
  /** Frame-level error replies plus replies that failed to decode. */
  frameErrors: number;
}

export function freshCounters(): SessionCounters {
  return {
    framesSent: 0,
    repliesReceived: 0,
    droppedServer: 0,
    droppedClient: 0,
    idMismatches: 0,
    frameErrors: 0,
  };
}
