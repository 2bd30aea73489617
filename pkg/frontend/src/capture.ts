/**
 * Frame source: the webcam when permission is granted, the built-in
 * test card otherwise (demos and CI run cameraless). Either way frames
 * land on a canvas, get encoded (JPEG quality 0.8 by default, PNG when
 * pixel-exact inspection is wanted) and handed to the sink at sendFps.
 */

import { testCard } from "./testcard";

export interface CaptureConfig {
  width: number;
  height: number;
  sendFps: number;
}

export const DEFAULT_CAPTURE: CaptureConfig = { width: 640, height: 480, sendFps: 15 };

export type FrameSink = (canvas: HTMLCanvasElement, frameIndex: number) => void;

export class CaptureLoop {
  readonly canvas: HTMLCanvasElement;
  usingTestCard = false;

  private ctx: CanvasRenderingContext2D;
  private video: HTMLVideoElement | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private frameIndex = 0;

  constructor(
    private readonly config: CaptureConfig = DEFAULT_CAPTURE,
    private readonly sink: FrameSink,
  ) {
    this.canvas = document.createElement("canvas");
    this.canvas.width = config.width;
    this.canvas.height = config.height;
    const ctx = this.canvas.getContext("2d", { willReadFrequently: true });
    if (!ctx) throw new Error("2d canvas not available");
    this.ctx = ctx;
  }

  /** Try the camera; fall back to the test card on any failure. */
  async start(): Promise<void> {
    try {
      const stream = await navigator.mediaDevices.getUserMedia({
        video: { width: this.config.width, height: this.config.height },
        audio: false,
      });
      const video = document.createElement("video");
      video.srcObject = stream;
      video.muted = true;
      await video.play();
      this.video = video;
      this.usingTestCard = false;
    } catch {
      this.video = null;
      this.usingTestCard = true;
    }
    this.timer = setInterval(() => this.tick(), 1000 / this.config.sendFps);
  }

  stop(): void {
    if (this.timer) clearInterval(this.timer);
    this.timer = null;
    const stream = this.video?.srcObject as MediaStream | null;
    stream?.getTracks().forEach((t) => t.stop());
    this.video = null;
  }

  private tick(): void {
    const { width, height } = this.canvas;
    if (this.video && this.video.readyState >= 2) {
      this.ctx.drawImage(this.video, 0, 0, width, height);
    } else {
      const card = testCard(width, height, this.frameIndex);
      this.ctx.putImageData(
        new ImageData(new Uint8ClampedArray(card.data), width, height), 0, 0);
    }
    this.sink(this.canvas, this.frameIndex++);
  }
}

/** Encode a canvas to PNG or JPEG bytes via toBlob. */
export function encodeCanvas(
  canvas: HTMLCanvasElement,
  codec: "png" | "jpeg",
  jpegQuality = 0.8,
): Promise<Uint8Array> {
  return new Promise((resolve, reject) => {
    canvas.toBlob(
      (blob) => {
        if (!blob) {
          reject(new Error("canvas encode failed"));
          return;
        }
        blob.arrayBuffer().then((buf) => resolve(new Uint8Array(buf)), reject);
      },
      codec === "png" ? "image/png" : "image/jpeg",
      jpegQuality,
    );
  });
}
