/**
 * Entry point. The service URL comes from ?service=http://host:port
 * (default: the page's own origin), so the built bundle deploys as
 * static files anywhere. No simulation happens here: every simulated
 * pixel on screen came back from the service.
 */

import { CaptureLoop, DEFAULT_CAPTURE, encodeCanvas } from "./capture";
import { ControlPanel } from "./controls";
import { PaneMatcher } from "./panes";
import { Codec, type ControlMsg } from "./protocol";
import { VsimSession } from "./session";
import { ViewerStore, type PresetInfo } from "./state";
import { drawTimingBar } from "./timingbar";
import "./style.css";

function serviceBase(): string {
  const q = new URLSearchParams(location.search).get("service");
  return (q ?? location.origin).replace(/\/$/, "");
}

function wsUrl(base: string): string {
  return base.replace(/^http/, "ws") + "/session";
}

function getCtx(canvas: HTMLCanvasElement): CanvasRenderingContext2D {
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d canvas not available");
  return ctx;
}

async function main(): Promise<void> {
  const base = serviceBase();
  const store = new ViewerStore();

  const app = document.getElementById("app")!;
  const panes = document.createElement("div");
  panes.className = "panes";
  const left = document.createElement("canvas");
  const right = document.createElement("canvas");
  left.width = right.width = DEFAULT_CAPTURE.width;
  left.height = right.height = DEFAULT_CAPTURE.height;
  const leftWrap = document.createElement("figure");
  leftWrap.appendChild(left);
  leftWrap.appendChild(Object.assign(document.createElement("figcaption"), {
    textContent: "original",
  }));
  const rightWrap = document.createElement("figure");
  rightWrap.appendChild(right);
  rightWrap.appendChild(Object.assign(document.createElement("figcaption"), {
    textContent: "simulated",
  }));
  panes.append(leftWrap, rightWrap);

  const timingCanvas = document.createElement("canvas");
  timingCanvas.className = "timing";
  timingCanvas.width = 640;
  timingCanvas.height = 14;
  const statsLine = document.createElement("div");
  statsLine.className = "stats";

  const matcher = new PaneMatcher<ImageData>();
  const leftCtx = getCtx(left);
  const rightCtx = getCtx(right);
  const timingCtx = getCtx(timingCanvas);

  const renderStats = (session: VsimSession): void => {
    const lat = session.latency;
    const c = session.counters;
    const ms = (v: number | null) => (v === null ? "-" : v.toFixed(0));
    statsLine.textContent =
      `latency ${ms(lat.last)} ms (median ${ms(lat.median)} over ${lat.count})  |  ` +
      `sent ${c.framesSent}  replies ${c.repliesReceived}  ` +
      `dropped server ${c.droppedServer} / client ${c.droppedClient}  ` +
      `errors ${c.frameErrors}  mismatches ${c.idMismatches}`;
  };

  const session = new VsimSession(wsUrl(base), (url) => new WebSocket(url), {
    onStatus: (status, detail) => store.setStatus(status, detail ?? ""),
    onReply: async (reply) => {
      const original = matcher.take(reply.frameId);
      if (original) leftCtx.putImageData(original, 0, 0);
      try {
        const mime = reply.codec === Codec.png ? "image/png" : "image/jpeg";
        const bitmap = await createImageBitmap(
          new Blob([reply.payload.slice().buffer], { type: mime }),
        );
        right.width = bitmap.width;
        right.height = bitmap.height;
        rightCtx.drawImage(bitmap, 0, 0);
        bitmap.close();
      } catch {
        session.counters.frameErrors++;
      }
      drawTimingBar(timingCtx, reply.trailer.timing, timingCanvas.width, timingCanvas.height);
      renderStats(session);
    },
    onFrameError: (frameId) => {
      if (frameId !== null) matcher.forget(BigInt(frameId));
      renderStats(session);
    },
    onCountersChanged: () => renderStats(session),
  });

  const sendControls = (msgs: ControlMsg[]): void => {
    // Strict arrival order on the server makes sequential acks safe.
    void (async () => {
      for (const msg of msgs) {
        try {
          const reply = await session.request(msg);
          store.applyReply(msg, reply);
        } catch {
          break; // connection dropped; banner handles it
        }
      }
    })();
  };

  let pngMode = false;
  const capture = new CaptureLoop(DEFAULT_CAPTURE, (canvas) => {
    if (!session.connected) return;
    void encodeCanvas(canvas, pngMode ? "png" : "jpeg").then((bytes) => {
      const snapshot = getCtx(canvas).getImageData(0, 0, canvas.width, canvas.height);
      const id = session.sendFrame(bytes, pngMode ? Codec.png : Codec.jpeg);
      if (id !== null) matcher.remember(id, snapshot);
    });
  });

  const connect = async (): Promise<void> => {
    try {
      const res = await fetch(base + "/profiles");
      const doc = (await res.json()) as { profiles: PresetInfo[] };
      store.setPresets(doc.profiles);
      await session.connect();
      // Prime the acked profile so controls have a value to reflect.
      const ack = await session.request({ type: "get_profile" });
      store.applyReply({ type: "get_profile" }, ack);
    } catch (e) {
      store.setStatus("error", String(e));
    }
  };

  const panel = new ControlPanel(store, sendControls, () => void connect());

  const pngToggle = document.createElement("label");
  pngToggle.className = "toggle";
  const pngBox = document.createElement("input");
  pngBox.type = "checkbox";
  pngBox.addEventListener("change", () => {
    pngMode = pngBox.checked;
  });
  pngToggle.append(pngBox, document.createTextNode("lossless (PNG) upload"));
  panel.root.appendChild(pngToggle);

  right.addEventListener("click", (ev) => {
    sendControls([panel.fixationFromClick(ev, right)]);
  });

  app.append(panel.root, panes, timingCanvas, statsLine);

  await connect();
  await capture.start();
  if (capture.usingTestCard) {
    leftWrap.querySelector("figcaption")!.textContent = "original (test card)";
  }
}

void main();
