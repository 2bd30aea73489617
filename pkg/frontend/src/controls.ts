/**
 * The control panel. Everything renders from the store's acked profile;
 * user input only sends controls and waits. A rejected control shows
 * its server message inline next to the control it came from, and the
 * next render snaps the control back to the acked value.
 */

import type { ControlMsg } from "./protocol";
import { type PresetInfo, ViewerStore } from "./state";

export type SendControls = (msgs: ControlMsg[]) => void;

/** Per-filter enable toggles exposed as sticky overrides. */
const FILTER_TOGGLES: Array<[label: string, path: string]> = [
  ["blur", "acuity.enabled"],
  ["haze", "haze.enabled"],
  ["clouding", "clouding.enabled"],
  ["floaters", "floaters.enabled"],
  ["patches", "patches.enabled"],
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export class ControlPanel {
  readonly root: HTMLElement;

  private stageRow = el("div", "stage-row");
  private severityInput = el("input") as HTMLInputElement;
  private severityReadout = el("span", "readout");
  private severityError = el("span", "inline-error");
  private stageError = el("span", "inline-error");
  private toggleInputs = new Map<string, HTMLInputElement>();
  private fixationReadout = el("span", "readout");
  private banner = el("div", "banner");
  private retryBtn = el("button", "", "retry");

  constructor(
    private readonly store: ViewerStore,
    private readonly send: SendControls,
    private readonly onRetry: () => void,
  ) {
    this.root = el("div", "controls");

    this.banner.appendChild(el("span", "banner-text"));
    this.retryBtn.addEventListener("click", () => this.onRetry());
    this.banner.appendChild(this.retryBtn);
    this.root.appendChild(this.banner);

    const stageBlock = el("div", "block");
    stageBlock.appendChild(el("label", "", "stage"));
    stageBlock.appendChild(this.stageRow);
    stageBlock.appendChild(this.stageError);
    this.root.appendChild(stageBlock);

    const sev = el("div", "block");
    sev.appendChild(el("label", "", "color deficit severity"));
    this.severityInput.type = "range";
    this.severityInput.min = "0";
    this.severityInput.max = "1";
    this.severityInput.step = "0.05";
    this.severityInput.addEventListener("change", () => {
      this.store.clearError("cvd.severity");
      this.send([this.store.planOverride("cvd.severity", Number(this.severityInput.value))]);
    });
    sev.appendChild(this.severityInput);
    sev.appendChild(this.severityReadout);
    sev.appendChild(this.severityError);
    this.root.appendChild(sev);

    const toggles = el("div", "block toggles");
    for (const [label, path] of FILTER_TOGGLES) {
      const wrap = el("label", "toggle", label);
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.addEventListener("change", () => {
        this.send([this.store.planOverride(path, box.checked)]);
      });
      wrap.prepend(box);
      this.toggleInputs.set(path, box);
      toggles.appendChild(wrap);
    }
    this.root.appendChild(toggles);

    const fix = el("div", "block");
    fix.appendChild(el("label", "", "fixation (click the simulated pane)"));
    fix.appendChild(this.fixationReadout);
    this.root.appendChild(fix);

    store.subscribe(() => this.render());
    this.render();
  }

  /** Map a click on the simulated canvas to a set_fixation control. */
  fixationFromClick(ev: MouseEvent, canvas: HTMLCanvasElement): ControlMsg {
    const rect = canvas.getBoundingClientRect();
    const x = (ev.clientX - rect.left) / rect.width;
    const y = (ev.clientY - rect.top) / rect.height;
    return {
      type: "set_fixation",
      x: Math.min(1, Math.max(0, x)),
      y: Math.min(1, Math.max(0, y)),
    };
  }

  private renderStageButtons(presets: PresetInfo[]): void {
    this.stageRow.textContent = "";
    for (const p of presets) {
      const btn = el("button", "stage-btn", String(p.stage));
      btn.title = p.description;
      if (this.store.stage === p.stage) btn.classList.add("active");
      btn.addEventListener("click", () => {
        this.store.clearError("stage");
        this.send(this.store.planStageSelect(p.stage));
      });
      this.stageRow.appendChild(btn);
    }
  }

  private render(): void {
    const s = this.store;

    const bannerText = this.banner.querySelector(".banner-text") as HTMLElement;
    if (s.status === "connected") {
      this.banner.classList.remove("visible");
    } else {
      this.banner.classList.add("visible");
      bannerText.textContent =
        s.status === "connecting" ? "connecting..." :
        s.status === "error" ? `connection failed: ${s.statusDetail}` :
        s.status === "closed" ? "disconnected" : "idle";
      this.retryBtn.style.display = s.status === "error" || s.status === "closed"
        ? "" : "none";
    }

    this.renderStageButtons(s.presets);
    this.stageError.textContent = s.inlineErrors.get("stage") ?? "";

    // Acked values only: a change the server has not confirmed (or has
    // rejected) never sticks in the UI.
    const severity = s.value("cvd.severity");
    if (typeof severity === "number") {
      this.severityInput.value = String(severity);
      this.severityReadout.textContent = severity.toFixed(2);
    }
    this.severityError.textContent = s.inlineErrors.get("cvd.severity") ?? "";

    for (const [path, box] of this.toggleInputs) {
      const v = s.value(path);
      if (typeof v === "boolean") box.checked = v;
    }

    const fixation = s.value("field.fixation");
    if (Array.isArray(fixation) && fixation.length === 2) {
      this.fixationReadout.textContent =
        `(${Number(fixation[0]).toFixed(2)}, ${Number(fixation[1]).toFixed(2)})`;
    }
  }
}
