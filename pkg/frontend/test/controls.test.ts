// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import { ControlPanel } from "../src/controls";
import type { ControlMsg, TextReply } from "../src/protocol";
import { type PresetInfo, ViewerStore } from "../src/state";

function profileDoc(over: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    schema: "vsim-profile/1",
    name: "stage2",
    stage: 2,
    field: { fov_h: 60.0, fixation: [0.5, 0.5] },
    acuity: { mar0: 1.0, e2: 2.0, sigma_cap: 12.0, enabled: true },
    cvd: { deficiency: "tritan", severity: 0.4 },
    haze: { enabled: true },
    floaters: { enabled: false },
    clouding: { enabled: false },
    patches: { enabled: false },
    ...over,
  };
}

function presets(): PresetInfo[] {
  return [0, 1, 2, 3, 4].map((stage) => ({
    stage,
    name: `stage${stage}`,
    description: `preset ${stage}`,
    profile: profileDoc({ stage }),
  }));
}

interface Rig {
  store: ViewerStore;
  panel: ControlPanel;
  sent: ControlMsg[][];
  retries: number[];
}

let rig: Rig;

beforeEach(() => {
  const store = new ViewerStore();
  const sent: ControlMsg[][] = [];
  const retries: number[] = [];
  const panel = new ControlPanel(store, (msgs) => sent.push(msgs), () => retries.push(1));
  document.body.textContent = "";
  document.body.appendChild(panel.root);
  store.setPresets(presets());
  store.applyReply({ type: "get_profile" }, {
    ok: true, type: "get_profile", profile: profileDoc(),
  } as TextReply);
  store.setStatus("connected");
  rig = { store, panel, sent, retries };
});

describe("stage buttons", () => {
  it("lists exactly the presets the service returned", () => {
    const buttons = rig.panel.root.querySelectorAll(".stage-btn");
    expect(buttons).toHaveLength(5);
    expect([...buttons].map((b) => b.textContent)).toEqual(["0", "1", "2", "3", "4"]);
    expect((buttons[3] as HTMLButtonElement).title).toBe("preset 3");
  });

  it("marks the acked stage active", () => {
    const active = rig.panel.root.querySelectorAll(".stage-btn.active");
    expect(active).toHaveLength(1);
    expect(active[0].textContent).toBe("2");
  });

  it("click sends set_stage plus the sticky overrides", () => {
    rig.store.applyReply(rig.store.planOverride("acuity.enabled", false), {
      ok: true, type: "set_param",
      profile: profileDoc({ acuity: { enabled: false } }),
    } as TextReply);
    const btn = [...rig.panel.root.querySelectorAll(".stage-btn")]
      .find((b) => b.textContent === "4") as HTMLButtonElement;
    btn.click();
    expect(rig.sent.at(-1)).toEqual([
      { type: "set_stage", stage: 4 },
      { type: "set_param", path: "acuity.enabled", value: false },
    ]);
  });
});

describe("severity control", () => {
  const slider = () =>
    rig.panel.root.querySelector('input[type="range"]') as HTMLInputElement;

  it("reflects the acked value", () => {
    expect(slider().value).toBe("0.4");
  });

  it("change sends a set_param override", () => {
    slider().value = "0.8";
    slider().dispatchEvent(new Event("change"));
    expect(rig.sent.at(-1)).toEqual([
      { type: "set_param", path: "cvd.severity", value: 0.8 },
    ]);
  });

  it("a rejected value renders inline and reverts the slider", () => {
    slider().value = "0.95";
    rig.store.applyReply(rig.store.planOverride("cvd.severity", 1.5), {
      ok: false, type: "set_param",
      error: { message: "cvd.severity must be within [0, 1], got 1.5", field: "cvd.severity" },
    } as TextReply);
    const err = rig.panel.root.querySelectorAll(".inline-error");
    const texts = [...err].map((e) => e.textContent).join(" ");
    expect(texts).toMatch(/within \[0, 1\]/);
    expect(slider().value).toBe("0.4"); // back to the acked value
  });
});

describe("filter toggles", () => {
  it("reflect acked enables and send overrides on change", () => {
    const boxes = [...rig.panel.root.querySelectorAll(".toggles input")] as
      HTMLInputElement[];
    expect(boxes).toHaveLength(5);
    expect(boxes[0].checked).toBe(true); // blur, acked enabled
    expect(boxes[2].checked).toBe(false); // clouding
    boxes[0].checked = false;
    boxes[0].dispatchEvent(new Event("change"));
    expect(rig.sent.at(-1)).toEqual([
      { type: "set_param", path: "acuity.enabled", value: false },
    ]);
  });
});

describe("connection banner", () => {
  it("is hidden while connected and visible with detail on failure", () => {
    const banner = rig.panel.root.querySelector(".banner")!;
    expect(banner.classList.contains("visible")).toBe(false);
    rig.store.setStatus("error", "cannot reach ws://x/session");
    expect(banner.classList.contains("visible")).toBe(true);
    expect(banner.textContent).toMatch(/cannot reach/);
  });

  it("retry button calls back", () => {
    rig.store.setStatus("error", "down");
    (rig.panel.root.querySelector(".banner button") as HTMLButtonElement).click();
    expect(rig.retries).toHaveLength(1);
  });
});

describe("fixation from click", () => {
  it("normalizes and clamps canvas coordinates", () => {
    const canvas = document.createElement("canvas");
    canvas.getBoundingClientRect = () =>
      ({ left: 10, top: 20, width: 200, height: 100 }) as DOMRect;
    const mid = rig.panel.fixationFromClick(
      new MouseEvent("click", { clientX: 110, clientY: 70 }), canvas);
    expect(mid).toEqual({ type: "set_fixation", x: 0.5, y: 0.5 });
    const outside = rig.panel.fixationFromClick(
      new MouseEvent("click", { clientX: 500, clientY: 0 }), canvas);
    expect(outside).toEqual({ type: "set_fixation", x: 1, y: 0 });
  });
});
