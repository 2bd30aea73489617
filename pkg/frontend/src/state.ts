/**
 * Viewer state. One rule above all: controls render the last
 * server-acknowledged profile, never the optimistic local value. A
 * control change goes out as a message; the UI moves only when the ack
 * comes back, and a rejected control reverts to the acked value with an
 * inline error against the offending path.
 *
 * Overrides (severity slider, per-filter enable toggles) are sticky:
 * selecting a stage swaps in the whole preset server-side, so the
 * viewer re-applies the user's overrides on top, keeping the control
 * panel meaning "this stage, as I tweaked it".
 */

import type { ControlMsg, TextReply } from "./protocol";

export type ProfileDoc = Record<string, unknown>;

export type ConnStatus = "idle" | "connecting" | "connected" | "error" | "closed";

export interface PresetInfo {
  stage: number;
  name: string;
  description: string;
  profile: ProfileDoc;
}

/** Read a dotted path ("cvd.severity") out of a profile document. */
export function profileValue(doc: ProfileDoc | null, path: string): unknown {
  if (!doc) return undefined;
  let node: unknown = doc;
  for (const part of path.split(".")) {
    if (typeof node !== "object" || node === null) return undefined;
    node = (node as Record<string, unknown>)[part];
  }
  return node;
}

export class ViewerStore {
  status: ConnStatus = "idle";
  statusDetail = "";
  presets: PresetInfo[] = [];
  ackedProfile: ProfileDoc | null = null;
  /** Sticky dotted-path overrides, in insertion order. */
  readonly overrides = new Map<string, unknown>();
  /** Inline validation errors keyed by dotted path ("" for stage). */
  readonly inlineErrors = new Map<string, string>();

  private listeners: Array<() => void> = [];

  subscribe(fn: () => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  setStatus(status: ConnStatus, detail = ""): void {
    this.status = status;
    this.statusDetail = detail;
    this.emit();
  }

  setPresets(presets: PresetInfo[]): void {
    this.presets = presets;
    this.emit();
  }

  /** The acked value behind a control, i.e. what the UI must show. */
  value(path: string): unknown {
    return profileValue(this.ackedProfile, path);
  }

  get stage(): number | null {
    const s = this.value("stage");
    return typeof s === "number" ? s : null;
  }

  /**
   * Controls to reach "stage n with my overrides": the stage swap, then
   * every sticky override re-applied in the order the user set them.
   */
  planStageSelect(stage: number): ControlMsg[] {
    const msgs: ControlMsg[] = [{ type: "set_stage", stage }];
    for (const [path, value] of this.overrides) {
      msgs.push({ type: "set_param", path, value });
    }
    return msgs;
  }

  planOverride(path: string, value: unknown): ControlMsg {
    return { type: "set_param", path, value };
  }

  /**
   * Fold one server text reply into the store. Acks install the
   * acknowledged profile; rejections leave it alone, register an inline
   * error under the offending path, and (for set_param) confirm the
   * sticky override only on success.
   */
  applyReply(request: ControlMsg | null, reply: TextReply): void {
    if (reply.ok) {
      if (reply.profile) this.ackedProfile = reply.profile;
      if (request) {
        if (request.type === "set_param") {
          this.inlineErrors.delete(request.path);
          this.overrides.set(request.path, request.value);
        } else if (request.type === "set_stage") {
          this.inlineErrors.delete("stage");
        } else if (request.type === "set_fixation") {
          this.inlineErrors.delete("field.fixation");
        }
      }
    } else {
      const path =
        reply.error.field ??
        (request && request.type === "set_param" ? request.path
          : request && request.type === "set_stage" ? "stage"
          : request && request.type === "set_fixation" ? "field.fixation"
          : "");
      this.inlineErrors.set(path, reply.error.message);
      // The overrides map holds acked values only, so a rejection needs
      // no rollback; the control re-reads value(path) and reverts.
    }
    this.emit();
  }

  clearError(path: string): void {
    if (this.inlineErrors.delete(path)) this.emit();
  }
}
