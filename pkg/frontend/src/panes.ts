/**
 * Pairs each server reply with the original frame it was computed from,
 * so the side-by-side panes always show the same moment: the left pane
 * is not the live camera but the original with the reply's frame_id.
 * Originals are retained until their reply, error, or drop arrives,
 * with a small cap as a safety net against leaks.
 */

export class PaneMatcher<T> {
  private originals = new Map<bigint, T>();

  constructor(private readonly cap = 16) {}

  remember(frameId: bigint, original: T): void {
    this.originals.set(frameId, original);
    if (this.originals.size > this.cap) {
      const oldest = this.originals.keys().next().value as bigint;
      this.originals.delete(oldest);
    }
  }

  /** The original for a reply; consumed, along with anything older. */
  take(frameId: bigint): T | undefined {
    const hit = this.originals.get(frameId);
    if (hit === undefined) return undefined;
    for (const id of [...this.originals.keys()]) {
      if (id <= frameId) this.originals.delete(id);
    }
    return hit;
  }

  forget(frameId: bigint): void {
    this.originals.delete(frameId);
  }

  get size(): number {
    return this.originals.size;
  }
}
