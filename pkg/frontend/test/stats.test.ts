import { describe, expect, it } from "vitest";

import { RollingLatency } from "../src/stats";

describe("RollingLatency", () => {
  it("starts empty", () => {
    const lat = new RollingLatency();
    expect(lat.count).toBe(0);
    expect(lat.last).toBeNull();
    expect(lat.mean).toBeNull();
    expect(lat.median).toBeNull();
  });

  it("tracks last, mean and median", () => {
    const lat = new RollingLatency();
    for (const v of [10, 30, 20]) lat.push(v);
    expect(lat.last).toBe(20);
    expect(lat.mean).toBe(20);
    expect(lat.median).toBe(20);
    lat.push(40);
    expect(lat.median).toBe(25); // even count: mean of the middle two
  });

  it("keeps only the most recent window entries", () => {
    const lat = new RollingLatency(30);
    for (let i = 0; i < 100; i++) lat.push(i);
    expect(lat.count).toBe(30);
    expect(lat.last).toBe(99);
    expect(lat.median).toBe((84 + 85) / 2); // samples 70..99
  });
});
