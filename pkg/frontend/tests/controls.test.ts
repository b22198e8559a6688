import { describe, expect, it } from "vitest";

import { parseCount, parseEngineForm, type EngineFormFields } from "../src/controls.js";
import { InflightGate } from "../src/poller.js";

describe("parseCount", () => {
  it("accepts integers within the cap", () => {
    expect(parseCount("0", 12)).toEqual({ ok: true, value: 0 });
    expect(parseCount("12", 12)).toEqual({ ok: true, value: 12 });
  });

  it("rejects non-integers, negatives and over-cap values", () => {
    expect(parseCount("1.5", 12).ok).toBe(false);
    expect(parseCount("abc", 12).ok).toBe(false);
    expect(parseCount("-1", 12).ok).toBe(false);
    const over = parseCount("13", 12);
    expect(over.ok).toBe(false);
    if (!over.ok) expect(over.error).toContain("12");
  });
});

describe("parseEngineForm", () => {
  const good: EngineFormFields = {
    gamma: "3",
    poll_period_s: "5",
    window_size: "6",
    cooldown_s: "0",
    min_replicas: "1",
    max_replicas: "2",
    monitored_zone: "zone3",
  };

  it("parses a complete valid form", () => {
    const result = parseEngineForm(good);
    expect(result).toEqual({
      ok: true,
      value: {
        gamma: 3,
        poll_period_s: 5,
        window_size: 6,
        cooldown_s: 0,
        min_replicas: 1,
        max_replicas: 2,
        monitored_zone: "zone3",
      },
    });
  });

  it.each([
    ["gamma", "0"],
    ["gamma", "nope"],
    ["poll_period_s", "-1"],
    ["window_size", "0"],
    ["window_size", "2.5"],
    ["cooldown_s", "-3"],
    ["min_replicas", "0"],
    ["max_replicas", "0"],
    ["monitored_zone", ""],
  ] as const)("rejects bad %s=%s", (field, value) => {
    const result = parseEngineForm({ ...good, [field]: value });
    expect(result.ok).toBe(false);
  });

  it("rejects max below min", () => {
    const result = parseEngineForm({ ...good, min_replicas: "3", max_replicas: "2" });
    expect(result.ok).toBe(false);
    if (!result.ok) expect(result.error).toContain(">= min");
  });
});

describe("InflightGate", () => {
  it("skips a key while a call is pending and releases it after", async () => {
    const gate = new InflightGate();
    let release!: () => void;
    const blocked = new Promise<void>((resolve) => {
      release = resolve;
    });
    let runs = 0;
    const first = gate.run("state", async () => {
      runs += 1;
      await blocked;
      return "first";
    });
    const second = await gate.run("state", async () => {
      runs += 1;
      return "second";
    });
    expect(second).toBeUndefined();
    expect(gate.inFlight("state")).toBe(true);
    release();
    expect(await first).toBe("first");
    expect(gate.inFlight("state")).toBe(false);
    const third = await gate.run("state", async () => "third");
    expect(third).toBe("third");
    expect(runs).toBe(1); // the overlapping second call never ran
  });

  it("treats different keys independently", async () => {
    const gate = new InflightGate();
    const results = await Promise.all([
      gate.run("a", async () => 1),
      gate.run("b", async () => 2),
    ]);
    expect(results).toEqual([1, 2]);
  });

  it("releases the key when the call throws", async () => {
    const gate = new InflightGate();
    await expect(gate.run("x", async () => {
      throw new Error("boom");
    })).rejects.toThrow("boom");
    expect(gate.inFlight("x")).toBe(false);
  });
});
