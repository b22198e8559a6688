import { describe, expect, it } from "vitest";

import type { WorldState } from "../src/api.js";
import { buildMapModel, fitTransform, toPixel } from "../src/mapview.js";

function worldState(users: WorldState["users"]): WorldState {
  return {
    scenario: "grid",
    tick: 3,
    timestamp: 3.0,
    map: { width_m: 1000, height_m: 1000 },
    maxUsers: 12,
    totalUsers: users.length,
    zones: [
      { zoneId: "zone1", accessPoints: [{ apId: "ap1", x_m: 250, y_m: 250, radius_m: 400, tech: "4g" }] },
      { zoneId: "zone3", accessPoints: [{ apId: "ap3", x_m: 250, y_m: 750, radius_m: 400, tech: "wifi" }] },
    ],
    users,
    scenarios: ["grid"],
  };
}

function user(address: string, x: number, y: number, zone: string | null): WorldState["users"][number] {
  return {
    address,
    userClass: "low_velocity",
    x_m: x,
    y_m: y,
    accessPointId: zone === null ? null : "ap1",
    zoneId: zone,
  };
}

describe("fitTransform / toPixel", () => {
  it("maps meters to pixels linearly with a uniform scale", () => {
    const t = fitTransform(1000, 1000, 560, 560, 14);
    expect(toPixel(t, 0, 0)).toEqual({ x: 14, y: 14 });
    expect(toPixel(t, 1000, 1000)).toEqual({ x: 546, y: 546 });
    const mid = toPixel(t, 500, 500);
    expect(mid.x).toBeCloseTo((14 + 546) / 2, 9);
    expect(mid.y).toBeCloseTo((14 + 546) / 2, 9);
  });

  it("preserves aspect for non-square maps", () => {
    const t = fitTransform(2000, 1000, 560, 560, 10);
    const corner = toPixel(t, 2000, 1000);
    expect(corner.x).toBeCloseTo(550, 9);
    expect(corner.y).toBeCloseTo(10 + 1000 * t.scale, 9);
  });
});

describe("buildMapModel", () => {
  it("renders exactly one marker per snapshot user", () => {
    const state = worldState([
      user("ue-001", 100, 100, "zone1"),
      user("ue-002", 300, 700, "zone3"),
      user("ue-003", 999, 999, null),
    ]);
    const model = buildMapModel(state, "zone3");
    expect(model.markers).toHaveLength(3);
    expect(model.markers.map((m) => m.address)).toEqual(["ue-001", "ue-002", "ue-003"]);
  });

  it("still draws zones and access points with zero users", () => {
    const model = buildMapModel(worldState([]), "zone3");
    expect(model.markers).toHaveLength(0);
    expect(model.aps).toHaveLength(2);
    expect(model.zoneIds).toEqual(["zone1", "zone3"]);
  });

  it("flags the monitored zone and in-zone markers", () => {
    const state = worldState([user("ue-001", 260, 740, "zone3"), user("ue-002", 100, 100, "zone1")]);
    const model = buildMapModel(state, "zone3");
    const monitoredAps = model.aps.filter((a) => a.monitored).map((a) => a.apId);
    expect(monitoredAps).toEqual(["ap3"]);
    expect(model.markers[0].inMonitoredZone).toBe(true);
    expect(model.markers[1].inMonitoredZone).toBe(false);
  });

  it("marks uncovered users as unassociated", () => {
    const model = buildMapModel(worldState([user("ue-009", 5, 5, null)]), "zone3");
    expect(model.markers[0].associated).toBe(false);
  });

  it("scales coverage radii with the same transform as positions", () => {
    const state = worldState([]);
    const model = buildMapModel(state, "zone3", 560, 560);
    const t = fitTransform(1000, 1000, 560, 560);
    expect(model.aps[0].r).toBeCloseTo(400 * t.scale, 9);
    expect(model.aps[0].cx).toBeCloseTo(toPixel(t, 250, 250).x, 9);
  });
});
