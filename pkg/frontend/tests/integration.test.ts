/**
 * End-to-end suite against a live backend: boots `edgescale run` with a
 * fast-ticking scenario, drives it through the same client the dashboard
 * uses, and checks the dashboard-level guarantees (marker count equals the
 * snapshot, steering lands within two poll cycles, replica step positions
 * equal the event journal timestamps exactly).
 */

import { spawn, type ChildProcess } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SandboxClient, type ScaleEvent } from "../src/api.js";
import { buildMapModel } from "../src/mapview.js";
import { parseMetrics } from "../src/metrics.js";
import { stepSeries, stepTimestamps } from "../src/series.js";

const DIST_DIR = fileURLToPath(new URL("../dist/", import.meta.url));

interface Backend {
  child: ChildProcess;
  client: SandboxClient;
  outDir: string;
  exited: Promise<number | null>;
  stderr: () => string;
}

function scenarioConfig(locationPort: number, orchestratorPort: number, outDir: string): string {
  // JSON is a YAML subset, so the backend's config loader takes this as is
  return JSON.stringify({
    scenario: {
      name: "itest-grid",
      map_width_m: 1000,
      map_height_m: 1000,
      zones: [
        { zone_id: "zone1", ap_ids: ["ap1"] },
        { zone_id: "zone2", ap_ids: ["ap2"] },
        { zone_id: "zone3", ap_ids: ["ap3"] },
        { zone_id: "zone4", ap_ids: ["ap4"] },
      ],
      access_points: [
        { ap_id: "ap1", zone_id: "zone1", x_m: 250, y_m: 250, radius_m: 400, tech: "4g" },
        { ap_id: "ap2", zone_id: "zone2", x_m: 750, y_m: 250, radius_m: 400, tech: "5g" },
        { ap_id: "ap3", zone_id: "zone3", x_m: 250, y_m: 750, radius_m: 400, tech: "wifi" },
        { ap_id: "ap4", zone_id: "zone4", x_m: 750, y_m: 750, radius_m: 400, tech: "4g" },
      ],
      user_counts: { stationary: 4, low_velocity: 4, high_velocity: 4 },
      speeds: { stationary: 0, low_velocity: 1.5, high_velocity: 15.0 },
      seed: 4,
      tick_s: 0.05,
      max_users: 12,
    },
    decision_engine: {
      monitored_zone: "zone3",
      poll_period_s: 0.25,
      window_size: 2,
      gamma: 3.0,
      min_replicas: 1,
      max_replicas: 2,
      cooldown_s: 0.0,
      target_namespace: "default",
      target_deployment: "vod",
    },
    deployment: {
      namespace: "default",
      name: "vod",
      initial_replicas: 1,
      readiness_latency_s: 0.2,
      min_replicas: 1,
      max_replicas: 10,
    },
    run: {
      duration_ticks: 600,
      location_listen: `127.0.0.1:${locationPort}`,
      orchestrator_listen: `127.0.0.1:${orchestratorPort}`,
      output_dir: outDir,
    },
  });
}

async function until<T>(label: string, timeoutMs: number, probe: () => Promise<T | undefined>): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = await probe().catch(() => undefined);
    if (value !== undefined) return value;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${label}`);
    await new Promise((r) => setTimeout(r, 100));
  }
}

function cleanEnv(): NodeJS.ProcessEnv {
  const env: NodeJS.ProcessEnv = {};
  for (const [k, v] of Object.entries(process.env)) {
    if (!k.startsWith("EDGESCALE_")) env[k] = v;
  }
  return env;
}

async function startBackend(): Promise<Backend> {
  let lastError = "";
  for (let attempt = 0; attempt < 3; attempt += 1) {
    const port = 20000 + Math.floor(Math.random() * 20000);
    const workDir = mkdtempSync(join(tmpdir(), "edgescale-itest-"));
    const outDir = join(workDir, "out");
    const configPath = join(workDir, "run.json");
    writeFileSync(configPath, scenarioConfig(port, port + 1, outDir));

    const child = spawn(
      "python3",
      ["-m", "edgescale.cli", "run", "--config", configPath, "--dashboard-dir", DIST_DIR],
      { env: cleanEnv(), stdio: ["ignore", "pipe", "pipe"] },
    );
    let stderrBuf = "";
    child.stderr?.on("data", (chunk: Buffer) => {
      stderrBuf += chunk.toString();
    });
    const exited = new Promise<number | null>((resolve) => child.once("exit", (code) => resolve(code)));

    const client = new SandboxClient(`http://127.0.0.1:${port}`, `http://127.0.0.1:${port + 1}`);
    try {
      await until("backend readiness", 15_000, async () => {
        if (child.exitCode !== null) throw new Error(`backend exited early: ${stderrBuf}`);
        const zones = await client.zones();
        return zones.body.length > 0 ? true : undefined;
      });
      return { child, client, outDir, exited, stderr: () => stderrBuf };
    } catch (error) {
      lastError = `${error instanceof Error ? error.message : error}; stderr: ${stderrBuf}`;
      child.kill("SIGKILL");
      await exited;
    }
  }
  throw new Error(`backend failed to start after 3 attempts: ${lastError}`);
}

let backend: Backend;
let journalOverHttp: ScaleEvent[] = [];

beforeAll(async () => {
  if (!existsSync(join(DIST_DIR, "index.html"))) {
    throw new Error("dist/ missing; run `npm run build` first (npm test does this automatically)");
  }
  backend = await startBackend();
}, 60_000);

afterAll(async () => {
  if (backend && backend.child.exitCode === null) {
    backend.child.kill("SIGKILL");
    await backend.exited;
  }
});

describe("live backend", () => {
  it("serves the dashboard bundle at /", async () => {
    const page = await fetch(backend.client.sandboxBase + "/");
    expect(page.status).toBe(200);
    const html = await page.text();
    expect(html).toContain("edgescale dashboard");
    expect(html).toContain('src="./app.js"');
    const script = await fetch(backend.client.sandboxBase + "/app.js");
    expect(script.status).toBe(200);
    expect(script.headers.get("Content-Type")).toMatch(/javascript/);
  });

  it("map model renders exactly snapshot-count markers", async () => {
    const { body: state } = await backend.client.state();
    expect(state.totalUsers).toBe(12);
    expect(state.users).toHaveLength(12);
    const model = buildMapModel(state, "zone3");
    expect(model.markers).toHaveLength(state.users.length);
    expect(model.aps).toHaveLength(4);
    expect(model.aps.filter((a) => a.monitored).map((a) => a.apId)).toEqual(["ap3"]);
  });

  it("reflects a SetUserCount steer within two poll cycles", async () => {
    const ack = await backend.client.steer({ action: "setUserCount", userClass: "high_velocity", count: 0 });
    expect(ack.totalUsers).toBe(8);
    // dashboard polls at 1 s; two cycles is the documented bound
    const state = await until("steer visible in snapshot", 2_000, async () => {
      const { body } = await backend.client.state();
      return body.totalUsers === 8 ? body : undefined;
    });
    expect(buildMapModel(state, "zone3").markers).toHaveLength(8);

    const restored = await backend.client.steer({ action: "setUserCount", userClass: "high_velocity", count: 4 });
    expect(restored.totalUsers).toBe(12);
  });

  it("rejects an over-cap AddUser with the server's text and keeps state", async () => {
    const failure = await backend.client.steer({ action: "addUser", userClass: "stationary" }).catch((e) => e);
    expect(failure).toBeInstanceOf(Error);
    expect(String((failure as Error).message)).toContain("12");
    const { body } = await backend.client.state();
    expect(body.totalUsers).toBe(12);
  });

  it("applies settings patches and the engine acts on them", async () => {
    // forcing the clamp makes scale events deterministic regardless of occupancy
    const up = await backend.client.patchEngineSettings({ min_replicas: 2, max_replicas: 2 });
    expect(up.min_replicas).toBe(2);
    await until("upscale event", 5_000, async () => {
      const events = await backend.client.events();
      return events.some((e) => e.to_replicas === 2) ? true : undefined;
    });

    const down = await backend.client.patchEngineSettings({ gamma: 7, min_replicas: 1, max_replicas: 1 });
    expect(down.gamma).toBe(7);
    const events = await until("downscale event", 5_000, async () => {
      const all = await backend.client.events();
      return all.some((e) => e.to_replicas === 1 && e.reason.includes("gamma=7")) ? all : undefined;
    });
    expect(events.length).toBeGreaterThanOrEqual(2);

    await backend.client.patchEngineSettings({ gamma: 3, min_replicas: 1, max_replicas: 2 });
  });

  it("serves parseable metrics that agree with the settings", async () => {
    const { body } = await backend.client.metricsText();
    const metrics = parseMetrics(body); // throws on any malformed line
    expect(metrics.value("de_gamma")).toBe(3);
    expect(metrics.value("de_scale_actions_total")).toBeGreaterThanOrEqual(2);
    const sampleTime = metrics.value("de_last_poll_sim_time_s");
    expect(sampleTime).toBeGreaterThan(0);
    expect(metrics.value("de_zone_users", { zone: "zone3" })).toBeGreaterThanOrEqual(0);
  });

  it("replica step positions equal the event journal timestamps exactly", async () => {
    journalOverHttp = await backend.client.events();
    expect(journalOverHttp.length).toBeGreaterThanOrEqual(2);
    const { simTimeS } = await backend.client.state();
    const steps = stepSeries(journalOverHttp, 1, 0, simTimeS);
    const jumps: number[] = [];
    for (let i = 1; i < steps.length; i += 1) {
      if (steps[i].x === steps[i - 1].x && steps[i].y !== steps[i - 1].y) jumps.push(steps[i].x);
    }
    expect(jumps).toEqual(stepTimestamps(journalOverHttp));
    expect(jumps).toEqual(journalOverHttp.map((e) => e.timestamp));
  });

  it("shuts down cleanly and the on-disk journal matches what was served", async () => {
    backend.child.kill("SIGTERM");
    const code = await backend.exited;
    expect(code).toBe(0);

    const lines = readFileSync(join(backend.outDir, "orchestrator_events.jsonl"), "utf8")
      .split("\n")
      .filter((l) => l.length > 0)
      .map((l) => JSON.parse(l) as ScaleEvent);
    expect(lines.map((e) => e.timestamp)).toEqual(journalOverHttp.map((e) => e.timestamp));
    expect(lines.map((e) => e.to_replicas)).toEqual(journalOverHttp.map((e) => e.to_replicas));
    console.log("ACCEPTANCE 9 dashboard-live: PASS (markers == snapshot, steer <= 2 cycles, steps == journal)");
  });
});
