/**
 * Dashboard entry point: one 1 s rendering loop polling the documented
 * endpoints (state, metrics, events, engine settings), plus form handlers
 * that post steering and settings changes. Fetch failures show a
 * connection banner and leave the last rendered state on screen.
 */

import {
  ApiError,
  deriveOrchestratorBase,
  SandboxClient,
  USER_CLASSES,
  type EngineSettings,
  type ScaleEvent,
  type UserClass,
  type WorldState,
} from "./api.js";
import { buildChart, renderChart, type Annotation, type ChartSeries } from "./charts.js";
import { parseCount, parseEngineForm, setOptions, type EngineFormFields } from "./controls.js";
import { buildMapModel, renderMap, CLASS_COLORS } from "./mapview.js";
import { parseMetrics } from "./metrics.js";
import { InflightGate, Poller } from "./poller.js";
import { mergeEvents, RollingSeries, stepSeries } from "./series.js";

const SERIES_CAPACITY = 1200;
const EVENT_FEED_LIMIT = 14;

function must<T extends Element>(doc: Document, id: string): T {
  const node = doc.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as unknown as T;
}

export class Dashboard {
  private readonly gate = new InflightGate();
  private readonly poller: Poller;

  private rawSeries = new RollingSeries(SERIES_CAPACITY);
  private avgSeries = new RollingSeries(SERIES_CAPACITY);
  private readySeries = new RollingSeries(SERIES_CAPACITY);
  private events: ScaleEvent[] = [];
  private lastEventTs: number | undefined;
  private settings: EngineSettings | undefined;
  private lastState: WorldState | undefined;
  private lastSimTime = 0;
  private cycleFailed = false;

  constructor(
    private readonly doc: Document,
    private readonly client: SandboxClient,
    pollMs = 1000,
  ) {
    this.poller = new Poller(pollMs, () => void this.cycle());
    this.wireForms();
  }

  start(): void {
    this.poller.start();
  }

  stop(): void {
    this.poller.stop();
  }

  // -- polling -----------------------------------------------------

  private async cycle(): Promise<void> {
    this.cycleFailed = false;
    await Promise.all([
      this.gate.run("settings", () => this.pollSettings()).catch((e) => this.onFetchError(e)),
      this.gate.run("state", () => this.pollState()).catch((e) => this.onFetchError(e)),
      this.gate.run("metrics", () => this.pollMetrics()).catch((e) => this.onFetchError(e)),
      this.gate.run("events", () => this.pollEvents()).catch((e) => this.onFetchError(e)),
    ]);
    const banner = must<HTMLElement>(this.doc, "banner");
    banner.hidden = !this.cycleFailed;
  }

  private onFetchError(error: unknown): void {
    this.cycleFailed = true;
    const banner = must<HTMLElement>(this.doc, "banner");
    banner.textContent = `connection lost: ${error instanceof Error ? error.message : String(error)}`;
    banner.hidden = false;
  }

  private async pollSettings(): Promise<void> {
    this.settings = await this.client.engineSettings();
    this.renderSettings();
  }

  private async pollState(): Promise<void> {
    const { body, simTimeS } = await this.client.state();
    this.lastState = body;
    if (Number.isFinite(simTimeS)) this.lastSimTime = Math.max(this.lastSimTime, simTimeS);
    this.renderState();
  }

  private async pollMetrics(): Promise<void> {
    const { body, simTimeS } = await this.client.metricsText();
    if (Number.isFinite(simTimeS)) this.lastSimTime = Math.max(this.lastSimTime, simTimeS);
    const metrics = parseMetrics(body);
    const zone = this.settings?.monitored_zone;
    const sampleTime = metrics.value("de_last_poll_sim_time_s");
    if (zone !== undefined && sampleTime !== undefined) {
      const raw = metrics.value("de_zone_users", { zone });
      const avg = metrics.value("de_avg_users", { zone });
      if (raw !== undefined) this.rawSeries.push(sampleTime, raw);
      if (avg !== undefined) this.avgSeries.push(sampleTime, avg);
    }
    const ready = metrics.value("de_replicas_ready");
    if (ready !== undefined && Number.isFinite(simTimeS)) this.readySeries.push(simTimeS, ready);
    this.renderCharts(metrics.value("de_replicas_desired"));
  }

  private async pollEvents(): Promise<void> {
    const incoming = await this.client.events(this.lastEventTs);
    if (incoming.length === 0) return;
    this.events = mergeEvents(this.events, incoming);
    this.lastEventTs = this.events[this.events.length - 1].timestamp;
    this.renderEventFeed();
  }

  // -- rendering ---------------------------------------------------

  private renderState(): void {
    const state = this.lastState;
    if (!state) return;
    must<HTMLElement>(this.doc, "total-users").textContent = `${state.users.length} / ${state.maxUsers}`;
    must<HTMLElement>(this.doc, "sim-time").textContent = `t = ${state.timestamp.toFixed(1)} s (tick ${state.tick})`;
    must<HTMLElement>(this.doc, "scenario-name").textContent = state.scenario;
    setOptions(must<HTMLSelectElement>(this.doc, "scenario-select"), state.scenarios);
    setOptions(must<HTMLSelectElement>(this.doc, "remove-select"), state.users.map((u) => u.address));
    setOptions(must<HTMLSelectElement>(this.doc, "cfg-zone"), state.zones.map((z) => z.zoneId));
    const monitored = this.settings?.monitored_zone ?? "";
    renderMap(must<SVGSVGElement>(this.doc, "map-svg"), buildMapModel(state, monitored));
  }

  private renderSettings(): void {
    const s = this.settings;
    if (!s) return;
    const set = (id: string, value: string) => {
      const input = must<HTMLInputElement>(this.doc, id);
      if (this.doc.activeElement !== input) input.value = value;
    };
    set("cfg-gamma", String(s.gamma));
    set("cfg-poll", String(s.poll_period_s));
    set("cfg-window", String(s.window_size));
    set("cfg-cooldown", String(s.cooldown_s));
    set("cfg-min", String(s.min_replicas));
    set("cfg-max", String(s.max_replicas));
    const zoneSelect = must<HTMLSelectElement>(this.doc, "cfg-zone");
    if (this.doc.activeElement !== zoneSelect && zoneSelect.querySelector(`option[value="${s.monitored_zone}"]`)) {
      zoneSelect.value = s.monitored_zone;
    }
    must<HTMLElement>(this.doc, "target-label").textContent = `${s.target_namespace}/${s.target_deployment}`;
  }

  private renderCharts(desiredFallback: number | undefined): void {
    const occupancy: ChartSeries[] = [
      { label: "zone users", color: "#59a14f", segments: this.rawSeries.segments() },
      { label: "window avg", color: "#4e79a7", segments: this.avgSeries.segments() },
    ];
    renderChart(
      must<SVGSVGElement>(this.doc, "occupancy-chart"),
      buildChart(occupancy, [], 640, 220, { yMin: 0, xLabel: "sim time (s)", yLabel: "users" }),
    );

    const tEnd = this.lastSimTime;
    const fallback = desiredFallback ?? 1;
    const desiredSegments =
      this.events.length > 0 || this.readySeries.size() > 0 || desiredFallback !== undefined
        ? [stepSeries(this.events, fallback, Math.min(tEnd, this.events[0]?.timestamp ?? tEnd), tEnd)]
        : [];
    const replicas: ChartSeries[] = [
      { label: "desired", color: "#e15759", step: true, segments: desiredSegments },
      { label: "ready", color: "#76b7b2", step: true, segments: this.readySeries.segments() },
    ];
    const annotations: Annotation[] = this.events.map((e) => ({
      x: e.timestamp,
      label: `${e.deployment} ${e.from_replicas}->${e.to_replicas} (${e.reason})`,
    }));
    renderChart(
      must<SVGSVGElement>(this.doc, "replica-chart"),
      buildChart(replicas, annotations, 640, 200, { yMin: 0, xLabel: "sim time (s)", yLabel: "replicas" }),
    );
  }

  private renderEventFeed(): void {
    const feed = must<HTMLOListElement>(this.doc, "event-feed");
    feed.replaceChildren();
    for (const e of [...this.events].reverse().slice(0, EVENT_FEED_LIMIT)) {
      const item = this.doc.createElement("li");
      item.textContent = `t=${e.timestamp}s ${e.deployment}: ${e.from_replicas} -> ${e.to_replicas} (${e.reason})`;
      feed.appendChild(item);
    }
  }

  private showStatus(text: string, isError: boolean): void {
    const status = must<HTMLElement>(this.doc, "status-line");
    status.textContent = text;
    status.classList.toggle("error", isError);
  }

  // -- forms ---------------------------------------------------------

  private async submitSteer(command: Parameters<SandboxClient["steer"]>[0], label: string): Promise<void> {
    try {
      const ack = await this.client.steer(command);
      const cap = this.lastState?.maxUsers;
      must<HTMLElement>(this.doc, "total-users").textContent = `${ack.totalUsers}${cap !== undefined ? ` / ${cap}` : ""}`;
      this.showStatus(`${label}: ok, ${ack.totalUsers} users`, false);
    } catch (error) {
      // rejection text straight from the server, local state untouched
      this.showStatus(error instanceof ApiError ? error.message : String(error), true);
    }
  }

  private wireForms(): void {
    for (const cls of USER_CLASSES) {
      must<HTMLButtonElement>(this.doc, `add-${cls}`).addEventListener("click", () => {
        void this.submitSteer({ action: "addUser", userClass: cls }, `add ${cls}`);
      });
      must<HTMLButtonElement>(this.doc, `set-${cls}`).addEventListener("click", () => {
        const raw = must<HTMLInputElement>(this.doc, `count-${cls}`).value;
        const parsed = parseCount(raw, this.lastState?.maxUsers ?? Number.MAX_SAFE_INTEGER);
        if (!parsed.ok) {
          this.showStatus(parsed.error, true);
          return;
        }
        void this.submitSteer({ action: "setUserCount", userClass: cls as UserClass, count: parsed.value }, `set ${cls}`);
      });
    }
    must<HTMLButtonElement>(this.doc, "remove-user").addEventListener("click", () => {
      const address = must<HTMLSelectElement>(this.doc, "remove-select").value;
      if (!address) {
        this.showStatus("no user selected", true);
        return;
      }
      void this.submitSteer({ action: "removeUser", address }, `remove ${address}`);
    });
    must<HTMLButtonElement>(this.doc, "load-scenario").addEventListener("click", () => {
      const name = must<HTMLSelectElement>(this.doc, "scenario-select").value;
      void this.submitSteer({ action: "loadScenario", name }, `load ${name}`);
    });
    must<HTMLButtonElement>(this.doc, "apply-config").addEventListener("click", () => {
      void this.applySettings();
    });
  }

  private async applySettings(): Promise<void> {
    const fields: EngineFormFields = {
      gamma: must<HTMLInputElement>(this.doc, "cfg-gamma").value,
      poll_period_s: must<HTMLInputElement>(this.doc, "cfg-poll").value,
      window_size: must<HTMLInputElement>(this.doc, "cfg-window").value,
      cooldown_s: must<HTMLInputElement>(this.doc, "cfg-cooldown").value,
      min_replicas: must<HTMLInputElement>(this.doc, "cfg-min").value,
      max_replicas: must<HTMLInputElement>(this.doc, "cfg-max").value,
      monitored_zone: must<HTMLSelectElement>(this.doc, "cfg-zone").value,
    };
    const parsed = parseEngineForm(fields);
    if (!parsed.ok) {
      this.showStatus(parsed.error, true);
      return;
    }
    try {
      this.settings = await this.client.patchEngineSettings(parsed.value);
      this.renderSettings();
      this.showStatus(`settings applied (gamma=${this.settings.gamma})`, false);
    } catch (error) {
      this.showStatus(error instanceof ApiError ? error.message : String(error), true);
    }
  }
}

export function renderLegend(doc: Document): void {
  const legend = must<HTMLElement>(doc, "legend");
  legend.replaceChildren();
  for (const cls of USER_CLASSES) {
    const chip = doc.createElement("span");
    chip.className = "chip";
    const swatch = doc.createElement("i");
    swatch.style.background = CLASS_COLORS[cls];
    chip.append(swatch, ` ${cls.replace("_", " ")}`);
    legend.appendChild(chip);
  }
}

export function startDashboard(win: Window & typeof globalThis): Dashboard {
  const params = new URLSearchParams(win.location.search);
  const sandboxBase = params.get("sandbox") ?? win.location.origin;
  const orchestratorBase = params.get("orchestrator") ?? deriveOrchestratorBase(win.location);
  const client = new SandboxClient(sandboxBase, orchestratorBase);
  const dashboard = new Dashboard(win.document, client);
  renderLegend(win.document);
  dashboard.start();
  return dashboard;
}

declare global {
  interface Window {
    edgescaleDashboard?: Dashboard;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("map-svg")) {
  window.edgescaleDashboard = startDashboard(window);
}
