/**
 * Typed client for the sandbox and orchestrator HTTP APIs.
 *
 * The dashboard is a pure client: every read and every state change goes
 * through the methods below, nothing else. Non-2xx responses raise
 * ApiError carrying the server's error text verbatim so forms can show it
 * unedited. Each response also carries the simulation clock in the
 * X-Sim-Time-S header; readers get it back as `simTimeS`.
 */

export type UserClass = "stationary" | "low_velocity" | "high_velocity";

export const USER_CLASSES: readonly UserClass[] = ["stationary", "low_velocity", "high_velocity"];

export interface ZoneInfo {
  zoneId: string;
  numberOfAccessPoints: number;
  numberOfUsers: number;
}

export interface AccessPointView {
  apId: string;
  x_m: number;
  y_m: number;
  radius_m: number;
  tech: string;
}

export interface ZoneView {
  zoneId: string;
  accessPoints: AccessPointView[];
}

export interface UserView {
  address: string;
  userClass: UserClass;
  x_m: number;
  y_m: number;
  accessPointId: string | null;
  zoneId: string | null;
}

export interface WorldState {
  scenario: string;
  tick: number;
  timestamp: number;
  map: { width_m: number; height_m: number };
  maxUsers: number;
  totalUsers: number;
  zones: ZoneView[];
  users: UserView[];
  scenarios: string[];
}

export interface ScaleEvent {
  timestamp: number;
  deployment: string;
  from_replicas: number;
  to_replicas: number;
  reason: string;
}

export interface EngineSettings {
  monitored_zone: string;
  poll_period_s: number;
  window_size: number;
  gamma: number;
  min_replicas: number;
  max_replicas: number;
  cooldown_s: number;
  target_namespace: string;
  target_deployment: string;
}

export type SteerCommand =
  | { action: "addUser"; userClass: UserClass }
  | { action: "removeUser"; address: string }
  | { action: "setUserCount"; userClass: UserClass; count: number }
  | { action: "loadScenario"; name: string };

export interface Stamped<T> {
  body: T;
  simTimeS: number;
}

export const SIM_TIME_HEADER = "X-Sim-Time-S";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class SandboxClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly sandboxBase: string,
    readonly orchestratorBase: string,
    fetchFn?: FetchLike,
  ) {
    // bind lazily so a bare global `fetch` keeps its expected receiver
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request(base: string, path: string, init?: RequestInit): Promise<{ resp: Response; simTimeS: number }> {
    const resp = await this.fetchFn(base + path, init);
    const simTimeS = Number.parseFloat(resp.headers.get(SIM_TIME_HEADER) ?? "NaN");
    if (!resp.ok) {
      let message = `${resp.status} ${resp.statusText}`;
      try {
        const body = (await resp.json()) as { error?: unknown };
        if (body && typeof body.error === "string") message = body.error;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(resp.status, message);
    }
    return { resp, simTimeS };
  }

  private async getJson<T>(base: string, path: string): Promise<Stamped<T>> {
    const { resp, simTimeS } = await this.request(base, path);
    return { body: (await resp.json()) as T, simTimeS };
  }

  private jsonInit(method: string, payload: unknown): RequestInit {
    return {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    };
  }

  state(): Promise<Stamped<WorldState>> {
    return this.getJson(this.sandboxBase, "/sandbox/v1/state");
  }

  async zones(): Promise<Stamped<ZoneInfo[]>> {
    const r = await this.getJson<{ zoneList: ZoneInfo[] }>(this.sandboxBase, "/location/v2/queries/zones");
    return { body: r.body.zoneList, simTimeS: r.simTimeS };
  }

  async steer(command: SteerCommand): Promise<{ totalUsers: number }> {
    const { resp } = await this.request(this.sandboxBase, "/sandbox/v1/steer", this.jsonInit("POST", command));
    return (await resp.json()) as { totalUsers: number };
  }

  async engineSettings(): Promise<EngineSettings> {
    return (await this.getJson<EngineSettings>(this.sandboxBase, "/config")).body;
  }

  async patchEngineSettings(patch: Partial<EngineSettings>): Promise<EngineSettings> {
    const { resp } = await this.request(this.sandboxBase, "/config", this.jsonInit("PATCH", patch));
    return (await resp.json()) as EngineSettings;
  }

  async metricsText(): Promise<Stamped<string>> {
    const { resp, simTimeS } = await this.request(this.sandboxBase, "/metrics");
    return { body: await resp.text(), simTimeS };
  }

  async events(since?: number): Promise<ScaleEvent[]> {
    const qs = since === undefined ? "" : `?since=${encodeURIComponent(String(since))}`;
    const r = await this.getJson<{ events: ScaleEvent[] }>(this.orchestratorBase, `/events${qs}`);
    return r.body.events;
  }

  async scaleStatus(namespace: string, name: string): Promise<{ spec: { replicas: number }; status: { replicas: number } }> {
    const path = `/apis/apps/v1/namespaces/${encodeURIComponent(namespace)}/deployments/${encodeURIComponent(name)}/scale`;
    return (await this.getJson<{ spec: { replicas: number }; status: { replicas: number } }>(this.orchestratorBase, path)).body;
  }
}

/**
 * Default orchestrator base when none is given: same host, next port up.
 * The shipped config binds the sandbox API on :8091 and the orchestrator
 * on :8092, so a dashboard served by the sandbox listener lands right.
 * Override with `?orchestrator=http://host:port` when running elsewhere.
 */
export function deriveOrchestratorBase(loc: { protocol: string; hostname: string; port: string }): string {
  const port = Number(loc.port || (loc.protocol === "https:" ? "443" : "80"));
  return `${loc.protocol}//${loc.hostname}:${port + 1}`;
}
