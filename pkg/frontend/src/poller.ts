/**
 * Single rendering loop plumbing: a fixed-period ticker and a per-key
 * in-flight gate so a slow endpoint is never fetched twice concurrently;
 * the next cycle simply skips it.
 */

export class InflightGate {
  private active = new Set<string>();

  inFlight(key: string): boolean {
    return this.active.has(key);
  }

  /** Runs fn unless a call under the same key is still pending. */
  async run<T>(key: string, fn: () => Promise<T>): Promise<T | undefined> {
    if (this.active.has(key)) return undefined;
    this.active.add(key);
    try {
      return await fn();
    } finally {
      this.active.delete(key);
    }
  }
}

export class Poller {
  private timer: ReturnType<typeof setInterval> | undefined;

  constructor(
    private readonly periodMs: number,
    private readonly tickFn: () => void,
  ) {}

  start(): void {
    if (this.timer !== undefined) return;
    this.tickFn();
    this.timer = setInterval(this.tickFn, this.periodMs);
  }

  stop(): void {
    if (this.timer === undefined) return;
    clearInterval(this.timer);
    this.timer = undefined;
  }
}
