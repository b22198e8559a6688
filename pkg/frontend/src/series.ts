/**
 * Time-series bookkeeping for the charts: a rolling buffer that renders
 * poll failures as gaps, plus the step series derived from the scale-event
 * journal. Step x positions are event timestamps verbatim; nothing rounds
 * or re-buckets them.
 */

import type { ScaleEvent } from "./api.js";

export interface Point {
  x: number;
  y: number;
}

interface StoredPoint extends Point {
  gapBefore: boolean;
}

export class RollingSeries {
  private points: StoredPoint[] = [];
  private pendingGap = false;

  constructor(readonly capacity: number) {}

  /** Ignores non-advancing x so one sim sample is stored once. */
  push(x: number, y: number): void {
    const last = this.points[this.points.length - 1];
    if (last !== undefined && x <= last.x) return;
    this.points.push({ x, y, gapBefore: this.pendingGap });
    this.pendingGap = false;
    if (this.points.length > this.capacity) this.points.shift();
  }

  /** Next pushed point starts a new segment (no line across the failure). */
  markGap(): void {
    if (this.points.length > 0) this.pendingGap = true;
  }

  lastX(): number | undefined {
    return this.points[this.points.length - 1]?.x;
  }

  size(): number {
    return this.points.length;
  }

  segments(): Point[][] {
    const out: Point[][] = [];
    let current: Point[] = [];
    for (const p of this.points) {
      if (p.gapBefore && current.length > 0) {
        out.push(current);
        current = [];
      }
      current.push({ x: p.x, y: p.y });
    }
    if (current.length > 0) out.push(current);
    return out;
  }
}

/** Merges an incremental /events fetch into the accumulated journal. */
export function mergeEvents(existing: ScaleEvent[], incoming: ScaleEvent[]): ScaleEvent[] {
  const byKey = new Map<string, ScaleEvent>();
  for (const e of [...existing, ...incoming]) {
    byKey.set(`${e.timestamp}:${e.from_replicas}:${e.to_replicas}`, e);
  }
  return [...byKey.values()].sort((a, b) => a.timestamp - b.timestamp);
}

/**
 * Step polyline for the replica chart. The level before the first event is
 * the event's own from_replicas (or fallbackLevel on an empty journal);
 * each event contributes a vertical edge at exactly its timestamp.
 */
export function stepSeries(events: ScaleEvent[], fallbackLevel: number, tStart: number, tEnd: number): Point[] {
  let level = events.length > 0 ? events[0].from_replicas : fallbackLevel;
  let x0 = tStart;
  if (events.length > 0) x0 = Math.min(x0, events[0].timestamp);
  const points: Point[] = [{ x: x0, y: level }];
  for (const e of events) {
    points.push({ x: e.timestamp, y: level });
    level = e.to_replicas;
    points.push({ x: e.timestamp, y: level });
  }
  points.push({ x: Math.max(tEnd, points[points.length - 1].x), y: level });
  return points;
}

/** The x positions where the step series jumps: event timestamps, verbatim. */
export function stepTimestamps(events: ScaleEvent[]): number[] {
  return events.map((e) => e.timestamp);
}
