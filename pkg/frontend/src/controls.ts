/**
 * Client-side validation for the steering and engine-settings forms.
 *
 * Only shape/bounds checks live here (so obviously bad input never leaves
 * the browser); the backend remains the authority and its rejection text
 * is surfaced verbatim by the caller.
 */

import type { EngineSettings } from "./api.js";

export type ParseResult<T> = { ok: true; value: T } | { ok: false; error: string };

export function parseCount(raw: string, maxUsers: number): ParseResult<number> {
  const value = Number(raw);
  if (!Number.isInteger(value)) return { ok: false, error: `count must be an integer, got ${JSON.stringify(raw)}` };
  if (value < 0) return { ok: false, error: "count must be >= 0" };
  if (value > maxUsers) return { ok: false, error: `count exceeds the ${maxUsers}-user cap` };
  return { ok: true, value };
}

export interface EngineFormFields {
  gamma: string;
  poll_period_s: string;
  window_size: string;
  cooldown_s: string;
  min_replicas: string;
  max_replicas: string;
  monitored_zone: string;
}

export function parseEngineForm(fields: EngineFormFields): ParseResult<Partial<EngineSettings>> {
  const gamma = Number(fields.gamma);
  if (!(gamma > 0)) return { ok: false, error: "gamma must be > 0" };
  const poll = Number(fields.poll_period_s);
  if (!(poll > 0)) return { ok: false, error: "poll period must be > 0" };
  const window = Number(fields.window_size);
  if (!Number.isInteger(window) || window < 1) return { ok: false, error: "window size must be an integer >= 1" };
  const cooldown = Number(fields.cooldown_s);
  if (!(cooldown >= 0)) return { ok: false, error: "cooldown must be >= 0" };
  const min = Number(fields.min_replicas);
  const max = Number(fields.max_replicas);
  if (!Number.isInteger(min) || min < 1) return { ok: false, error: "min replicas must be an integer >= 1" };
  if (!Number.isInteger(max) || max < min) return { ok: false, error: "max replicas must be an integer >= min" };
  if (fields.monitored_zone === "") return { ok: false, error: "pick a zone to monitor" };
  return {
    ok: true,
    value: {
      gamma,
      poll_period_s: poll,
      window_size: window,
      cooldown_s: cooldown,
      min_replicas: min,
      max_replicas: max,
      monitored_zone: fields.monitored_zone,
    },
  };
}

/** Rewrites a <select>'s options, keeping the current choice when possible. */
export function setOptions(select: HTMLSelectElement, values: string[]): void {
  const current = select.value;
  const existing = Array.from(select.options).map((o) => o.value);
  if (existing.length === values.length && existing.every((v, i) => v === values[i])) return;
  select.replaceChildren();
  for (const v of values) {
    const option = document.createElement("option");
    option.value = v;
    option.textContent = v;
    select.appendChild(option);
  }
  if (values.includes(current)) select.value = current;
}
