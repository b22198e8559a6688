/**
 * Parser for the plain-text metrics exposition served at /metrics.
 *
 * Handles exactly what the backend emits (format 0.0.4): # HELP/# TYPE
 * comment lines, samples with optional label sets, escaped label values,
 * and the special values +Inf/-Inf/NaN. Malformed lines throw; a chart fed
 * garbage should fail loudly rather than plot it.
 */

export interface MetricSample {
  name: string;
  labels: Record<string, string>;
  value: number;
}

const SAMPLE_RE = /^([a-zA-Z_:][a-zA-Z0-9_:]*)(\{.*\})?\s+(\S+)(?:\s+(-?\d+))?$/;

function parseValue(raw: string): number {
  if (raw === "+Inf" || raw === "Inf") return Infinity;
  if (raw === "-Inf") return -Infinity;
  if (raw === "NaN") return NaN;
  const value = Number(raw);
  if (Number.isNaN(value)) throw new Error(`unparseable sample value ${JSON.stringify(raw)}`);
  return value;
}

/** Parses `{k="v",...}` with \\ \" \n escapes in values. */
function parseLabels(raw: string): Record<string, string> {
  const labels: Record<string, string> = {};
  let i = 1; // past the opening brace
  const end = raw.length - 1;
  while (i < end) {
    let j = i;
    while (j < end && raw[j] !== "=") j += 1;
    const name = raw.slice(i, j);
    if (!/^[a-zA-Z_][a-zA-Z0-9_]*$/.test(name)) throw new Error(`bad label name ${JSON.stringify(name)}`);
    if (raw[j + 1] !== '"') throw new Error(`label ${name} is not quoted`);
    let value = "";
    i = j + 2;
    for (;;) {
      if (i >= end) throw new Error(`unterminated label value for ${name}`);
      const ch = raw[i];
      if (ch === "\\") {
        const esc = raw[i + 1];
        if (esc === "\\") value += "\\";
        else if (esc === '"') value += '"';
        else if (esc === "n") value += "\n";
        else throw new Error(`bad escape \\${esc} in label ${name}`);
        i += 2;
      } else if (ch === '"') {
        i += 1;
        break;
      } else {
        value += ch;
        i += 1;
      }
    }
    labels[name] = value;
    if (raw[i] === ",") i += 1;
  }
  return labels;
}

export class MetricsSnapshot {
  constructor(readonly samples: MetricSample[]) {}

  find(name: string, labels?: Record<string, string>): MetricSample | undefined {
    return this.samples.find(
      (s) => s.name === name && (!labels || Object.entries(labels).every(([k, v]) => s.labels[k] === v)),
    );
  }

  value(name: string, labels?: Record<string, string>): number | undefined {
    return this.find(name, labels)?.value;
  }
}

export function parseMetrics(text: string): MetricsSnapshot {
  const samples: MetricSample[] = [];
  for (const line of text.split("\n")) {
    if (line === "" || line.startsWith("#")) continue;
    const match = SAMPLE_RE.exec(line);
    if (!match) throw new Error(`unparseable sample line ${JSON.stringify(line)}`);
    const [, name, labelBlock, rawValue] = match;
    samples.push({
      name,
      labels: labelBlock ? parseLabels(labelBlock) : {},
      value: parseValue(rawValue),
    });
  }
  return new MetricsSnapshot(samples);
}
