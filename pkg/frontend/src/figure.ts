/**
 * Figure model: one curve per (scheme, Z) group, metric on the y axis,
 * transmit SNR on the x axis. Pure data in, pure data out, so the SVG
 * writer stays trivial and everything is unit-testable.
 */
import { ResultRow } from "./schema.js";

export type Metric = "ber" | "pep" | "sum_rate";

export const METRIC_COLUMNS: Record<Metric, keyof ResultRow> = {
  ber: "ber",
  pep: "pep_wc_avg",
  sum_rate: "sum_rate_avg",
};

/** ber and pep live on a log axis unless the caller forces linear. */
export function defaultLogScale(metric: Metric): boolean {
  return metric !== "sum_rate";
}

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  color: string;
  marker: "circle" | "square" | "triangle" | "diamond";
  points: Point[];
}

export interface Tick {
  value: number;
  text: string;
}

export interface Axis {
  label: string;
  scale: "linear" | "log";
  domain: [number, number];
  ticks: Tick[];
}

export interface Figure {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  x: Axis;
  y: Axis;
  series: Series[];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
const MARKERS: Series["marker"][] = ["circle", "square", "triangle", "diamond"];

export function groupSeries(rows: ResultRow[], metric: Metric): Series[] {
  const groups = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const key = `${row.scheme}|${row.Z}`;
    const bucket = groups.get(key) ?? [];
    bucket.push(row);
    groups.set(key, bucket);
  }
  const column = METRIC_COLUMNS[metric];
  return [...groups.entries()].map(([key, bucket], i) => {
    const [scheme, z] = key.split("|");
    const points = bucket
      .map((r) => ({ x: r.snr_db, y: r[column] as number }))
      .sort((a, b) => a.x - b.x);
    return {
      label: `${scheme} (Z=${z})`,
      color: PALETTE[i % PALETTE.length],
      marker: MARKERS[i % MARKERS.length],
      points,
    };
  });
}

function niceStep(rawStep: number): number {
  const power = Math.floor(Math.log10(rawStep));
  const base = rawStep / 10 ** power;
  const niced = base <= 1 ? 1 : base <= 2 ? 2 : base <= 5 ? 5 : 10;
  return niced * 10 ** power;
}

export function linearTicks(lo: number, hi: number, target = 6): Tick[] {
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const step = niceStep((hi - lo) / Math.max(target - 1, 1));
  const ticks: Tick[] = [];
  const decimals = Math.max(0, -Math.floor(Math.log10(step)));
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    const value = Number(v.toFixed(12));
    ticks.push({ value, text: value.toFixed(decimals) });
  }
  return ticks;
}

export function decadeTicks(lo: number, hi: number): Tick[] {
  const ticks: Tick[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.log10(hi) + 1e-9; e += 1) {
    ticks.push({ value: 10 ** e, text: `1e${e}` });
  }
  return ticks;
}

function linearDomain(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = 0.05 * (hi - lo);
  if (lo >= 0 && lo - pad < 0) {
    return [0, hi + pad];
  }
  return [lo - pad, hi + pad];
}

function logDomain(values: number[]): [number, number] {
  const positive = values.filter((v) => v > 0);
  if (positive.length === 0) {
    return [1e-6, 1]; // nothing plottable; keep a sane frame
  }
  const lo = 10 ** Math.floor(Math.log10(Math.min(...positive)) - 1e-9);
  const hi = 10 ** Math.ceil(Math.log10(Math.max(...positive)) + 1e-9);
  return lo === hi ? [lo / 10, hi * 10] : [lo, hi];
}

export function buildFigure(rows: ResultRow[], metric: Metric, logScale: boolean): Figure {
  const series = groupSeries(rows, metric);
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  const xDomain = linearDomain(xs);
  const yDomain = logScale ? logDomain(ys) : linearDomain(ys);
  return {
    width: 720,
    height: 480,
    margin: { top: 24, right: 24, bottom: 56, left: 78 },
    x: {
      label: "SNR (dB)",
      scale: "linear",
      domain: xDomain,
      ticks: linearTicks(xDomain[0], xDomain[1]),
    },
    y: {
      label: metric,
      scale: logScale ? "log" : "linear",
      domain: yDomain,
      ticks: logScale ? decadeTicks(yDomain[0], yDomain[1]) : linearTicks(yDomain[0], yDomain[1]),
    },
    series,
  };
}
