/**
 * Assembly of the three reference figures from the simulator's output
 * directory.  Pure presentation: inputs are never modified, and every CSV
 * must match the frozen header contract exactly.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  FIG2_HEADER,
  FIG2_NORM_HEADER,
  POPULATIONS_HEADER,
  SCALING_HEADER,
  TRAJECTORY_HEADER,
} from "./contracts.js";
import { numericColumn, readCsv, requireHeader, stringColumn } from "./csv.js";
import { renderChart, type PointMarker, type Series } from "./svg.js";

export type FigureId = 1 | 2 | 3;

export interface FigureSpec {
  figure: FigureId;
  inputDir: string;
  outPath: string;
}

interface SuddenChangeSidecar {
  t_initial: number;
  t_final: number;
}

interface ExtremaSidecar {
  t_max_power: number;
  t_min_wysi_jx: number;
}

function readJson<T>(path: string): T {
  return JSON.parse(readFileSync(path, "utf8")) as T;
}

// spread-free extrema: sample counts can exceed the argument limit
function maxOf(values: number[]): number {
  return values.reduce((a, b) => (b > a ? b : a), -Infinity);
}

function minOf(values: number[]): number {
  return values.reduce((a, b) => (b < a ? b : a), Infinity);
}

/** Populations (one curve per M), local sigma_z skew info, LQU, DSC band. */
export function renderFig1(dir: string): string {
  const traj = readCsv(join(dir, "trajectory.csv"));
  requireHeader(traj, TRAJECTORY_HEADER);
  const pops = readCsv(join(dir, "populations.csv"));
  requireHeader(pops, POPULATIONS_HEADER);
  const dsc = readJson<SuddenChangeSidecar>(join(dir, "dsc.json"));

  const t = numericColumn(traj, "gamma_t");
  const wysi = numericColumn(traj, "wysi_sigma_z");
  const lqu = numericColumn(traj, "lqu");

  const pt = numericColumn(pops, "gamma_t");
  const pm = stringColumn(pops, "m");
  const pp = numericColumn(pops, "p");
  const byM = new Map<string, { x: number[]; y: number[] }>();
  for (let i = 0; i < pt.length; i++) {
    const key = pm[i] as string;
    let curve = byM.get(key);
    if (!curve) {
      curve = { x: [], y: [] };
      byM.set(key, curve);
    }
    curve.x.push(pt[i] as number);
    curve.y.push(pp[i] as number);
  }

  const series: Series[] = [...byM.values()].map((curve) => ({
    ...curve,
    stroke: "black",
    strokeWidth: 0.8,
    opacity: 0.55,
  }));
  const first = series[0];
  if (first) {
    first.label = `populations p(J,M) (${byM.size} curves)`;
  }
  series.push(
    { x: t, y: wysi, stroke: "#1f5fd0", dash: "2 3", strokeWidth: 2, label: "I(ρ, σ_z one emitter)" },
    { x: t, y: lqu, stroke: "#c22525", dash: "7 4", strokeWidth: 2, label: "LQU" },
  );

  return renderChart({
    xLabel: "γt",
    yLabel: "populations and diagnostics",
    title: "Cascade populations, local skew information, LQU",
    series,
    shadeX: [dsc.t_initial, dsc.t_final],
    yMin: 0,
  });
}

/** Normalized radiated power vs. skew information of J_x. */
export function renderFig2(dir: string): string {
  const table = readCsv(join(dir, "fig2.csv"));
  const header = requireHeader(table, FIG2_NORM_HEADER, FIG2_HEADER);
  const ext = readJson<ExtremaSidecar>(join(dir, "extrema.json"));

  const t = numericColumn(table, "gamma_t");
  let power: number[];
  let wysi: number[];
  let yLabel: string;
  if (header === FIG2_NORM_HEADER) {
    power = numericColumn(table, "p_total_norm");
    wysi = numericColumn(table, "wysi_jx_norm");
    yLabel = "P/500 and 4I(ρ,J_x)/50";
  } else {
    // no reference normalization outside N=50: scale each to its maximum
    const rawP = numericColumn(table, "p_total");
    const rawI = numericColumn(table, "wysi_jx");
    const pMax = maxOf(rawP);
    const iMax = maxOf(rawI);
    power = rawP.map((v) => v / pMax);
    wysi = rawI.map((v) => v / iMax);
    yLabel = "P and I(ρ,J_x), each scaled to its maximum";
  }

  const iMin = minOf(wysi);
  const markers: PointMarker[] = [
    { x: ext.t_min_wysi_jx, y: iMin, fill: "black", label: "t_min of I(ρ,J_x)" },
  ];

  return renderChart({
    xLabel: "γt",
    yLabel,
    title: "Radiated power vs. global J_x skew information",
    series: [
      { x: t, y: power, stroke: "#1f5fd0", dash: "7 4", strokeWidth: 2, label: "normalized P" },
      { x: t, y: wysi, stroke: "black", strokeWidth: 2, label: "normalized I(ρ,J_x)" },
    ],
    markers,
    vlineX: ext.t_max_power,
    yMin: 0,
  });
}

/** Peak-emission time and skew-information-minimum time against N. */
export function renderFig3(dir: string): string {
  const table = readCsv(join(dir, "scaling.csv"));
  requireHeader(table, SCALING_HEADER);

  const n = numericColumn(table, "n");
  const tMax = numericColumn(table, "t_max");
  const tMin = numericColumn(table, "t_min");

  const markers: PointMarker[] = [
    ...n.map((x, i) => ({
      x,
      y: tMax[i] as number,
      fill: "#1f5fd0",
      shape: "circle" as const,
    })),
    ...n.map((x, i) => ({
      x,
      y: tMin[i] as number,
      fill: "#c22525",
      shape: "square" as const,
    })),
  ];
  const labeledMax = markers[0];
  const labeledMin = markers[n.length];
  if (labeledMax) labeledMax.label = "t_max of P";
  if (labeledMin) labeledMin.label = "t_min of I(ρ,J_x)";

  return renderChart({
    xLabel: "N",
    yLabel: "γt",
    title: "Emission peak vs. skew-information minimum",
    series: [
      { x: n, y: tMax, stroke: "#1f5fd0", strokeWidth: 1, dash: "2 3" },
      { x: n, y: tMin, stroke: "#c22525", strokeWidth: 1, dash: "2 3" },
    ],
    markers,
    yMin: 0,
  });
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.figure) {
    case 1:
      return renderFig1(spec.inputDir);
    case 2:
      return renderFig2(spec.inputDir);
    case 3:
      return renderFig3(spec.inputDir);
    default:
      throw new Error(`unknown figure ${String(spec.figure)}`);
  }
}
