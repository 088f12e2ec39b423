/**
 * Tiny SVG line-chart builder: linear scales, nice ticks, polyline series,
 * shaded bands, vertical markers, point markers, legend.  No DOM, no
 * dependencies; output is a standalone SVG document string.
 */

export interface Series {
  x: number[];
  y: number[];
  stroke: string;
  strokeWidth?: number;
  dash?: string;
  label?: string;
  opacity?: number;
}

export interface PointMarker {
  x: number;
  y: number;
  fill: string;
  shape?: "circle" | "square";
  label?: string;
}

export interface ChartSpec {
  width?: number;
  height?: number;
  title?: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  markers?: PointMarker[];
  /** Shaded x-interval (e.g. the double-sudden-change window). */
  shadeX?: [number, number];
  /** Dashed vertical rule (e.g. the emission peak). */
  vlineX?: number;
  yMin?: number;
}

const MARGIN = { top: 36, right: 20, bottom: 46, left: 58 };

class LinearScale {
  constructor(
    private d0: number,
    private d1: number,
    private r0: number,
    private r1: number,
  ) {}

  map(v: number): number {
    const t = (v - this.d0) / (this.d1 - this.d0 || 1);
    return this.r0 + t * (this.r1 - this.r0);
  }
}

/** Tick positions with a 1/2/5 step covering [min, max]. */
export function niceTicks(min: number, max: number, count = 6): number[] {
  if (!(max > min)) {
    return [min];
  }
  const rawStep = (max - min) / Math.max(1, count - 1);
  const power = Math.floor(Math.log10(rawStep));
  const base = 10 ** power;
  const step = [1, 2, 5, 10].map((m) => m * base).find((s) => s >= rawStep) ?? base;
  const ticks: number[] = [];
  for (let i = Math.ceil(min / step - 1e-9); i * step <= max + step * 1e-9; i++) {
    // index multiplication plus rounding keeps tick values free of fp dust
    ticks.push(i === 0 ? 0 : Number((i * step).toPrecision(12)));
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

export function renderChart(spec: ChartSpec): string {
  if (spec.series.length === 0 || spec.series.every((s) => s.x.length === 0)) {
    throw new Error("chart has no data");
  }
  const width = spec.width ?? 760;
  const height = spec.height ?? 480;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const [x0, x1] = extent(spec.series.flatMap((s) => s.x));
  let [y0, y1] = extent(spec.series.flatMap((s) => s.y));
  if (spec.yMin !== undefined) y0 = Math.min(spec.yMin, y0);
  const yPad = (y1 - y0 || 1) * 0.05;
  y1 += yPad;
  if (spec.yMin === undefined) y0 -= yPad;

  const sx = new LinearScale(x0, x1, MARGIN.left, MARGIN.left + innerW);
  const sy = new LinearScale(y0, y1, MARGIN.top + innerH, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  if (spec.shadeX) {
    const [a, b] = spec.shadeX;
    const xa = sx.map(a);
    const xb = sx.map(b);
    parts.push(
      `<rect class="shade" x="${xa.toFixed(2)}" y="${MARGIN.top}" ` +
        `width="${(xb - xa).toFixed(2)}" height="${innerH}" ` +
        `fill="#ffd480" opacity="0.35"/>`,
    );
  }

  // axes and ticks
  const axisY = MARGIN.top + innerH;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${MARGIN.left + innerW}" ` +
      `y2="${axisY}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
      `y2="${axisY}" stroke="black"/>`,
  );
  for (const t of niceTicks(x0, x1)) {
    const px = sx.map(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${axisY}" x2="${px.toFixed(2)}" y2="${axisY + 5}" stroke="black"/>`,
      `<text x="${px.toFixed(2)}" y="${axisY + 18}" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of niceTicks(y0, y1)) {
    const py = sy.map(t);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${py.toFixed(2)}" x2="${MARGIN.left}" y2="${py.toFixed(2)}" stroke="black"/>`,
      `<text x="${MARGIN.left - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 10}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
    `<text x="16" y="${MARGIN.top + innerH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${esc(spec.yLabel)}</text>`,
  );
  if (spec.title) {
    parts.push(
      `<text x="${MARGIN.left + innerW / 2}" y="20" text-anchor="middle" font-size="14">${esc(spec.title)}</text>`,
    );
  }

  if (spec.vlineX !== undefined) {
    const px = sx.map(spec.vlineX);
    parts.push(
      `<line class="vline" x1="${px.toFixed(2)}" y1="${MARGIN.top}" ` +
        `x2="${px.toFixed(2)}" y2="${axisY}" stroke="#1f5fd0" ` +
        `stroke-dasharray="6 4"/>`,
    );
  }

  for (const s of spec.series) {
    const pts = s.x
      .map((vx, i) => `${sx.map(vx).toFixed(2)},${sy.map(s.y[i] as number).toFixed(2)}`)
      .join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    const opacity = s.opacity !== undefined ? ` opacity="${s.opacity}"` : "";
    parts.push(
      `<polyline fill="none" stroke="${s.stroke}" ` +
        `stroke-width="${s.strokeWidth ?? 1.2}"${dash}${opacity} points="${pts}"/>`,
    );
  }

  for (const m of spec.markers ?? []) {
    const px = sx.map(m.x).toFixed(2);
    const py = sy.map(m.y).toFixed(2);
    if (m.shape === "square") {
      parts.push(
        `<rect class="marker" x="${Number(px) - 4}" y="${Number(py) - 4}" width="8" height="8" fill="${m.fill}"/>`,
      );
    } else {
      parts.push(`<circle class="marker" cx="${px}" cy="${py}" r="4" fill="${m.fill}"/>`);
    }
  }

  // legend for labeled series and markers
  const entries = [
    ...spec.series.filter((s) => s.label).map((s) => ({
      color: s.stroke,
      dash: s.dash,
      label: s.label as string,
      marker: false as const,
      shape: undefined as "circle" | "square" | undefined,
    })),
    ...(spec.markers ?? []).filter((m) => m.label).map((m) => ({
      color: m.fill,
      dash: undefined,
      label: m.label as string,
      marker: true as const,
      shape: m.shape ?? ("circle" as const),
    })),
  ];
  entries.forEach((entry, i) => {
    const ly = MARGIN.top + 8 + 18 * i;
    const lx = MARGIN.left + innerW - 170;
    if (entry.marker) {
      if (entry.shape === "square") {
        parts.push(`<rect x="${lx + 8}" y="${ly - 4}" width="8" height="8" fill="${entry.color}"/>`);
      } else {
        parts.push(`<circle cx="${lx + 12}" cy="${ly}" r="4" fill="${entry.color}"/>`);
      }
    } else {
      const dash = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
      parts.push(
        `<line x1="${lx}" y1="${ly}" x2="${lx + 24}" y2="${ly}" stroke="${entry.color}" stroke-width="2"${dash}/>`,
      );
    }
    parts.push(`<text x="${lx + 30}" y="${ly + 4}">${esc(entry.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
