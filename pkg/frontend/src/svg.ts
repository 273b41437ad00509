// Minimal hand-rolled SVG line charts. No DOM, no plotting dependency: each
// figure is assembled from template literals so the output is a plain string
// and renders byte-for-byte identically on every run.

export interface Point {
  x: number;
  y: number;
  se: number | null;
}

export interface Series {
  label: string;
  color: string;
  points: Point[]; // sorted by x, nulls already dropped
}

export interface VLine {
  x: number;
  color: string;
  label: string;
}

export interface HLine {
  y: number;
  label: string;
}

export interface ChartOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  vLines?: VLine[];
  hLines?: HLine[];
  bandZ: number; // half-width of the shaded band in SE units, 0 disables
  logX: boolean;
  width?: number;
  height?: number;
}

const WIDTH = 760;
const HEIGHT = 420;
const MARGIN = { top: 42, right: 168, bottom: 56, left: 72 };

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

// ---------------------------------------------------------------------------
// Scales and ticks
// ---------------------------------------------------------------------------

export function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step0 = span / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (m * mag >= step0) {
      step = m * mag;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

// 1-2-5 ticks per decade, trimmed to the data range.
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const dLo = Math.floor(Math.log10(lo));
  const dHi = Math.ceil(Math.log10(hi));
  for (let d = dLo; d <= dHi; d++) {
    for (const m of [1, 2, 5]) {
      const v = Number((m * Math.pow(10, d)).toPrecision(12));
      if (v >= lo * 0.999 && v <= hi * 1.001) {
        ticks.push(v);
      }
    }
  }
  return ticks;
}

export function fmt(v: number): string {
  if (v === 0) {
    return "0";
  }
  const abs = Math.abs(v);
  if (abs >= 1e5 || abs < 1e-4) {
    return v.toExponential(1).replace("e-", "e-").replace("e+", "e");
  }
  return String(Number(v.toPrecision(10)));
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function px(v: number): string {
  return v.toFixed(2);
}

// ---------------------------------------------------------------------------
// Chart assembly
// ---------------------------------------------------------------------------

export function buildChart(opts: ChartOpts): string {
  const width = opts.width ?? WIDTH;
  const height = opts.height ?? HEIGHT;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of opts.series) {
    for (const p of s.points) {
      xs.push(p.x);
      ys.push(p.y);
      if (opts.bandZ > 0 && p.se !== null) {
        ys.push(p.y - opts.bandZ * p.se);
        ys.push(p.y + opts.bandZ * p.se);
      }
    }
  }
  for (const v of opts.vLines ?? []) {
    xs.push(v.x);
  }
  for (const h of opts.hLines ?? []) {
    ys.push(h.y);
  }
  if (xs.length === 0) {
    throw new Error(`"${opts.title}": no points to draw`);
  }

  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yPad = (Math.max(...ys) - Math.min(...ys)) * 0.06 || 1e-12;
  const yLo = Math.min(...ys) - yPad;
  const yHi = Math.max(...ys) + yPad;

  const xPos = (x: number): number => {
    if (opts.logX) {
      const t = (Math.log10(x) - Math.log10(xLo)) / (Math.log10(xHi) - Math.log10(xLo) || 1);
      return MARGIN.left + t * plotW;
    }
    return MARGIN.left + ((x - xLo) / (xHi - xLo || 1)) * plotW;
  };
  const yPos = (y: number): number =>
    MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const xTicks = opts.logX ? logTicks(xLo, xHi) : niceTicks(xLo, xHi, 8);
  const yTicks = niceTicks(yLo, yHi, 6);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // gridlines
  for (const t of yTicks) {
    const y = px(yPos(t));
    parts.push(
      `<line x1="${px(MARGIN.left)}" y1="${y}" x2="${px(MARGIN.left + plotW)}" y2="${y}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
  }
  for (const t of xTicks) {
    const x = px(xPos(t));
    parts.push(
      `<line x1="${x}" y1="${px(MARGIN.top)}" x2="${x}" y2="${px(MARGIN.top + plotH)}" stroke="#eeeeee" stroke-width="1"/>`,
    );
  }

  // confidence bands under the lines
  if (opts.bandZ > 0) {
    for (const s of opts.series) {
      const banded = s.points.filter((p) => p.se !== null);
      if (banded.length < 2) {
        continue;
      }
      const upper = banded.map(
        (p) => `${px(xPos(p.x))},${px(yPos(p.y + opts.bandZ * (p.se as number)))}`,
      );
      const lower = banded
        .slice()
        .reverse()
        .map((p) => `${px(xPos(p.x))},${px(yPos(p.y - opts.bandZ * (p.se as number)))}`);
      parts.push(
        `<polygon points="${upper.concat(lower).join(" ")}" fill="${s.color}" fill-opacity="0.15" stroke="none"/>`,
      );
    }
  }

  // reference lines
  for (const h of opts.hLines ?? []) {
    const y = px(yPos(h.y));
    parts.push(
      `<line x1="${px(MARGIN.left)}" y1="${y}" x2="${px(MARGIN.left + plotW)}" y2="${y}" stroke="#888888" stroke-width="1" stroke-dasharray="6 3"/>`,
    );
    parts.push(
      `<text x="${px(MARGIN.left + plotW - 4)}" y="${px(yPos(h.y) - 5)}" ${FONT} font-size="11" fill="#666666" text-anchor="end">${esc(h.label)}</text>`,
    );
  }
  const vLines = opts.vLines ?? [];
  for (let i = 0; i < vLines.length; i++) {
    const v = vLines[i];
    const x = px(xPos(v.x));
    parts.push(
      `<line x1="${x}" y1="${px(MARGIN.top)}" x2="${x}" y2="${px(MARGIN.top + plotH)}" stroke="${v.color}" stroke-width="1.5" stroke-dasharray="5 4"/>`,
    );
    parts.push(
      `<text x="${px(xPos(v.x) + 3)}" y="${px(MARGIN.top + 12 + i * 13)}" ${FONT} font-size="11" fill="${v.color}">${esc(v.label)}</text>`,
    );
  }

  // series
  for (const s of opts.series) {
    if (s.points.length === 0) {
      continue;
    }
    const pts = s.points.map((p) => `${px(xPos(p.x))},${px(yPos(p.y))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="2"/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle cx="${px(xPos(p.x))}" cy="${px(yPos(p.y))}" r="2.5" fill="${s.color}"/>`,
      );
    }
  }

  // axes
  parts.push(
    `<line x1="${px(MARGIN.left)}" y1="${px(MARGIN.top + plotH)}" x2="${px(MARGIN.left + plotW)}" y2="${px(MARGIN.top + plotH)}" stroke="black" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${px(MARGIN.left)}" y1="${px(MARGIN.top)}" x2="${px(MARGIN.left)}" y2="${px(MARGIN.top + plotH)}" stroke="black" stroke-width="1"/>`,
  );
  for (const t of xTicks) {
    const x = px(xPos(t));
    parts.push(
      `<line x1="${x}" y1="${px(MARGIN.top + plotH)}" x2="${x}" y2="${px(MARGIN.top + plotH + 5)}" stroke="black" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${px(MARGIN.top + plotH + 19)}" ${FONT} font-size="11" text-anchor="middle">${esc(fmt(t))}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = yPos(t);
    parts.push(
      `<line x1="${px(MARGIN.left - 5)}" y1="${px(y)}" x2="${px(MARGIN.left)}" y2="${px(y)}" stroke="black" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(MARGIN.left - 8)}" y="${px(y + 4)}" ${FONT} font-size="11" text-anchor="end">${esc(fmt(t))}</text>`,
    );
  }

  // labels and title
  parts.push(
    `<text x="${px(MARGIN.left + plotW / 2)}" y="${px(height - 14)}" ${FONT} font-size="13" text-anchor="middle">${esc(opts.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${px(MARGIN.top + plotH / 2)}" ${FONT} font-size="13" text-anchor="middle" transform="rotate(-90 18 ${px(MARGIN.top + plotH / 2)})">${esc(opts.yLabel)}</text>`,
  );
  parts.push(
    `<text x="${px(MARGIN.left + plotW / 2)}" y="24" ${FONT} font-size="15" font-weight="bold" text-anchor="middle">${esc(opts.title)}</text>`,
  );

  // legend
  let ly = MARGIN.top + 8;
  const lx = MARGIN.left + plotW + 16;
  for (const s of opts.series) {
    parts.push(
      `<line x1="${px(lx)}" y1="${px(ly)}" x2="${px(lx + 22)}" y2="${px(ly)}" stroke="${s.color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${px(lx + 28)}" y="${px(ly + 4)}" ${FONT} font-size="12">${esc(s.label)}</text>`,
    );
    ly += 18;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
