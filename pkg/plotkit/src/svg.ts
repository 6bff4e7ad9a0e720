/** Deterministic, dependency-free SVG emitters for line charts and
 * two-panel heatmap surfaces. Numbers are formatted with fixed precision so
 * identical input always produces identical bytes. */

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 64, right: 24, top: 32, bottom: 48 };

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

function fmt(x: number): string {
  return x.toFixed(2);
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(v);
  }
  return ticks;
}

export interface Scale {
  (x: number): number;
  lo: number;
  hi: number;
}

export function linearScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  const span = hi - lo || 1;
  const f = ((x: number) => rLo + ((x - lo) / span) * (rHi - rLo)) as Scale;
  f.lo = lo;
  f.hi = hi;
  return f;
}

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

function axes(sx: Scale, sy: Scale, xLabel: string, yLabel: string): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  for (const t of niceTicks(sx.lo, sx.hi)) {
    const px = sx(t);
    parts.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(`<text x="${fmt(px)}" y="${y0 + 20}" text-anchor="middle" font-size="12">${+t.toPrecision(6)}</text>`);
  }
  for (const t of niceTicks(sy.lo, sy.hi)) {
    const py = sy(t);
    parts.push(`<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="black"/>`);
    parts.push(`<text x="${x0 - 8}" y="${fmt(py + 4)}" text-anchor="end" font-size="12">${+t.toPrecision(6)}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="13">${xLabel}</text>`);
  parts.push(`<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${(y0 + y1) / 2})">${yLabel}</text>`);
  return parts.join("\n");
}

export function lineChart(series: Series[], title: string, xLabel: string,
                          yLabel: string): string {
  if (series.length === 0) throw new Error("line chart needs at least one series");
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  const sx = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, WIDTH - MARGIN.right);
  const yLo = Math.min(0, Math.min(...ys));
  const yHi = Math.max(1, Math.max(...ys));
  const sy = linearScale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="15">${title}</text>`);
  parts.push(axes(sx, sy, xLabel, yLabel));
  series.forEach((s, i) => {
    if (s.x.length !== s.y.length) {
      throw new Error(`series ${s.label}: x and y lengths differ`);
    }
    const pts = s.x.map((x, k) => `${fmt(sx(x))},${fmt(sy(s.y[k]))}`).join(" ");
    const color = PALETTE[i % PALETTE.length];
    parts.push(`<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${pts}"/>`);
    const ly = MARGIN.top + 16 * i + 8;
    parts.push(`<line x1="${WIDTH - 190}" y1="${ly}" x2="${WIDTH - 166}" y2="${ly}" stroke="${color}" stroke-width="1.5"/>`);
    parts.push(`<text x="${WIDTH - 160}" y="${ly + 4}" font-size="12">${s.label}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export interface SurfacePanel {
  label: string;
  x: number[]; // grid axis values (unique, sorted)
  y: number[];
  z: Map<string, number>; // key `${xi}|${yi}` -> value
}

function viridis(t: number): string {
  // coarse five-stop approximation; deterministic and good enough for a
  // fidelity heat map
  const stops: [number, number, number][] = [
    [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
  ];
  const u = Math.min(Math.max(t, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(u), stops.length - 2);
  const f = u - i;
  const c = stops[i].map((a, k) => Math.round(a + f * (stops[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export function surfaceChart(panels: SurfacePanel[], title: string, xLabel: string,
                             yLabel: string, zLo = 0, zHi = 1): string {
  if (panels.length === 0) throw new Error("surface chart needs at least one panel");
  const panelW = (WIDTH - MARGIN.left - MARGIN.right) / panels.length - 16;
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="15">${title}</text>`);
  panels.forEach((panel, p) => {
    const ox = MARGIN.left + p * (panelW + 16);
    const oy = MARGIN.top + 12;
    const h = HEIGHT - MARGIN.top - MARGIN.bottom - 12;
    const cw = panelW / panel.x.length;
    const ch = h / panel.y.length;
    parts.push(`<text x="${fmt(ox + panelW / 2)}" y="${oy - 2}" text-anchor="middle" font-size="13">${panel.label}</text>`);
    panel.x.forEach((xv, i) => {
      panel.y.forEach((yv, j) => {
        const key = `${i}|${j}`;
        const z = panel.z.get(key);
        if (z === undefined) throw new Error(`panel ${panel.label}: missing grid cell (${xv}, ${yv})`);
        const t = (z - zLo) / (zHi - zLo || 1);
        parts.push(`<rect x="${fmt(ox + i * cw)}" y="${fmt(oy + h - (j + 1) * ch)}" width="${fmt(cw + 0.5)}" height="${fmt(ch + 0.5)}" fill="${viridis(t)}"/>`);
      });
    });
    parts.push(`<text x="${fmt(ox + panelW / 2)}" y="${HEIGHT - 10}" text-anchor="middle" font-size="13">${xLabel}</text>`);
  });
  parts.push(`<text x="16" y="${HEIGHT / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${HEIGHT / 2})">${yLabel}</text>`);
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
