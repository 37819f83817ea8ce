/** Minimal deterministic SVG plotting: fixed canvas, fixed palette, no
 * timestamps or generator metadata, numbers formatted to a fixed precision. */

export const WIDTH = 640;
export const HEIGHT = 400;
export const MARGIN = { top: 28, right: 24, bottom: 46, left: 64 };

export const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

const P = (x: number): string => x.toFixed(3);

export interface Scale {
  (v: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function openSvg(title: string): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="18" text-anchor="middle" font-size="14">${escapeXml(title)}</text>`,
  ];
}

export function axes(
  parts: string[],
  xLabel: string,
  yLabel: string,
  xTicks: { v: number; sx: number }[],
  yTicks: { v: number; sy: number }[],
): void {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  for (const t of xTicks) {
    parts.push(`<line x1="${P(t.sx)}" y1="${y0}" x2="${P(t.sx)}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(
      `<text x="${P(t.sx)}" y="${y0 + 18}" text-anchor="middle">${tickLabel(t.v)}</text>`,
    );
  }
  for (const t of yTicks) {
    parts.push(`<line x1="${x0 - 5}" y1="${P(t.sy)}" x2="${x0}" y2="${P(t.sy)}" stroke="black"/>`);
    parts.push(
      `<text x="${x0 - 8}" y="${P(t.sy + 4)}" text-anchor="end">${tickLabel(t.v)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" text-anchor="middle">${escapeXml(xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(yLabel)}</text>`,
  );
}

export function polyline(points: [number, number][], color: string): string {
  const pts = points.map(([x, y]) => `${P(x)},${P(y)}`).join(" ");
  return `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.5"/>`;
}

export function band(upper: [number, number][], lower: [number, number][], color: string): string {
  const pts = [...upper, ...[...lower].reverse()].map(([x, y]) => `${P(x)},${P(y)}`).join(" ");
  return `<polygon points="${pts}" fill="${color}" fill-opacity="0.15" stroke="none"/>`;
}

export function rect(x: number, y: number, w: number, h: number, color: string): string {
  return `<rect x="${P(x)}" y="${P(y)}" width="${P(w)}" height="${P(h)}" fill="${color}"/>`;
}

export function legend(parts: string[], entries: { label: string; color: string }[]): void {
  let y = MARGIN.top + 8;
  for (const e of entries) {
    const x = WIDTH - MARGIN.right - 130;
    parts.push(`<rect x="${x}" y="${y - 9}" width="12" height="12" fill="${e.color}"/>`);
    parts.push(`<text x="${x + 18}" y="${y + 1}">${escapeXml(e.label)}</text>`);
    y += 18;
  }
}

export function closeSvg(parts: string[]): string {
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const step = Math.pow(10, Math.floor(Math.log10((hi - lo) / n)));
  const mult = [1, 2, 5, 10].find((m) => (hi - lo) / (step * m) <= n) ?? 10;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-9; v += s) out.push(Number(v.toFixed(10)));
  return out;
}

function tickLabel(v: number): string {
  return Number.isInteger(v) ? String(v) : String(Number(v.toPrecision(6)));
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
