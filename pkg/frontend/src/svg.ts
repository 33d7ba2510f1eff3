/**
 * Minimal deterministic SVG scene builder.
 *
 * Coordinates are emitted with two fixed decimals and elements in call
 * order, so a figure built from the same inputs is byte-identical on
 * every run.  No external renderer is involved.
 */

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (v: number): string => v.toFixed(2);

export type Scale = (value: number) => number;

export function linScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

/** log10 scale; callers must keep values strictly positive */
export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

export function linTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? mag * 10;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** decade ticks inside [lo, hi]; endpoints when no decade falls inside */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / Math.pow(10, e);
    const ms = Math.abs(m - 1) < 1e-9 ? "" : `${m.toFixed(1)}·`;
    return `${ms}1e${e}`;
  }
  return a >= 100 ? v.toFixed(0) : a >= 1 ? String(Number(v.toFixed(2))) : String(Number(v.toFixed(4)));
}

export interface TextOpts {
  size?: number;
  anchor?: "start" | "middle" | "end";
  fill?: string;
  rotate?: number;
}

export class Scene {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.parts.push(
      `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, w = 1, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${w}"${d}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, w = 1.2, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    const coords = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${coords}" fill="none" stroke="${stroke}" stroke-width="${w}"${d}/>`,
    );
  }

  dot(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, stroke: string, fill = "none"): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  text(s: string, x: number, y: number, opts: TextOpts = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222222";
    const rot = opts.rotate ? ` transform="rotate(${opts.rotate} ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="monospace" font-size="${size}" text-anchor="${anchor}" fill="${fill}"${rot}>${esc(s)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface AxisSpec {
  ticks: number[];
  scale: Scale;
  label: string;
}

/** frame, tick marks, tick labels and axis labels for one panel */
export function drawFrame(sc: Scene, box: Box, xa: AxisSpec, ya: AxisSpec): void {
  sc.rect(box.x, box.y, box.w, box.h, "#444444");
  for (const t of xa.ticks) {
    const px = xa.scale(t);
    if (px < box.x - 0.5 || px > box.x + box.w + 0.5) continue;
    sc.line(px, box.y + box.h, px, box.y + box.h + 4, "#444444");
    sc.text(tickLabel(t), px, box.y + box.h + 15, { size: 9, anchor: "middle" });
  }
  for (const t of ya.ticks) {
    const py = ya.scale(t);
    if (py < box.y - 0.5 || py > box.y + box.h + 0.5) continue;
    sc.line(box.x - 4, py, box.x, py, "#444444");
    sc.text(tickLabel(t), box.x - 6, py + 3, { size: 9, anchor: "end" });
  }
  sc.text(xa.label, box.x + box.w / 2, box.y + box.h + 30, { anchor: "middle" });
  sc.text(ya.label, box.x - 46, box.y + box.h / 2, { anchor: "middle", rotate: -90 });
}
