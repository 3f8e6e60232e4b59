/** Minimal deterministic SVG plotting toolkit.
 *
 * No timestamps, no randomness, fixed number formatting: rendering the
 * same inputs twice yields identical bytes.
 */

export interface TraceStyle {
  color: string;
  dash?: string;
  width?: number;
  cls?: string;
}

interface Trace {
  x: ArrayLike<number>;
  y: ArrayLike<number>;
  style: TraceStyle;
}

interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  style: TraceStyle;
}

interface LegendEntry {
  label: string;
  style: TraceStyle;
}

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

export function fmt(v: number, decimals = 2): string {
  const s = v.toFixed(decimals);
  return s === "-0" || /^-0\.0+$/.test(s) ? s.slice(1) : s;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** Tick positions on a 1-2-5 grid covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, target = 6): { ticks: number[]; step: number } {
  if (!(hi > lo)) return { ticks: [lo], step: 1 };
  const raw = (hi - lo) / Math.max(2, target);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return { ticks, step };
}

function tickLabel(v: number, step: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(step) < 1e-3)) {
    return v.toExponential(1);
  }
  const dec = Math.max(0, -Math.floor(Math.log10(step) + 1e-9));
  return fmt(v, dec);
}

function extent(values: ArrayLike<number>, acc: [number, number]): void {
  for (let i = 0; i < values.length; i++) {
    const v = values[i]!;
    if (v < acc[0]) acc[0] = v;
    if (v > acc[1]) acc[1] = v;
  }
}

/** Thin traces to a bounded point count; keeps first and last samples. */
export function strideIndices(n: number, cap = 2000): number[] {
  const stride = Math.max(1, Math.ceil(n / cap));
  const idx: number[] = [];
  for (let i = 0; i < n; i += stride) idx.push(i);
  if (idx[idx.length - 1] !== n - 1) idx.push(n - 1);
  return idx;
}

export class Panel {
  private traces: Trace[] = [];
  private segments: Segment[] = [];
  private legend: LegendEntry[] = [];
  xlabel = "";
  ylabel = "";
  title = "";

  trace(x: ArrayLike<number>, y: ArrayLike<number>, style: TraceStyle, legend?: string): void {
    if (x.length !== y.length) throw new Error("trace arrays differ in length");
    this.traces.push({ x, y, style });
    if (legend !== undefined) this.legend.push({ label: legend, style });
  }

  segment(x1: number, y1: number, x2: number, y2: number, style: TraceStyle): void {
    this.segments.push({ x1, y1, x2, y2, style });
  }

  legendEntry(label: string, style: TraceStyle): void {
    this.legend.push({ label, style });
  }

  private ranges(): { x: [number, number]; y: [number, number] } {
    const x: [number, number] = [Infinity, -Infinity];
    const y: [number, number] = [Infinity, -Infinity];
    for (const t of this.traces) {
      extent(t.x, x);
      extent(t.y, y);
    }
    for (const s of this.segments) {
      extent([s.x1, s.x2], x);
      extent([s.y1, s.y2], y);
    }
    for (const r of [x, y]) {
      if (!Number.isFinite(r[0]) || !Number.isFinite(r[1])) {
        r[0] = 0;
        r[1] = 1;
      } else if (r[0] === r[1]) {
        const pad = Math.max(1e-9, Math.abs(r[0]) * 0.1 + 1e-3);
        r[0] -= pad;
        r[1] += pad;
      } else {
        const pad = (r[1] - r[0]) * 0.04;
        r[0] -= pad;
        r[1] += pad;
      }
    }
    return { x, y };
  }

  /** Render into the pixel rectangle; returns SVG fragments. */
  render(px: number, py: number, pw: number, ph: number): string {
    const { x: xr, y: yr } = this.ranges();
    const sx = (v: number) => px + ((v - xr[0]) / (xr[1] - xr[0])) * pw;
    const sy = (v: number) => py + ph - ((v - yr[0]) / (yr[1] - yr[0])) * ph;
    const out: string[] = [];
    out.push(
      `<rect x="${fmt(px)}" y="${fmt(py)}" width="${fmt(pw)}" height="${fmt(ph)}" fill="none" stroke="#444444" stroke-width="1"/>`,
    );
    const xt = niceTicks(xr[0], xr[1]);
    for (const v of xt.ticks) {
      const X = sx(v);
      out.push(
        `<line x1="${fmt(X)}" y1="${fmt(py + ph)}" x2="${fmt(X)}" y2="${fmt(py + ph + 4)}" stroke="#444444" stroke-width="1"/>`,
      );
      out.push(
        `<line x1="${fmt(X)}" y1="${fmt(py)}" x2="${fmt(X)}" y2="${fmt(py + ph)}" stroke="#dddddd" stroke-width="0.5"/>`,
      );
      out.push(
        `<text x="${fmt(X)}" y="${fmt(py + ph + 16)}" ${FONT} font-size="10" fill="#222222" text-anchor="middle">${esc(tickLabel(v, xt.step))}</text>`,
      );
    }
    const yt = niceTicks(yr[0], yr[1], 5);
    for (const v of yt.ticks) {
      const Y = sy(v);
      out.push(
        `<line x1="${fmt(px - 4)}" y1="${fmt(Y)}" x2="${fmt(px)}" y2="${fmt(Y)}" stroke="#444444" stroke-width="1"/>`,
      );
      out.push(
        `<line x1="${fmt(px)}" y1="${fmt(Y)}" x2="${fmt(px + pw)}" y2="${fmt(Y)}" stroke="#dddddd" stroke-width="0.5"/>`,
      );
      out.push(
        `<text x="${fmt(px - 7)}" y="${fmt(Y + 3.5)}" ${FONT} font-size="10" fill="#222222" text-anchor="end">${esc(tickLabel(v, yt.step))}</text>`,
      );
    }
    for (const t of this.traces) {
      const idx = strideIndices(t.x.length);
      const pts = idx.map((i) => `${fmt(sx(t.x[i]!))},${fmt(sy(t.y[i]!))}`).join(" ");
      const cls = t.style.cls ?? "trace-solid";
      const dash = t.style.dash ? ` stroke-dasharray="${t.style.dash}"` : "";
      out.push(
        `<polyline class="trace ${cls}" points="${pts}" fill="none" stroke="${t.style.color}" stroke-width="${fmt(t.style.width ?? 1.4, 1)}"${dash}/>`,
      );
    }
    for (const s of this.segments) {
      const dash = s.style.dash ? ` stroke-dasharray="${s.style.dash}"` : "";
      const cls = s.style.cls ?? "glyph";
      out.push(
        `<line class="${cls}" x1="${fmt(sx(s.x1))}" y1="${fmt(sy(s.y1))}" x2="${fmt(sx(s.x2))}" y2="${fmt(sy(s.y2))}" stroke="${s.style.color}" stroke-width="${fmt(s.style.width ?? 1.1, 1)}"${dash}/>`,
      );
    }
    if (this.title) {
      out.push(
        `<text x="${fmt(px + pw / 2)}" y="${fmt(py - 8)}" ${FONT} font-size="12" fill="#111111" text-anchor="middle">${esc(this.title)}</text>`,
      );
    }
    if (this.xlabel) {
      out.push(
        `<text x="${fmt(px + pw / 2)}" y="${fmt(py + ph + 32)}" ${FONT} font-size="11" fill="#111111" text-anchor="middle">${esc(this.xlabel)}</text>`,
      );
    }
    if (this.ylabel) {
      const cx = px - 38;
      const cy = py + ph / 2;
      out.push(
        `<text x="${fmt(cx)}" y="${fmt(cy)}" ${FONT} font-size="11" fill="#111111" text-anchor="middle" transform="rotate(-90 ${fmt(cx)} ${fmt(cy)})">${esc(this.ylabel)}</text>`,
      );
    }
    let ly = py + 14;
    for (const e of this.legend) {
      const lx = px + pw - 150;
      const dash = e.style.dash ? ` stroke-dasharray="${e.style.dash}"` : "";
      out.push(
        `<line class="legend-sample" x1="${fmt(lx)}" y1="${fmt(ly - 3.5)}" x2="${fmt(lx + 22)}" y2="${fmt(ly - 3.5)}" stroke="${e.style.color}" stroke-width="${fmt(e.style.width ?? 1.4, 1)}"${dash}/>`,
      );
      out.push(
        `<text x="${fmt(lx + 27)}" y="${fmt(ly)}" ${FONT} font-size="10" fill="#222222">${esc(e.label)}</text>`,
      );
      ly += 14;
    }
    return out.join("\n");
  }
}

/** Stack panels vertically into one SVG document. */
export function renderFigure(panels: Panel[], width = 760, panelHeight = 240): string {
  const mLeft = 64;
  const mRight = 18;
  const mTop = 30;
  const mBetween = 58;
  const mBottom = 48;
  const height = mTop + panels.length * panelHeight + (panels.length - 1) * mBetween + mBottom;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`);
  panels.forEach((panel, i) => {
    const py = mTop + i * (panelHeight + mBetween);
    parts.push(panel.render(mLeft, py, width - mLeft - mRight, panelHeight));
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
