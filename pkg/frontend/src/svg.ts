/** SVG string assembly with deterministic number formatting. */

export function fmt(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string[] = [],
  content = "",
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(String(v))}"`)
    .join(" ");
  const open = parts ? `<${tag} ${parts}` : `<${tag}`;
  if (children.length === 0 && content === "") return `${open}/>`;
  return `${open}>${content}${children.join("")}</${tag}>`;
}

export interface Scale {
  map(value: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): Scale {
  const span = d1 - d0 || 1;
  return {
    domain: [d0, d1],
    map: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    ticks: () => {
      const raw = span / 5;
      const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(raw) || 1)));
      const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= 6) ?? mag * 10;
      const out: number[] = [];
      for (let t = Math.ceil(d0 / step) * step; t <= d1 + step * 1e-9; t += step) {
        out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
      }
      return out;
    },
  };
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs positive domain");
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  return {
    domain: [d0, d1],
    map: (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
    ticks: () => {
      const out: number[] = [];
      for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
        out.push(Math.pow(10, e));
      }
      return out.length >= 2 ? out : [d0, d1];
    },
  };
}

export function tickLabel(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    const e = Math.floor(Math.log10(Math.abs(value)));
    const m = value / Math.pow(10, e);
    return `${fmt(m)}e${e}`;
  }
  return String(Math.round(value * 1e6) / 1e6);
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = {
  width: 640,
  height: 420,
  left: 70,
  right: 20,
  top: 30,
  bottom: 50,
};

export function axes(
  frame: Frame,
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
): string[] {
  const parts: string[] = [];
  const bottom = frame.height - frame.bottom;
  parts.push(el("line", {
    class: "axis", x1: frame.left, y1: bottom,
    x2: frame.width - frame.right, y2: bottom, stroke: "#333",
  }));
  parts.push(el("line", {
    class: "axis", x1: frame.left, y1: frame.top,
    x2: frame.left, y2: bottom, stroke: "#333",
  }));
  for (const t of x.ticks()) {
    const px = x.map(t);
    parts.push(el("line", { x1: px, y1: bottom, x2: px, y2: bottom + 4, stroke: "#333" }));
    parts.push(el("text", {
      class: "tick", x: px, y: bottom + 16, "text-anchor": "middle",
      "font-size": 10,
    }, [], esc(tickLabel(t))));
  }
  for (const t of y.ticks()) {
    const py = y.map(t);
    parts.push(el("line", { x1: frame.left - 4, y1: py, x2: frame.left, y2: py, stroke: "#333" }));
    parts.push(el("text", {
      class: "tick", x: frame.left - 7, y: py + 3, "text-anchor": "end",
      "font-size": 10,
    }, [], esc(tickLabel(t))));
  }
  parts.push(el("text", {
    class: "axis-label", x: (frame.left + frame.width - frame.right) / 2,
    y: frame.height - 12, "text-anchor": "middle", "font-size": 12,
  }, [], esc(xLabel)));
  parts.push(el("text", {
    class: "axis-label", x: 16, y: (frame.top + frame.height - frame.bottom) / 2,
    "text-anchor": "middle", "font-size": 12,
    transform: `rotate(-90 16 ${fmt((frame.top + frame.height - frame.bottom) / 2)})`,
  }, [], esc(yLabel)));
  return parts;
}

export function svgDocument(frame: Frame, body: string[], title: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`,
    el("title", {}, [], esc(title)),
    el("rect", { x: 0, y: 0, width: frame.width, height: frame.height, fill: "#ffffff" }),
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
