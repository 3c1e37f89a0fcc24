/**
 * Figure renderers for the analysis pipeline's CSV artifacts.
 *
 * Presentation only: every number drawn is taken verbatim from the input CSV
 * (display clipping moves a point, never its value), and the echo list of a
 * render records exactly which cells were used so tests can verify that the
 * renderer introduces no numbers of its own.
 */

import { writeFileSync } from "node:fs";

import { FigureError, readCsv, requireColumns, requireRows, Table } from "./csv";
import {
  axes, DEFAULT_FRAME, el, esc, fmt, Frame, linearScale, logScale, Scale,
  svgDocument,
} from "./svg";

export type FigureKind =
  | "timeseries"
  | "scatter_gap"
  | "scatter_ratio"
  | "stacked_bars"
  | "subgroup_dots"
  | "sweep";

export const FIGURE_KINDS: FigureKind[] = [
  "timeseries", "scatter_gap", "scatter_ratio", "stacked_bars",
  "subgroup_dots", "sweep",
];

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  /** words to label on timeseries/scatter kinds (default: scatters label none) */
  highlight?: string[];
  /** display clipping for the scatter y-axis (ratio: 90, gap: 0.05) */
  clipY?: number;
  /** excess-ratio threshold line, log10(r) = intercept + slope * log10(p) */
  thresholdSlope?: number;
  thresholdIntercept?: number;
  /** excess-gap threshold line for scatter_gap */
  deltaMin?: number;
  width?: number;
  height?: number;
}

export interface EchoEntry {
  column: string;
  value: string;
}

export interface RenderResult {
  svg: string;
  echo: EchoEntry[];
}

const LABEL_COLORS: Record<string, string> = {
  content: "#3b6fb6",
  style: "#e8833a",
  ambiguous: "#8b6cb0",
  "": "#9a9a9a",
};

const SERIES_COLORS = ["#3b6fb6", "#e8833a", "#55a868", "#c44e52", "#8b6cb0",
                       "#937860", "#da8bc3", "#8c8c8c"];

const DEFAULT_SLOPE = -Math.log10(2) / 4;

function frameOf(spec: FigureSpec): Frame {
  return {
    ...DEFAULT_FRAME,
    width: spec.width ?? DEFAULT_FRAME.width,
    height: spec.height ?? DEFAULT_FRAME.height,
  };
}

function num(cell: string, column: string, context: string): number {
  const v = Number(cell);
  if (cell.trim() === "" || Number.isNaN(v)) {
    throw new FigureError(`non-numeric cell ${JSON.stringify(cell)} in column "${column}" of ${context}`);
  }
  return v;
}

export function render(spec: FigureSpec): RenderResult {
  const table = readCsv(spec.input);
  const result = renderTable(spec, table);
  writeFileSync(spec.output, result.svg, "utf-8");
  return result;
}

export function renderTable(spec: FigureSpec, table: Table): RenderResult {
  switch (spec.kind) {
    case "timeseries": return timeseries(spec, table);
    case "scatter_gap": return scatter(spec, table, "delta");
    case "scatter_ratio": return scatter(spec, table, "ratio");
    case "stacked_bars": return stackedBars(spec, table);
    case "subgroup_dots": return subgroupDots(spec, table);
    case "sweep": return sweep(spec, table);
    default:
      throw new FigureError(`unknown figure kind ${JSON.stringify(spec.kind)}`);
  }
}

// ---------------------------------------------------------------------------
// timeseries: word,year,p,cf  (one frequency line per word + counterfactual)
// ---------------------------------------------------------------------------

function timeseries(spec: FigureSpec, table: Table): RenderResult {
  const context = spec.input;
  const col = requireColumns(table, ["word", "year", "p", "cf"], context);
  requireRows(table, context);
  const echo: EchoEntry[] = [];
  const frame = frameOf(spec);

  interface Point { year: number; p: number; cf: number | null; }
  const byWord = new Map<string, Point[]>();
  for (const row of table.rows) {
    const word = row[col.word];
    const year = num(row[col.year], "year", context);
    const p = num(row[col.p], "p", context);
    echo.push({ column: "p", value: row[col.p] });
    let cf: number | null = null;
    if (row[col.cf] !== "") {
      cf = num(row[col.cf], "cf", context);
      echo.push({ column: "cf", value: row[col.cf] });
    }
    if (!byWord.has(word)) byWord.set(word, []);
    byWord.get(word)!.push({ year, p, cf });
  }

  const words = [...byWord.keys()];
  const wanted = spec.highlight?.length
    ? words.filter((w) => spec.highlight!.includes(w))
    : words;
  if (wanted.length === 0) throw new FigureError(`no data rows in ${context} match the highlight list`);
  const years = table.rows.map((r) => num(r[col.year], "year", context));
  const values = wanted.flatMap((w) => byWord.get(w)!.flatMap(
    (pt) => (pt.cf === null ? [pt.p] : [pt.p, pt.cf])));
  const x = linearScale(Math.min(...years), Math.max(...years),
                        frame.left, frame.width - frame.right);
  const y = linearScale(0, Math.max(...values) * 1.05 || 1,
                        frame.height - frame.bottom, frame.top);

  const body = axes(frame, x, y, "year", "fraction of documents");
  wanted.forEach((word, i) => {
    const pts = [...byWord.get(word)!].sort((a, b) => a.year - b.year);
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    body.push(polyline(pts.map((pt) => [x.map(pt.year), y.map(pt.p)]),
                       { class: "series-line", stroke: color }));
    const cfPts = pts.filter((pt) => pt.cf !== null);
    if (cfPts.length > 0) {
      body.push(polyline(cfPts.map((pt) => [x.map(pt.year), y.map(pt.cf!)]),
                         { class: "cf-line", stroke: "#111111",
                           "stroke-dasharray": "5 3" }));
    }
    const last = pts[pts.length - 1];
    body.push(el("text", {
      class: "series-label", x: x.map(last.year) - 4, y: y.map(last.p) - 5,
      "text-anchor": "end", "font-size": 10, fill: color,
    }, [], esc(word)));
  });
  return { svg: svgDocument(frame, body, "word frequency time series"), echo };
}

// ---------------------------------------------------------------------------
// scatter_gap / scatter_ratio over stats.csv
// ---------------------------------------------------------------------------

function scatter(spec: FigureSpec, table: Table, yColumn: "delta" | "ratio"): RenderResult {
  const context = spec.input;
  const col = requireColumns(table, ["word", "p", yColumn, "label"], context);
  requireRows(table, context);
  const echo: EchoEntry[] = [];
  const frame = frameOf(spec);
  const clip = spec.clipY ?? (yColumn === "ratio" ? 90 : 0.05);

  interface Dot { word: string; p: number; v: number; label: string; }
  const dots: Dot[] = [];
  for (const row of table.rows) {
    const p = num(row[col.p], "p", context);
    const v = num(row[col[yColumn]], yColumn, context);
    if (p <= 0 || v <= 0) continue; // log axes show positive excess only
    echo.push({ column: "p", value: row[col.p] });
    echo.push({ column: yColumn, value: row[col[yColumn]] });
    dots.push({ word: row[col.word], p, v, label: row[col.label] });
  }
  if (dots.length === 0) throw new FigureError(`no positive data to plot from ${context}`);

  const pMin = Math.min(...dots.map((d) => d.p));
  const pMax = Math.max(...dots.map((d) => d.p));
  const vMin = Math.min(...dots.map((d) => Math.min(d.v, clip)));
  const vMax = Math.max(...dots.map((d) => Math.min(d.v, clip)));
  const x = logScale(pMin / 1.5, Math.min(pMax * 1.5, 1.0),
                     frame.left, frame.width - frame.right);
  const y = logScale(vMin / 1.5, vMax * 1.5,
                     frame.height - frame.bottom, frame.top);

  const yLabel = yColumn === "ratio" ? "frequency ratio r" : "frequency gap delta";
  const body = axes(frame, x, y, "frequency p", yLabel);
  body.push(thresholdLine(spec, x, y, yColumn, frame));
  for (const dot of dots) {
    const display = Math.min(dot.v, clip);
    body.push(el("circle", {
      class: `dot dot-${dot.label || "unannotated"}`,
      cx: x.map(dot.p), cy: y.map(display), r: 2.4,
      fill: LABEL_COLORS[dot.label] ?? LABEL_COLORS[""],
      "fill-opacity": 0.75,
    }));
  }
  for (const word of spec.highlight ?? []) {
    const dot = dots.find((d) => d.word === word);
    if (!dot) continue;
    body.push(el("text", {
      class: "dot-label", x: x.map(dot.p) + 4, y: y.map(Math.min(dot.v, clip)) - 4,
      "font-size": 10, fill: "#222222",
    }, [], esc(word)));
  }
  const title = yColumn === "ratio" ? "excess frequency ratio" : "excess frequency gap";
  return { svg: svgDocument(frame, body, title), echo };
}

function thresholdLine(
  spec: FigureSpec,
  x: Scale,
  y: Scale,
  yColumn: "delta" | "ratio",
  frame: Frame,
): string {
  const [d0, d1] = x.domain;
  const points: Array<[number, number]> = [];
  if (yColumn === "ratio") {
    const slope = spec.thresholdSlope ?? DEFAULT_SLOPE;
    const intercept = spec.thresholdIntercept ?? 0;
    for (let i = 0; i <= 40; i++) {
      const p = Math.pow(10, Math.log10(d0) + (i / 40) * (Math.log10(d1) - Math.log10(d0)));
      const r = Math.pow(10, intercept + slope * Math.log10(p));
      const [y0, y1] = y.domain;
      if (r < y0 || r > y1) continue;
      points.push([x.map(p), y.map(r)]);
    }
  } else {
    const deltaMin = spec.deltaMin ?? 0.01;
    const [y0, y1] = y.domain;
    if (deltaMin >= y0 && deltaMin <= y1) {
      points.push([frame.left, y.map(deltaMin)]);
      points.push([frame.width - frame.right, y.map(deltaMin)]);
    }
  }
  if (points.length < 2) return "";
  return polyline(points, {
    class: "threshold-line", stroke: "#444444", "stroke-dasharray": "6 4",
  });
}

// ---------------------------------------------------------------------------
// stacked_bars: year,content,style,ambiguous,unannotated,representative_word
// ---------------------------------------------------------------------------

const BAR_SEGMENTS = ["content", "style", "ambiguous", "unannotated"] as const;

function stackedBars(spec: FigureSpec, table: Table): RenderResult {
  const context = spec.input;
  const col = requireColumns(
    table, ["year", ...BAR_SEGMENTS, "representative_word"], context);
  requireRows(table, context);
  const echo: EchoEntry[] = [];
  const frame = frameOf(spec);

  const rows = table.rows.map((row) => {
    const counts = BAR_SEGMENTS.map((seg) => {
      echo.push({ column: seg, value: row[col[seg]] });
      return num(row[col[seg]], seg, context);
    });
    return {
      year: row[col.year],
      counts,
      total: counts.reduce((a, b) => a + b, 0),
      rep: row[col.representative_word],
    };
  });
  const maxTotal = Math.max(...rows.map((r) => r.total), 1);
  const y = linearScale(0, maxTotal * 1.15, frame.height - frame.bottom, frame.top);
  const innerWidth = frame.width - frame.left - frame.right;
  const slot = innerWidth / rows.length;
  const barWidth = slot * 0.7;

  const body: string[] = [];
  const bottom = frame.height - frame.bottom;
  body.push(el("line", { class: "axis", x1: frame.left, y1: bottom,
                         x2: frame.width - frame.right, y2: bottom, stroke: "#333" }));
  for (const t of y.ticks()) {
    body.push(el("text", { class: "tick", x: frame.left - 7, y: y.map(t) + 3,
                           "text-anchor": "end", "font-size": 10 },
                 [], esc(String(t))));
    body.push(el("line", { x1: frame.left - 4, y1: y.map(t), x2: frame.left,
                           y2: y.map(t), stroke: "#333" }));
  }
  rows.forEach((row, i) => {
    const x0 = frame.left + slot * i + (slot - barWidth) / 2;
    let acc = 0;
    row.counts.forEach((count, s) => {
      if (count <= 0) { return; }
      const yTop = y.map(acc + count);
      const yBottom = y.map(acc);
      body.push(el("rect", {
        class: `bar-segment bar-${BAR_SEGMENTS[s]}`,
        x: x0, y: yTop, width: barWidth, height: yBottom - yTop,
        fill: LABEL_COLORS[BAR_SEGMENTS[s]] ?? LABEL_COLORS[""],
      }));
      acc += count;
    });
    body.push(el("text", { class: "tick", x: x0 + barWidth / 2, y: bottom + 14,
                           "text-anchor": "middle", "font-size": 10 },
                 [], esc(row.year)));
    if (row.rep) {
      body.push(el("text", {
        class: "bar-label", x: x0 + barWidth / 2, y: y.map(row.total) - 4,
        "text-anchor": "middle", "font-size": 9, fill: "#333333",
      }, [], esc(row.rep)));
    }
  });
  body.push(el("text", { class: "axis-label", x: 16,
                         y: (frame.top + bottom) / 2, "text-anchor": "middle",
                         "font-size": 12,
                         transform: `rotate(-90 16 ${fmt((frame.top + bottom) / 2)})` },
               [], "excess words"));
  return { svg: svgDocument(frame, body, "excess words per year"), echo };
}

// ---------------------------------------------------------------------------
// subgroup_dots: subgroup,delta_rare,delta_common,delta[,n_*]
// ---------------------------------------------------------------------------

function subgroupDots(spec: FigureSpec, table: Table): RenderResult {
  const context = spec.input;
  const col = requireColumns(table, ["subgroup", "delta_rare", "delta_common", "delta"],
                             context);
  requireRows(table, context);
  const echo: EchoEntry[] = [];
  const frame = frameOf(spec);
  frame.left = 150;

  const rows = table.rows.map((row) => {
    for (const c of ["delta_rare", "delta_common", "delta"]) {
      echo.push({ column: c, value: row[col[c]] });
    }
    return {
      name: row[col.subgroup],
      rare: num(row[col.delta_rare], "delta_rare", context),
      common: num(row[col.delta_common], "delta_common", context),
      delta: num(row[col.delta], "delta", context),
    };
  });
  const values = rows.flatMap((r) => [r.rare, r.common, r.delta, 0]);
  const x = linearScale(Math.min(...values) - 0.02, Math.max(...values) + 0.02,
                        frame.left, frame.width - frame.right);
  const rowHeight = (frame.height - frame.top - frame.bottom) / rows.length;

  const body: string[] = [];
  body.push(el("line", { class: "axis zero-line", x1: x.map(0), y1: frame.top,
                         x2: x.map(0), y2: frame.height - frame.bottom,
                         stroke: "#999999", "stroke-dasharray": "3 3" }));
  for (const t of x.ticks()) {
    body.push(el("text", { class: "tick", x: x.map(t),
                           y: frame.height - frame.bottom + 16,
                           "text-anchor": "middle", "font-size": 10 },
                 [], esc(String(Math.round(t * 1e6) / 1e6))));
  }
  rows.forEach((row, i) => {
    const cy = frame.top + rowHeight * (i + 0.5);
    body.push(el("line", { x1: frame.left, y1: cy, x2: frame.width - frame.right,
                           y2: cy, stroke: "#eeeeee" }));
    body.push(el("text", { class: "subgroup-label", x: frame.left - 8, y: cy + 3,
                           "text-anchor": "end", "font-size": 10 },
                 [], esc(row.name)));
    body.push(el("circle", { class: "dot dot-rare", cx: x.map(row.rare), cy,
                             r: 4, fill: "none", stroke: "#e8833a",
                             "stroke-width": 1.5 }));
    body.push(el("circle", { class: "dot dot-common", cx: x.map(row.common), cy,
                             r: 4, fill: "none", stroke: "#3b6fb6",
                             "stroke-width": 1.5 }));
    body.push(el("circle", { class: "dot dot-combined", cx: x.map(row.delta), cy,
                             r: 3.2, fill: "#222222" }));
  });
  body.push(el("text", { class: "axis-label",
                         x: (frame.left + frame.width - frame.right) / 2,
                         y: frame.height - 12, "text-anchor": "middle",
                         "font-size": 12 },
               [], "frequency gap"));
  return { svg: svgDocument(frame, body, "subgroup frequency gaps"), echo };
}

// ---------------------------------------------------------------------------
// sweep: threshold,n_words,P,Q,delta
// ---------------------------------------------------------------------------

function sweep(spec: FigureSpec, table: Table): RenderResult {
  const context = spec.input;
  const col = requireColumns(table, ["threshold", "P", "Q", "delta"], context);
  requireRows(table, context);
  const echo: EchoEntry[] = [];
  const frame = frameOf(spec);

  const rows = table.rows.map((row) => {
    for (const c of ["threshold", "P", "Q", "delta"]) {
      echo.push({ column: c, value: row[col[c]] });
    }
    return {
      t: num(row[col.threshold], "threshold", context),
      P: num(row[col.P], "P", context),
      Q: num(row[col.Q], "Q", context),
      delta: num(row[col.delta], "delta", context),
    };
  });
  const x = logScale(Math.min(...rows.map((r) => r.t)),
                     Math.max(...rows.map((r) => r.t)),
                     frame.left, frame.width - frame.right);
  const yMax = Math.max(...rows.flatMap((r) => [r.P, r.Q, r.delta]));
  const yMin = Math.min(0, ...rows.map((r) => r.delta));
  const y = linearScale(yMin, yMax * 1.1 || 1, frame.height - frame.bottom, frame.top);

  const body = axes(frame, x, y, "frequency threshold T", "fraction / gap");
  const series: Array<[keyof typeof rows[0], string]> = [
    ["P", "#3b6fb6"], ["Q", "#8c8c8c"], ["delta", "#e8833a"],
  ];
  series.forEach(([key, color]) => {
    body.push(polyline(rows.map((r) => [x.map(r.t), y.map(r[key] as number)]),
                       { class: "series-line", stroke: color }));
    const last = rows[rows.length - 1];
    body.push(el("text", { class: "series-label", x: frame.width - frame.right + 2,
                           y: y.map(last[key] as number) + 3, "font-size": 10,
                           fill: color }, [], esc(String(key))));
  });
  return { svg: svgDocument(frame, body, "rare-set threshold sweep"), echo };
}

// ---------------------------------------------------------------------------

function polyline(
  points: Array<[number, number]>,
  attrs: Record<string, string | number>,
): string {
  const d = points.map(([px, py]) => `${fmt(px)},${fmt(py)}`).join(" ");
  return el("polyline", { points: d, fill: "none", "stroke-width": 1.5, ...attrs });
}
