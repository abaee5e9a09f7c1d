/** Render sweep rows as a deterministic SVG line chart with error bars. */

import { ResultRow, SchemaError, X_FIELDS, XField } from "./csv.js";
import { linearScale, logScale, tickLabel } from "./scale.js";

export interface FigureSpec {
  xField: XField;
  logX: boolean;
  schemes: string[] | null; // null = every scheme present, in fixed order
  title: string;
}

export class EmptySelectionError extends Error {}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 64, right: 180, top: 40, bottom: 52 };

const SCHEME_ORDER = ["TIN", "SD", "SND", "RS"];
const SCHEME_COLOR: Record<string, string> = {
  TIN: "#1f77b4",
  SD: "#2ca02c",
  SND: "#ff7f0e",
  RS: "#d62728",
};
const FALLBACK_COLORS = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

const X_LABEL: Record<XField, string> = {
  M: "BS antennas",
  kappa: "correlation magnitude",
  K: "users per cell",
  sigma_shadow: "shadowing std dev (dB)",
};

function fmt(value: number): string {
  return String(Number(value.toPrecision(12)));
}

function schemeOrder(schemes: Iterable<string>): string[] {
  const present = [...new Set(schemes)];
  const known = SCHEME_ORDER.filter((s) => present.includes(s));
  const unknown = present.filter((s) => !SCHEME_ORDER.includes(s)).sort();
  return [...known, ...unknown];
}

function colorFor(scheme: string, index: number): string {
  return SCHEME_COLOR[scheme] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length];
}

export function renderFigure(rows: ResultRow[], spec: FigureSpec): string {
  if (!X_FIELDS.includes(spec.xField)) {
    throw new SchemaError(`unknown x field ${spec.xField}; choose from ${X_FIELDS.join(", ")}`);
  }
  let selected = rows;
  if (spec.schemes !== null) {
    const wanted = new Set(spec.schemes);
    selected = rows.filter((r) => wanted.has(r.scheme));
  }
  if (selected.length === 0) {
    throw new EmptySelectionError(
      "no rows left after the scheme filter; refusing to render an empty figure",
    );
  }

  const xs = selected.map((r) => r[spec.xField]);
  const los = selected.map((r) => r.mean_sym_se - r.stderr);
  const his = selected.map((r) => r.mean_sym_se + r.stderr);
  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;

  const xScale = spec.logX
    ? logScale(Math.min(...xs), Math.max(...xs), plotLeft, plotRight)
    : linearScale(Math.min(...xs), Math.max(...xs), plotLeft, plotRight);
  const yScale = linearScale(Math.min(0, ...los), Math.max(...his), plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="22" text-anchor="middle" font-size="15">` +
      `${escapeXml(spec.title)}</text>`,
  );

  // axes, grid and ticks
  for (const tick of xScale.ticks) {
    const x = fmt(xScale(tick));
    parts.push(
      `<line x1="${x}" y1="${plotTop}" x2="${x}" y2="${plotBottom}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${plotBottom + 18}" text-anchor="middle" font-size="11">` +
        `${tickLabel(tick, spec.logX)}</text>`,
    );
  }
  for (const tick of yScale.ticks) {
    const y = fmt(yScale(tick));
    parts.push(
      `<line x1="${plotLeft}" y1="${y}" x2="${plotRight}" y2="${y}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${plotLeft - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${tickLabel(tick, false)}</text>`,
    );
  }
  parts.push(
    `<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" ` +
      `height="${plotBottom - plotTop}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="${HEIGHT - 14}" text-anchor="middle" ` +
      `font-size="13">${X_LABEL[spec.xField]}</text>`,
  );
  parts.push(
    `<text x="18" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 18 ${(plotTop + plotBottom) / 2})">mean symmetric SE (bits/s/Hz)</text>`,
  );

  const order = schemeOrder(selected.map((r) => r.scheme));
  order.forEach((scheme, idx) => {
    const color = colorFor(scheme, idx);
    const data = selected
      .filter((r) => r.scheme === scheme)
      .slice()
      .sort((a, b) => a[spec.xField] - b[spec.xField]);
    const pts = data.map((r) => [xScale(r[spec.xField]), yScale(r.mean_sym_se)] as const);
    if (pts.length > 1) {
      const path = pts.map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)},${fmt(y)}`).join(" ");
      parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="2"/>`);
    }
    data.forEach((row, i) => {
      const [x, y] = pts[i];
      if (row.stderr > 0) {
        const yLo = yScale(row.mean_sym_se - row.stderr);
        const yHi = yScale(row.mean_sym_se + row.stderr);
        parts.push(
          `<line x1="${fmt(x)}" y1="${fmt(yLo)}" x2="${fmt(x)}" y2="${fmt(yHi)}" ` +
            `stroke="${color}" stroke-width="1.5"/>`,
        );
        for (const yc of [yLo, yHi]) {
          parts.push(
            `<line x1="${fmt(x - 4)}" y1="${fmt(yc)}" x2="${fmt(x + 4)}" y2="${fmt(yc)}" ` +
              `stroke="${color}" stroke-width="1.5"/>`,
          );
        }
      }
      // the marker's tooltip echoes the CSV value verbatim
      parts.push(
        `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="3.5" fill="${color}">` +
          `<title>${escapeXml(`${scheme} ${spec.xField}=${row.raw[spec.xField]} ` +
            `mean_sym_se=${row.raw.mean_sym_se}`)}</title></circle>`,
      );
    });
  });

  // legend with the final y value of each curve, verbatim from the file
  const legendX = plotRight + 14;
  parts.push(
    `<text x="${legendX}" y="${plotTop + 4}" font-size="12" font-weight="bold">scheme / last value</text>`,
  );
  order.forEach((scheme, idx) => {
    const color = colorFor(scheme, idx);
    const data = selected
      .filter((r) => r.scheme === scheme)
      .slice()
      .sort((a, b) => a[spec.xField] - b[spec.xField]);
    const last = data[data.length - 1];
    const y = plotTop + 24 + idx * 20;
    parts.push(
      `<line x1="${legendX}" y1="${y - 4}" x2="${legendX + 22}" y2="${y - 4}" ` +
        `stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${legendX + 28}" y="${y}" font-size="11">` +
        `${escapeXml(scheme)}: ${escapeXml(last.raw.mean_sym_se)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
