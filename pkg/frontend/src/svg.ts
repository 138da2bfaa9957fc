/**
 * Deterministic SVG writer for the figure model: fixed style, fixed
 * number formatting, no ids or timestamps, so identical input renders
 * identical bytes.
 */
import { Axis, Figure, Series } from "./figure.js";

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function px(value: number): string {
  return value.toFixed(2);
}

function scalePos(axis: Axis, value: number, pixLo: number, pixHi: number): number {
  const [lo, hi] = axis.domain;
  const t =
    axis.scale === "log"
      ? (Math.log10(value) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo))
      : (value - lo) / (hi - lo);
  return pixLo + t * (pixHi - pixLo);
}

function marker(series: Series, cx: number, cy: number): string {
  const c = series.color;
  switch (series.marker) {
    case "circle":
      return `<circle cx="${px(cx)}" cy="${px(cy)}" r="3.5" fill="${c}"/>`;
    case "square":
      return `<rect x="${px(cx - 3)}" y="${px(cy - 3)}" width="6" height="6" fill="${c}"/>`;
    case "triangle":
      return `<path d="M${px(cx)} ${px(cy - 4)}L${px(cx + 3.8)} ${px(cy + 3)}L${px(cx - 3.8)} ${px(cy + 3)}Z" fill="${c}"/>`;
    case "diamond":
      return `<path d="M${px(cx)} ${px(cy - 4.5)}L${px(cx + 4.5)} ${px(cy)}L${px(cx)} ${px(cy + 4.5)}L${px(cx - 4.5)} ${px(cy)}Z" fill="${c}"/>`;
  }
}

export function renderSvg(fig: Figure): string {
  const { width, height, margin } = fig;
  const plotLeft = margin.left;
  const plotRight = width - margin.right;
  const plotTop = margin.top;
  const plotBottom = height - margin.bottom;
  const xPos = (v: number) => scalePos(fig.x, v, plotLeft, plotRight);
  const yPos = (v: number) => scalePos(fig.y, v, plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // grid and ticks
  for (const tick of fig.x.ticks) {
    const x = px(xPos(tick.value));
    parts.push(
      `<line x1="${x}" y1="${px(plotTop)}" x2="${x}" y2="${px(plotBottom)}" stroke="#e0e0e0" stroke-width="1"/>`,
      `<text x="${x}" y="${px(plotBottom + 18)}" text-anchor="middle" font-size="12" ${FONT}>${tick.text}</text>`,
    );
  }
  for (const tick of fig.y.ticks) {
    const y = px(yPos(tick.value));
    parts.push(
      `<line x1="${px(plotLeft)}" y1="${y}" x2="${px(plotRight)}" y2="${y}" stroke="#e0e0e0" stroke-width="1"/>`,
      `<text x="${px(plotLeft - 8)}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="12" ${FONT}>${tick.text}</text>`,
    );
  }

  // frame and axis labels
  parts.push(
    `<rect x="${px(plotLeft)}" y="${px(plotTop)}" width="${px(plotRight - plotLeft)}" height="${px(plotBottom - plotTop)}" fill="none" stroke="black" stroke-width="1"/>`,
    `<text x="${px((plotLeft + plotRight) / 2)}" y="${px(height - 14)}" text-anchor="middle" font-size="14" ${FONT}>${fig.x.label}</text>`,
    `<text x="18" y="${px((plotTop + plotBottom) / 2)}" text-anchor="middle" font-size="14" ${FONT} transform="rotate(-90 18 ${px((plotTop + plotBottom) / 2)})">${fig.y.label}</text>`,
  );

  // curves (log axes silently drop non-positive values)
  for (const series of fig.series) {
    const usable =
      fig.y.scale === "log" ? series.points.filter((p) => p.y > 0) : series.points;
    if (usable.length > 0) {
      const d = usable
        .map((p, i) => `${i === 0 ? "M" : "L"}${px(xPos(p.x))} ${px(yPos(p.y))}`)
        .join("");
      parts.push(
        `<path d="${d}" fill="none" stroke="${series.color}" stroke-width="1.8"/>`,
      );
      for (const p of usable) {
        parts.push(marker(series, xPos(p.x), yPos(p.y)));
      }
    }
  }

  // legend, top-right inside the frame
  const legendX = plotRight - 200;
  let legendY = plotTop + 16;
  for (const series of fig.series) {
    parts.push(
      `<line x1="${px(legendX)}" y1="${px(legendY - 4)}" x2="${px(legendX + 26)}" y2="${px(legendY - 4)}" stroke="${series.color}" stroke-width="1.8"/>`,
      marker(series, legendX + 13, legendY - 4),
      `<text x="${px(legendX + 32)}" y="${px(legendY)}" font-size="12" ${FONT}>${series.label}</text>`,
    );
    legendY += 18;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
