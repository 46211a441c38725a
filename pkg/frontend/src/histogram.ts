/** Canvas renderer for the 256-bin temperature histogram. */

import type { Histogram } from "./types";

export function drawHistogram(canvas: HTMLCanvasElement, data: Histogram): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#14161c";
  ctx.fillRect(0, 0, width, height);

  const bins = data.bins;
  const peak = Math.max(...bins, 1);
  const barWidth = width / bins.length;
  // log scale: fire pixels are sparse next to the background mode
  const scale = (count: number) => (count > 0 ? Math.log1p(count) / Math.log1p(peak) : 0);

  for (let i = 0; i < bins.length; i++) {
    const h = scale(bins[i]!) * (height - 14);
    const t = i / (bins.length - 1);
    ctx.fillStyle = `rgb(${Math.round(40 + 212 * t)}, ${Math.round(30 + 60 * t)}, ${Math.round(
      80 - 40 * t,
    )})`;
    ctx.fillRect(i * barWidth, height - 12 - h, Math.max(barWidth - 0.5, 0.5), h);
  }

  ctx.fillStyle = "#9aa3b2";
  ctx.font = "10px system-ui, sans-serif";
  ctx.textBaseline = "bottom";
  ctx.textAlign = "left";
  ctx.fillText(`${data.min_temp_c.toFixed(1)} degC`, 2, height - 1);
  ctx.textAlign = "right";
  ctx.fillText(`${data.max_temp_c.toFixed(1)} degC`, width - 2, height - 1);
}
