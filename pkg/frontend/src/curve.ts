// The FDR-versus-n chart for one job: median line, shaded 10-90 band, target
// line, and the n-hat marker once the job is done. Pure presentation; every
// plotted number comes from the job payload.

import type { CurvePointDto, JobDto } from "./types.js";

export const CHART = {
  width: 720,
  height: 420,
  left: 60,
  right: 20,
  top: 16,
  bottom: 46,
} as const;

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Scales {
  x(n: number): number;
  y(fdr: number): number;
  yMax: number;
}

export function makeScales(curve: CurvePointDto[], targetFdr: number, nHat: number | null): Scales {
  const ns = curve.map((pt) => pt.n);
  if (nHat !== null) ns.push(nHat);
  let nLo = Math.min(...ns);
  let nHi = Math.max(...ns);
  if (nHi === nLo) {
    nLo -= 1;
    nHi += 1;
  }
  const yMax = Math.max(...curve.map((pt) => pt.fdr90), targetFdr) * 1.05 || 1;
  const plotW = CHART.width - CHART.left - CHART.right;
  const plotH = CHART.height - CHART.top - CHART.bottom;
  return {
    x: (n) => CHART.left + ((n - nLo) / (nHi - nLo)) * plotW,
    y: (fdr) => CHART.top + plotH - (fdr / yMax) * plotH,
    yMax,
  };
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function polylinePoints(curve: CurvePointDto[], scales: Scales, pick: (pt: CurvePointDto) => number): string {
  return curve.map((pt) => `${scales.x(pt.n).toFixed(2)},${scales.y(pick(pt)).toFixed(2)}`).join(" ");
}

export function nearestPoint(curve: CurvePointDto[], scales: Scales, px: number): CurvePointDto {
  let best = curve[0];
  let bestDist = Infinity;
  for (const pt of curve) {
    const dist = Math.abs(scales.x(pt.n) - px);
    if (dist < bestDist) {
      bestDist = dist;
      best = pt;
    }
  }
  return best;
}

export function renderCurveView(container: HTMLElement, job: JobDto | null, targetFdr: number): void {
  container.textContent = "";
  container.classList.add("curve-view");

  if (job === null) {
    const placeholder = document.createElement("div");
    placeholder.className = "curve-placeholder";
    placeholder.textContent = "No run selected.";
    container.appendChild(placeholder);
    return;
  }

  if (job.state === "failed") {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = `Run failed: ${job.error ?? "unknown error"}`;
    container.appendChild(banner);
    return;
  }

  const curve = job.state === "done" && job.result ? job.result.curve : job.partial_curve;
  if (curve.length === 0) {
    const placeholder = document.createElement("div");
    placeholder.className = "curve-placeholder";
    placeholder.textContent = job.state === "queued" ? "Queued..." : "Waiting for the first grid point...";
    container.appendChild(placeholder);
    return;
  }

  const nHat = job.state === "done" && job.result ? job.result.n_hat : null;
  const scales = makeScales(curve, targetFdr, nHat);

  const svg = svgEl("svg");
  svg.setAttribute("viewBox", `0 0 ${CHART.width} ${CHART.height}`);
  svg.setAttribute("width", String(CHART.width));
  svg.setAttribute("height", String(CHART.height));
  svg.classList.add("fdr-chart");

  const band = svgEl("polygon");
  const upper = curve.map((pt) => `${scales.x(pt.n).toFixed(2)},${scales.y(pt.fdr90).toFixed(2)}`);
  const lower = [...curve].reverse().map((pt) => `${scales.x(pt.n).toFixed(2)},${scales.y(pt.fdr10).toFixed(2)}`);
  band.setAttribute("points", [...upper, ...lower].join(" "));
  band.setAttribute("class", "band");
  band.setAttribute("fill", "#f4c7c3");
  band.setAttribute("opacity", "0.6");
  svg.appendChild(band);

  const median = svgEl("polyline");
  median.setAttribute("points", polylinePoints(curve, scales, (pt) => pt.fdr50));
  median.setAttribute("class", "median-line");
  median.setAttribute("fill", "none");
  median.setAttribute("stroke", "#c0392b");
  median.setAttribute("stroke-width", "2");
  svg.appendChild(median);

  const target = svgEl("line");
  target.setAttribute("class", "target-line");
  target.setAttribute("x1", String(CHART.left));
  target.setAttribute("x2", String(CHART.width - CHART.right));
  target.setAttribute("y1", scales.y(targetFdr).toFixed(2));
  target.setAttribute("y2", scales.y(targetFdr).toFixed(2));
  target.setAttribute("stroke", "#333");
  target.setAttribute("stroke-dasharray", "7,5");
  svg.appendChild(target);

  if (nHat !== null) {
    const marker = svgEl("line");
    marker.setAttribute("class", "nhat-marker");
    marker.dataset.n = String(nHat);
    const x = scales.x(nHat).toFixed(2);
    marker.setAttribute("x1", x);
    marker.setAttribute("x2", x);
    marker.setAttribute("y1", String(CHART.top));
    marker.setAttribute("y2", String(CHART.height - CHART.bottom));
    marker.setAttribute("stroke", "#555");
    marker.setAttribute("stroke-dasharray", "3,3");
    svg.appendChild(marker);

    const label = svgEl("text");
    label.setAttribute("class", "nhat-label");
    label.setAttribute("x", x);
    label.setAttribute("y", String(CHART.top + 14));
    label.setAttribute("text-anchor", "middle");
    label.textContent = `n̂ = ${nHat}`;
    svg.appendChild(label);
  }

  const tooltip = document.createElement("div");
  tooltip.className = "curve-tooltip";
  tooltip.style.display = "none";

  svg.addEventListener("mousemove", (event: MouseEvent) => {
    const rect = svg.getBoundingClientRect();
    const px = event.clientX - rect.left;
    const pt = nearestPoint(curve, scales, px);
    tooltip.style.display = "block";
    tooltip.textContent = `n=${pt.n} (${pt.n1}+${pt.n2}): FDR ${pt.fdr50.toFixed(4)} [${pt.fdr10.toFixed(4)}, ${pt.fdr90.toFixed(4)}]`;
  });
  svg.addEventListener("mouseleave", () => {
    tooltip.style.display = "none";
  });

  container.appendChild(svg);
  container.appendChild(tooltip);

  const status = document.createElement("div");
  status.className = "curve-status";
  if (job.state === "running") {
    status.textContent = `Running: ${Math.round(job.progress * 100)}% (${curve.length} grid points so far)`;
  } else if (job.state === "done" && job.result) {
    status.textContent = nHat !== null
      ? `Estimate: n = ${nHat} (${job.result.n1_hat} + ${job.result.n2_hat} per group)`
      : `No estimate: ${job.result.no_estimate_reason ?? "did not converge"}`;
  }
  container.appendChild(status);
}
