// Side-by-side comparison of completed scenarios: overlaid median curves with
// a legend plus a table of (scenario, n-hat, mean band width), and the
// one-click proportion sweep.

import { CHART, makeScales } from "./curve.js";
import type { ScenarioCard } from "./store.js";
import type { CurvePointDto } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const COLORS = ["#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d68910", "#16a085"];

export function meanBandWidth(curve: CurvePointDto[]): number {
  if (curve.length === 0) return 0;
  const total = curve.reduce((acc, pt) => acc + (pt.fdr90 - pt.fdr10), 0);
  return total / curve.length;
}

export function renderComparePanel(
  container: HTMLElement,
  cards: ScenarioCard[],
  onSweep: (cardId: string) => void,
): void {
  container.textContent = "";
  container.classList.add("compare-panel");

  const done = cards.filter((c) => c.job?.state === "done" && c.job.result);
  if (done.length < 2) {
    const note = document.createElement("div");
    note.className = "compare-disabled";
    note.textContent = "Comparison unlocks once two scenarios have results.";
    container.appendChild(note);
    return;
  }

  // overlay chart: shared scales across every completed curve
  const allPoints = done.flatMap((c) => c.job!.result!.curve);
  const targetFdr = done[0].config.target_fdr;
  const scales = makeScales(allPoints, targetFdr, null);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${CHART.width} ${CHART.height}`);
  svg.setAttribute("width", String(CHART.width));
  svg.setAttribute("height", String(CHART.height));
  svg.classList.add("compare-chart");

  done.forEach((card, i) => {
    const color = COLORS[i % COLORS.length];
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("class", "compare-median");
    line.dataset.card = card.id;
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", color);
    line.setAttribute("stroke-width", "2");
    line.setAttribute(
      "points",
      card.job!.result!.curve
        .map((pt) => `${scales.x(pt.n).toFixed(2)},${scales.y(pt.fdr50).toFixed(2)}`)
        .join(" "),
    );
    svg.appendChild(line);

    const legend = document.createElementNS(SVG_NS, "text");
    legend.setAttribute("class", "compare-legend");
    legend.setAttribute("x", String(CHART.width - CHART.right - 10));
    legend.setAttribute("y", String(CHART.top + 18 * (i + 1)));
    legend.setAttribute("text-anchor", "end");
    legend.setAttribute("fill", color);
    legend.textContent = card.label;
    svg.appendChild(legend);
  });
  container.appendChild(svg);

  const table = document.createElement("table");
  table.className = "compare-table";
  const head = document.createElement("tr");
  for (const title of ["Scenario", "n̂", "Mean band width"]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const card of done) {
    const result = card.job!.result!;
    const row = document.createElement("tr");
    row.dataset.card = card.id;

    const name = document.createElement("td");
    name.textContent = card.label;
    row.appendChild(name);

    const nHat = document.createElement("td");
    nHat.className = "nhat-cell";
    nHat.textContent = result.n_hat === null ? "-" : String(result.n_hat);
    row.appendChild(nHat);

    const width = document.createElement("td");
    width.textContent = meanBandWidth(result.curve).toFixed(4);
    row.appendChild(width);

    table.appendChild(row);
  }
  container.appendChild(table);

  const sweep = document.createElement("button");
  sweep.className = "sweep-button";
  sweep.textContent = "Sweep proportion (m = 10% / 20% / 30%)";
  sweep.addEventListener("click", () => onSweep(done[0].id));
  container.appendChild(sweep);
}
