const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 640;
const HEIGHT = 320;
const PAD = 48;

export interface ChartPoint {
  x: number;
  y: number;
}

/**
 * Minimal SVG line chart of probability vs a swept field. One circle per
 * grid point; each carries its data values so tests (and tooltips) can read
 * exactly what the service returned.
 */
export function renderLineChart(
  container: HTMLElement,
  points: ChartPoint[],
  xLabel: string,
): SVGSVGElement {
  container.replaceChildren();
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "sweep-chart");
  container.appendChild(svg);
  if (points.length === 0) {
    return svg;
  }

  const xs = points.map((p) => p.x);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xSpan = xMax - xMin || 1;
  // probability axis is always [0, 1]: flat responses render flat
  const toPx = (p: ChartPoint): [number, number] => [
    PAD + ((p.x - xMin) / xSpan) * (WIDTH - 2 * PAD),
    HEIGHT - PAD - p.y * (HEIGHT - 2 * PAD),
  ];

  const axis = document.createElementNS(SVG_NS, "path");
  axis.setAttribute(
    "d",
    `M ${PAD} ${PAD} L ${PAD} ${HEIGHT - PAD} L ${WIDTH - PAD} ${HEIGHT - PAD}`,
  );
  axis.setAttribute("class", "chart-axis");
  axis.setAttribute("fill", "none");
  svg.appendChild(axis);

  const caption = document.createElementNS(SVG_NS, "text");
  caption.setAttribute("x", String(WIDTH / 2));
  caption.setAttribute("y", String(HEIGHT - 10));
  caption.setAttribute("text-anchor", "middle");
  caption.setAttribute("class", "chart-label");
  caption.textContent = `holding probability vs ${xLabel}`;
  svg.appendChild(caption);

  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    points.map((p) => toPx(p).join(",")).join(" "),
  );
  line.setAttribute("class", "chart-line");
  line.setAttribute("fill", "none");
  svg.appendChild(line);

  for (const p of points) {
    const [px, py] = toPx(p);
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(px));
    dot.setAttribute("cy", String(py));
    dot.setAttribute("r", "3");
    dot.setAttribute("class", "chart-point");
    dot.setAttribute("data-x", String(p.x));
    dot.setAttribute("data-y", String(p.y));
    svg.appendChild(dot);
  }
  return svg;
}
