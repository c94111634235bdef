import type { NetworkResponse } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 720;
const HEIGHT = 480;
const PAD = 40;

export type EdgeClickHandler = (origin: string, destination: string) => void;

function projector(net: NetworkResponse): (lat: number, lon: number) => [number, number] {
  const lats = net.nodes.map((n) => n.lat);
  const lons = net.nodes.map((n) => n.lon);
  const latMin = Math.min(...lats);
  const latMax = Math.max(...lats);
  const lonMin = Math.min(...lons);
  const lonMax = Math.max(...lons);
  const latSpan = latMax - latMin || 1;
  const lonSpan = lonMax - lonMin || 1;
  return (lat, lon) => [
    PAD + ((lon - lonMin) / lonSpan) * (WIDTH - 2 * PAD),
    HEIGHT - PAD - ((lat - latMin) / latSpan) * (HEIGHT - 2 * PAD),
  ];
}

/**
 * Render airports as markers and routes as directed arcs whose thickness
 * scales with flight count. Clicking an arc preloads its route in the form.
 */
export function renderMap(
  container: HTMLElement,
  net: NetworkResponse,
  onEdgeClick: EdgeClickHandler,
): SVGSVGElement {
  container.replaceChildren();
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "network-map");

  if (net.nodes.length === 0) {
    const msg = document.createElementNS(SVG_NS, "text");
    msg.setAttribute("x", String(WIDTH / 2));
    msg.setAttribute("y", String(HEIGHT / 2));
    msg.setAttribute("text-anchor", "middle");
    msg.setAttribute("class", "map-empty");
    msg.textContent = "no airports in the network";
    svg.appendChild(msg);
    container.appendChild(svg);
    return svg;
  }

  const project = projector(net);
  const place = new Map<string, [number, number]>();
  for (const n of net.nodes) {
    place.set(n.code, project(n.lat, n.lon));
  }
  const maxWeight = Math.max(1, ...net.edges.map((e) => e.weight));

  for (const edge of net.edges) {
    const a = place.get(edge.src);
    const b = place.get(edge.dst);
    if (!a || !b) {
      continue;
    }
    // quadratic arc bowed to the right of travel, so opposite directions split
    const [x1, y1] = a;
    const [x2, y2] = b;
    const mx = (x1 + x2) / 2;
    const my = (y1 + y2) / 2;
    const dx = x2 - x1;
    const dy = y2 - y1;
    const norm = Math.hypot(dx, dy) || 1;
    const cx = mx - (dy / norm) * 18;
    const cy = my + (dx / norm) * 18;
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", `M ${x1} ${y1} Q ${cx} ${cy} ${x2} ${y2}`);
    path.setAttribute("class", "route-arc");
    path.setAttribute("fill", "none");
    path.setAttribute("stroke-width", String(1 + 5 * (edge.weight / maxWeight)));
    path.setAttribute("data-src", edge.src);
    path.setAttribute("data-dst", edge.dst);
    path.setAttribute("data-weight", String(edge.weight));
    path.addEventListener("click", () => onEdgeClick(edge.src, edge.dst));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${edge.src} -> ${edge.dst}: ${edge.weight} flights`;
    path.appendChild(title);
    svg.appendChild(path);
  }

  for (const n of net.nodes) {
    const [x, y] = place.get(n.code)!;
    const marker = document.createElementNS(SVG_NS, "circle");
    marker.setAttribute("cx", String(x));
    marker.setAttribute("cy", String(y));
    marker.setAttribute("r", "6");
    marker.setAttribute("class", "airport-marker");
    marker.setAttribute("data-code", n.code);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${n.code} (${n.lat.toFixed(2)}, ${n.lon.toFixed(2)})`;
    marker.appendChild(title);
    svg.appendChild(marker);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(x + 8));
    label.setAttribute("y", String(y - 8));
    label.setAttribute("class", "airport-label");
    label.textContent = n.code;
    svg.appendChild(label);
  }

  container.appendChild(svg);
  return svg;
}
