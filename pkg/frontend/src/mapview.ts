/**
 * World map view model and SVG renderer.
 *
 * Coordinates map linearly from meters to pixels (the simulated plane is
 * abstract, no projection). Zones are drawn as the union of their access
 * points' coverage disks, tinted per zone; the monitored zone gets a
 * saturated fill and a strong outline. Users are class-styled markers:
 * squares for stationary, circles for low velocity, triangles for high.
 */

import type { UserClass, WorldState } from "./api.js";

export interface MapTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function fitTransform(widthM: number, heightM: number, viewW: number, viewH: number, margin = 14): MapTransform {
  const scale = Math.min((viewW - 2 * margin) / widthM, (viewH - 2 * margin) / heightM);
  return { scale, offsetX: margin, offsetY: margin };
}

export function toPixel(t: MapTransform, xM: number, yM: number): Point {
  return { x: t.offsetX + xM * t.scale, y: t.offsetY + yM * t.scale };
}

interface Point {
  x: number;
  y: number;
}

export interface ApCircle {
  apId: string;
  zoneId: string;
  tech: string;
  monitored: boolean;
  cx: number;
  cy: number;
  r: number;
  colorIndex: number;
}

export interface UserMarker {
  address: string;
  userClass: UserClass;
  x: number;
  y: number;
  associated: boolean;
  inMonitoredZone: boolean;
}

export interface MapModel {
  viewW: number;
  viewH: number;
  mapW: number;
  mapH: number;
  frame: { x: number; y: number; w: number; h: number };
  aps: ApCircle[];
  markers: UserMarker[];
  zoneIds: string[];
}

export function buildMapModel(state: WorldState, monitoredZone: string, viewW = 560, viewH = 560): MapModel {
  const t = fitTransform(state.map.width_m, state.map.height_m, viewW, viewH);
  const zoneIds = state.zones.map((z) => z.zoneId);
  const aps: ApCircle[] = [];
  state.zones.forEach((zone, index) => {
    for (const ap of zone.accessPoints) {
      const c = toPixel(t, ap.x_m, ap.y_m);
      aps.push({
        apId: ap.apId,
        zoneId: zone.zoneId,
        tech: ap.tech,
        monitored: zone.zoneId === monitoredZone,
        cx: c.x,
        cy: c.y,
        r: ap.radius_m * t.scale,
        colorIndex: index,
      });
    }
  });
  const markers: UserMarker[] = state.users.map((u) => {
    const p = toPixel(t, u.x_m, u.y_m);
    return {
      address: u.address,
      userClass: u.userClass,
      x: p.x,
      y: p.y,
      associated: u.accessPointId !== null,
      inMonitoredZone: u.zoneId === monitoredZone,
    };
  });
  const origin = toPixel(t, 0, 0);
  const corner = toPixel(t, state.map.width_m, state.map.height_m);
  return {
    viewW,
    viewH,
    mapW: state.map.width_m,
    mapH: state.map.height_m,
    frame: { x: origin.x, y: origin.y, w: corner.x - origin.x, h: corner.y - origin.y },
    aps,
    markers,
    zoneIds,
  };
}

export const ZONE_PALETTE = ["#4e79a7", "#59a14f", "#e15759", "#b07aa1", "#f28e2b", "#76b7b2"];
export const CLASS_COLORS: Record<UserClass, string> = {
  stationary: "#9aa0a6",
  low_velocity: "#4e79a7",
  high_velocity: "#e15759",
};

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function markerNode(m: UserMarker): SVGElement {
  const color = CLASS_COLORS[m.userClass];
  const size = 5;
  let node: SVGElement;
  if (m.userClass === "stationary") {
    node = svgEl("rect", { x: m.x - size, y: m.y - size, width: 2 * size, height: 2 * size });
  } else if (m.userClass === "low_velocity") {
    node = svgEl("circle", { cx: m.x, cy: m.y, r: size });
  } else {
    const pts = `${m.x},${m.y - size} ${m.x - size},${m.y + size} ${m.x + size},${m.y + size}`;
    node = svgEl("polygon", { points: pts });
  }
  node.setAttribute("fill", color);
  node.setAttribute("stroke", m.inMonitoredZone ? "#111" : "#fff");
  node.setAttribute("stroke-width", m.inMonitoredZone ? "2" : "1");
  node.setAttribute("opacity", m.associated ? "1" : "0.45");
  node.setAttribute("data-marker", m.address);
  const title = svgEl("title", {});
  title.textContent = `${m.address} (${m.userClass})`;
  node.appendChild(title);
  return node;
}

export function renderMap(svg: SVGSVGElement, model: MapModel): void {
  svg.setAttribute("viewBox", `0 0 ${model.viewW} ${model.viewH}`);
  svg.replaceChildren();
  svg.appendChild(
    svgEl("rect", {
      x: model.frame.x,
      y: model.frame.y,
      width: model.frame.w,
      height: model.frame.h,
      fill: "#fdfdfd",
      stroke: "#666",
      "stroke-width": 1,
    }),
  );
  for (const ap of model.aps) {
    const color = ZONE_PALETTE[ap.colorIndex % ZONE_PALETTE.length];
    const disk = svgEl("circle", {
      cx: ap.cx,
      cy: ap.cy,
      r: ap.r,
      fill: color,
      "fill-opacity": ap.monitored ? 0.28 : 0.12,
      stroke: color,
      "stroke-width": ap.monitored ? 2.5 : 1,
    });
    if (ap.monitored) disk.setAttribute("stroke-dasharray", "none");
    svg.appendChild(disk);
    svg.appendChild(svgEl("circle", { cx: ap.cx, cy: ap.cy, r: 3, fill: color }));
    const label = svgEl("text", { x: ap.cx + 6, y: ap.cy - 6, "font-size": 11, fill: "#333" });
    label.textContent = `${ap.apId} (${ap.zoneId}, ${ap.tech})`;
    svg.appendChild(label);
  }
  for (const m of model.markers) svg.appendChild(markerNode(m));
}
