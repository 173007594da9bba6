// Force-directed layout. Deterministic: initial positions are derived from a
// hash of the node id and the simulation runs a fixed number of steps, so the
// same graph always lands in the same arrangement.

import type { GraphDocument } from './types';

export interface LayoutPoint {
  x: number;
  y: number;
}

export type Layout = Map<string, LayoutPoint>;

function hash(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return h >>> 0;
}

export function computeLayout(
  graph: GraphDocument,
  width = 960,
  height = 640,
  iterations = 220,
): Layout {
  const ids = graph.nodes.map((n) => n.id);
  const layout: Layout = new Map();
  if (ids.length === 0) return layout;

  const cx = width / 2;
  const cy = height / 2;
  const positions = ids.map((id) => {
    const h = hash(id);
    const angle = ((h % 3600) / 3600) * 2 * Math.PI;
    const radius = 60 + ((h >>> 12) % 1000) / 1000 * Math.min(width, height) * 0.35;
    return { x: cx + radius * Math.cos(angle), y: cy + radius * Math.sin(angle) };
  });
  const index = new Map(ids.map((id, i) => [id, i]));
  const springs: [number, number][] = [];
  for (const edge of graph.edges) {
    const a = index.get(edge.source);
    const b = index.get(edge.target);
    if (a !== undefined && b !== undefined && a !== b) springs.push([a, b]);
  }

  const n = ids.length;
  const idealLink = Math.min(width, height) / Math.max(3, Math.sqrt(n) * 1.8);
  const repulsion = idealLink * idealLink;

  for (let step = 0; step < iterations; step++) {
    const temperature = 0.08 * (1 - step / iterations) + 0.01;
    const fx = new Array<number>(n).fill(0);
    const fy = new Array<number>(n).fill(0);

    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = positions[i].x - positions[j].x;
        let dy = positions[i].y - positions[j].y;
        let dist2 = dx * dx + dy * dy;
        if (dist2 < 1) {
          // Deterministic nudge for coincident points.
          dx = ((hash(ids[i]) % 7) - 3) || 1;
          dy = ((hash(ids[j]) % 7) - 3) || -1;
          dist2 = dx * dx + dy * dy;
        }
        const force = repulsion / dist2;
        const dist = Math.sqrt(dist2);
        fx[i] += (dx / dist) * force;
        fy[i] += (dy / dist) * force;
        fx[j] -= (dx / dist) * force;
        fy[j] -= (dy / dist) * force;
      }
    }

    for (const [a, b] of springs) {
      const dx = positions[b].x - positions[a].x;
      const dy = positions[b].y - positions[a].y;
      const dist = Math.max(1, Math.hypot(dx, dy));
      const force = (dist - idealLink) * 0.08;
      fx[a] += (dx / dist) * force;
      fy[a] += (dy / dist) * force;
      fx[b] -= (dx / dist) * force;
      fy[b] -= (dy / dist) * force;
    }

    for (let i = 0; i < n; i++) {
      fx[i] += (cx - positions[i].x) * 0.02;
      fy[i] += (cy - positions[i].y) * 0.02;
      positions[i].x += fx[i] * temperature;
      positions[i].y += fy[i] * temperature;
      positions[i].x = Math.min(width - 20, Math.max(20, positions[i].x));
      positions[i].y = Math.min(height - 20, Math.max(20, positions[i].y));
    }
  }

  ids.forEach((id, i) => layout.set(id, positions[i]));
  return layout;
}

/** Positions for nodes a proposal would insert: ring them around the mean of
 * the elements they attach to, so previews appear next to their context. */
export function previewPositions(
  layout: Layout,
  anchors: string[],
  count: number,
  width = 960,
  height = 640,
): LayoutPoint[] {
  const known = anchors.map((id) => layout.get(id)).filter((p): p is LayoutPoint => !!p);
  const cx = known.length ? known.reduce((s, p) => s + p.x, 0) / known.length : width / 2;
  const cy = known.length ? known.reduce((s, p) => s + p.y, 0) / known.length : height / 2;
  const points: LayoutPoint[] = [];
  for (let i = 0; i < count; i++) {
    const angle = (i / Math.max(1, count)) * 2 * Math.PI;
    points.push({ x: cx + 46 * Math.cos(angle), y: cy + 46 * Math.sin(angle) });
  }
  return points;
}
