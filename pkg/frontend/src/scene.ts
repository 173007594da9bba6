// Scene building: turns the session graph plus the selected proposal into a
// flat draw list. Roles drive the colors, following the marked-up drawing
// convention: insertions red, deletions blue, matched elements highlighted.

import { computeLayout, previewPositions, type Layout } from './layout';
import type { GraphDocument, Proposal } from './types';

export type ElementRole = 'normal' | 'matched' | 'insert' | 'delete';

export interface SceneNode {
  id: string;
  label: string;
  cls: string;
  x: number;
  y: number;
  role: ElementRole;
  preview: boolean;
}

export interface SceneEdge {
  id: string;
  from: { x: number; y: number };
  to: { x: number; y: number };
  kind: string;
  role: ElementRole;
  preview: boolean;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
}

export const ROLE_COLORS: Record<ElementRole, string> = {
  normal: '#3a3f4b',
  matched: '#b8860b',
  insert: '#d62828',
  delete: '#1d4ed8',
};

export function buildScene(
  graph: GraphDocument,
  selected: Proposal | null,
  highlighted: Proposal | null = null,
  layout?: Layout,
): Scene {
  const resolved = layout ?? computeLayout(graph);
  const matchedNodes = new Set<string>();
  const matchedEdges = new Set<string>();
  const emphasis = selected ?? highlighted;
  if (emphasis) {
    Object.values(emphasis.match.nodes).forEach((id) => matchedNodes.add(id));
    Object.values(emphasis.match.edges).forEach((id) => matchedEdges.add(id));
  }

  const deleteNodes = new Set(selected?.preview.deleteNodeIds ?? []);
  const deleteEdges = new Set(selected?.preview.deleteEdgeIds ?? []);

  const nodes: SceneNode[] = [];
  const points = new Map<string, { x: number; y: number }>();
  for (const node of graph.nodes) {
    const point = resolved.get(node.id) ?? { x: 0, y: 0 };
    points.set(node.id, point);
    const role: ElementRole = deleteNodes.has(node.id)
      ? 'delete'
      : matchedNodes.has(node.id)
        ? 'matched'
        : 'normal';
    nodes.push({
      id: node.id,
      label: node.tag && node.tag !== node.id ? `${node.id} [${node.tag}]` : node.id,
      cls: node.class,
      x: point.x,
      y: point.y,
      role,
      preview: false,
    });
  }

  // Insertions the selected proposal would make, overlaid in red.
  if (selected) {
    const anchorIds = Object.values(selected.match.nodes);
    const spots = previewPositions(resolved, anchorIds, selected.preview.insertNodes.length);
    selected.preview.insertNodes.forEach((insert, i) => {
      const point = spots[i];
      points.set(insert.id, point);
      nodes.push({
        id: insert.id,
        label: insert.id,
        cls: insert.class,
        x: point.x,
        y: point.y,
        role: 'insert',
        preview: true,
      });
    });
  }

  const edges: SceneEdge[] = [];
  for (const edge of graph.edges) {
    const from = points.get(edge.source);
    const to = points.get(edge.target);
    if (!from || !to) continue;
    const role: ElementRole = deleteEdges.has(edge.id)
      ? 'delete'
      : matchedEdges.has(edge.id)
        ? 'matched'
        : 'normal';
    edges.push({ id: edge.id, from, to, kind: edge.kind, role, preview: false });
  }

  if (selected) {
    for (const insert of selected.preview.insertEdges) {
      const from = points.get(insert.source);
      const to = points.get(insert.target);
      if (!from || !to) continue;
      edges.push({
        id: insert.id,
        from,
        to,
        kind: insert.kind,
        role: 'insert',
        preview: true,
      });
    }
  }

  return { nodes, edges };
}
