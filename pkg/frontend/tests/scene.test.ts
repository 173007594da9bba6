import { describe, expect, it } from 'vitest';

import { computeLayout } from '../src/layout';
import { buildScene, ROLE_COLORS } from '../src/scene';
import { checkValveProposal, smallGraph } from './fixtures';

describe('buildScene', () => {
  it('renders every graph node with a position', () => {
    const graph = smallGraph();
    const scene = buildScene(graph, null);
    expect(scene.nodes).toHaveLength(3);
    for (const node of scene.nodes) {
      expect(Number.isFinite(node.x)).toBe(true);
      expect(Number.isFinite(node.y)).toBe(true);
      expect(node.role).toBe('normal');
    }
    expect(scene.edges).toHaveLength(2);
  });

  it('empty graph produces an empty scene without errors', () => {
    const scene = buildScene(
      { formatVersion: '1', metadata: {}, nodes: [], edges: [] },
      null,
    );
    expect(scene.nodes).toHaveLength(0);
    expect(scene.edges).toHaveLength(0);
  });

  it('selected proposal overlays insertions in red and deletions in blue', () => {
    const scene = buildScene(smallGraph(), checkValveProposal());

    const previewNode = scene.nodes.find((n) => n.id === '19:CheckValve:1');
    expect(previewNode).toBeDefined();
    expect(previewNode!.role).toBe('insert');
    expect(previewNode!.preview).toBe(true);
    expect(ROLE_COLORS[previewNode!.role]).toBe('#d62828');

    const deleted = scene.edges.find((e) => e.id === 'e2');
    expect(deleted!.role).toBe('delete');
    expect(ROLE_COLORS[deleted!.role]).toBe('#1d4ed8');

    const inserted = scene.edges.filter((e) => e.role === 'insert');
    expect(inserted.map((e) => e.id).sort()).toEqual(['19:cv_x:1', '19:pump_cv:1']);

    // The proposal's one red node and one blue edge, exactly.
    expect(scene.nodes.filter((n) => n.role === 'insert')).toHaveLength(1);
    expect(scene.edges.filter((e) => e.role === 'delete')).toHaveLength(1);
  });

  it('matched elements are highlighted without being recolored red or blue', () => {
    const scene = buildScene(smallGraph(), checkValveProposal());
    const pump = scene.nodes.find((n) => n.id === 'P1');
    expect(pump!.role).toBe('matched');
  });

  it('no colors without a selection', () => {
    const scene = buildScene(smallGraph(), null);
    expect(scene.nodes.every((n) => n.role === 'normal')).toBe(true);
    expect(scene.edges.every((e) => e.role === 'normal')).toBe(true);
  });
});

describe('computeLayout', () => {
  it('is deterministic for the same graph', () => {
    const graph = smallGraph();
    const a = computeLayout(graph);
    const b = computeLayout(graph);
    expect(a).toEqual(b);
  });

  it('keeps nodes inside the viewport and apart', () => {
    const graph = smallGraph();
    const layout = computeLayout(graph, 400, 300);
    const points = [...layout.values()];
    for (const p of points) {
      expect(p.x).toBeGreaterThanOrEqual(20);
      expect(p.x).toBeLessThanOrEqual(380);
      expect(p.y).toBeGreaterThanOrEqual(20);
      expect(p.y).toBeLessThanOrEqual(280);
    }
    for (let i = 0; i < points.length; i++) {
      for (let j = i + 1; j < points.length; j++) {
        const dist = Math.hypot(points[i].x - points[j].x, points[i].y - points[j].y);
        expect(dist).toBeGreaterThan(5);
      }
    }
  });
});
