// SVG rendering of a scene. Falls back to a plain node list if anything in
// the layout/scene path throws, so a review is never blocked by drawing.

import { ROLE_COLORS, type Scene } from './scene';

const SVG_NS = 'http://www.w3.org/2000/svg';

export function renderScene(container: HTMLElement, scene: Scene,
                            width = 960, height = 640): void {
  container.textContent = '';
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${width} ${height}`);
  svg.setAttribute('class', 'graph-canvas');

  for (const edge of scene.edges) {
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', String(edge.from.x));
    line.setAttribute('y1', String(edge.from.y));
    line.setAttribute('x2', String(edge.to.x));
    line.setAttribute('y2', String(edge.to.y));
    line.setAttribute('stroke', ROLE_COLORS[edge.role]);
    line.setAttribute('stroke-width', edge.role === 'normal' ? '1.4' : '2.4');
    if (edge.kind === 'signal') line.setAttribute('stroke-dasharray', '5 3');
    if (edge.role === 'delete') line.setAttribute('stroke-dasharray', '7 4');
    if (edge.preview) line.setAttribute('data-preview', 'true');
    line.setAttribute('data-edge-id', edge.id);
    line.setAttribute('data-role', edge.role);
    svg.appendChild(line);
  }

  for (const node of scene.nodes) {
    const group = document.createElementNS(SVG_NS, 'g');
    group.setAttribute('data-node-id', node.id);
    group.setAttribute('data-role', node.role);
    if (node.preview) group.setAttribute('data-preview', 'true');

    const circle = document.createElementNS(SVG_NS, 'circle');
    circle.setAttribute('cx', String(node.x));
    circle.setAttribute('cy', String(node.y));
    circle.setAttribute('r', node.role === 'normal' ? '9' : '11');
    circle.setAttribute('fill', '#ffffff');
    circle.setAttribute('stroke', ROLE_COLORS[node.role]);
    circle.setAttribute('stroke-width', node.role === 'normal' ? '1.6' : '2.6');
    if (node.role === 'delete') circle.setAttribute('stroke-dasharray', '4 2');
    group.appendChild(circle);

    const label = document.createElementNS(SVG_NS, 'text');
    label.setAttribute('x', String(node.x));
    label.setAttribute('y', String(node.y - 14));
    label.setAttribute('text-anchor', 'middle');
    label.setAttribute('fill', ROLE_COLORS[node.role]);
    label.textContent = node.label;
    group.appendChild(label);

    const classLabel = document.createElementNS(SVG_NS, 'text');
    classLabel.setAttribute('x', String(node.x));
    classLabel.setAttribute('y', String(node.y + 24));
    classLabel.setAttribute('text-anchor', 'middle');
    classLabel.setAttribute('class', 'node-class');
    classLabel.textContent = node.cls;
    group.appendChild(classLabel);

    svg.appendChild(group);
  }

  container.appendChild(svg);
}

export function renderFallbackList(container: HTMLElement, scene: Scene): void {
  container.textContent = '';
  const list = document.createElement('ul');
  list.setAttribute('class', 'graph-fallback');
  for (const node of scene.nodes) {
    const item = document.createElement('li');
    item.textContent = `${node.label} (${node.cls})`;
    item.setAttribute('data-role', node.role);
    list.appendChild(item);
  }
  container.appendChild(list);
}
