// Minimal hand-rolled service payloads for unit tests. The shapes mirror the
// review service; the e2e test exercises the real thing.

import type { GraphDocument, Proposal, SessionState } from '../src/types';

export function smallGraph(): GraphDocument {
  return {
    formatVersion: '1',
    metadata: { title: 'unit test plant' },
    nodes: [
      { id: 'V1', class: 'ButterflyValve', attributes: {} },
      { id: 'P1', class: 'CentrifugalPump', attributes: {} },
      { id: 'E1', class: 'HeatExchanger', attributes: {} },
    ],
    edges: [
      { id: 'e1', source: 'V1', target: 'P1', kind: 'pipe', attributes: {} },
      { id: 'e2', source: 'P1', target: 'E1', kind: 'pipe', attributes: {} },
    ],
  };
}

export function checkValveProposal(): Proposal {
  return {
    id: 'abc123',
    fingerprint: '19::E1+P1',
    ruleId: '19',
    description: "Install a check valve on a pump's discharge line to avoid backflow.",
    explanation: 'Backflow is dangerous to the pump because the pump is designed for one-way flow.',
    recommendation: 'suggested',
    missingComponent: true,
    milestone: 'issue for design',
    match: { nodes: { pump: 'P1', x: 'E1' }, edges: { pump_x: 'e2' } },
    preview: {
      insertNodes: [{ id: '19:CheckValve:1', class: 'CheckValve' }],
      insertEdges: [
        { id: '19:pump_cv:1', source: 'P1', target: '19:CheckValve:1', kind: 'pipe' },
        { id: '19:cv_x:1', source: '19:CheckValve:1', target: 'E1', kind: 'pipe' },
      ],
      deleteNodeIds: [],
      deleteEdgeIds: ['e2'],
    },
    delta: { nodes: 1, edges: 1 },
  };
}

export function sessionState(proposals: Proposal[]): SessionState {
  return {
    sessionId: 's-unit',
    graph: smallGraph(),
    proposals,
    journal: [],
  };
}
