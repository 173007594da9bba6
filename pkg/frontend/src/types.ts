// Wire types mirroring the review service JSON. The client renders these
// verbatim and performs no rule evaluation of its own.

export type Scalar = string | number | boolean;

export interface GraphNode {
  id: string;
  class: string;
  tag?: string;
  attributes: Record<string, Scalar>;
}

export interface GraphEdge {
  id: string;
  source: string;
  target: string;
  kind: 'pipe' | 'signal';
  attributes: Record<string, Scalar>;
}

export interface GraphDocument {
  formatVersion: string;
  metadata: Record<string, Scalar>;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export type Recommendation = 'mandatory' | 'suggested' | 'consideration';

export interface ProposalPreview {
  insertNodes: { id: string; class: string }[];
  insertEdges: { id: string; source: string; target: string; kind: string }[];
  deleteNodeIds: string[];
  deleteEdgeIds: string[];
}

export interface Proposal {
  id: string;
  fingerprint: string;
  ruleId: string;
  description: string;
  explanation: string;
  recommendation: Recommendation;
  missingComponent: boolean;
  milestone: string;
  match: { nodes: Record<string, string>; edges: Record<string, string> };
  preview: ProposalPreview;
  delta: { nodes: number; edges: number };
}

export interface JournalEntry {
  seq: number;
  decision: 'accepted' | 'rejected';
  proposalId: string;
  ruleId: string;
  fingerprint: string;
  timestamp: string;
}

export interface SessionState {
  sessionId: string;
  graph: GraphDocument;
  proposals: Proposal[];
  journal: JournalEntry[];
}

export interface RuleInfo {
  id: string;
  order: number;
  milestone: string;
  description: string;
  explanation: string;
  recommendation: Recommendation;
  missingComponent: boolean;
  source: string;
}

export interface ApiError {
  error: string;
  location?: string;
}
