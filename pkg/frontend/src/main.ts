import { ReviewApi } from './api';
import { computeLayout, type Layout } from './layout';
import { renderFallbackList, renderScene } from './render';
import { buildScene } from './scene';
import { ReviewStore, type StoreState } from './store';
import { renderJournal, renderProposalList, renderStatus } from './ui';

const api = new ReviewApi('');
const store = new ReviewStore(api);

const canvasHost = document.getElementById('canvas')!;
const proposalHost = document.getElementById('proposals')!;
const journalHost = document.getElementById('journal')!;
const statusHost = document.getElementById('status')!;
const fileInput = document.getElementById('graph-file') as HTMLInputElement;

let layoutCache: { key: string; layout: Layout } | null = null;

function graphKey(state: StoreState): string {
  const graph = state.session?.graph;
  if (!graph) return '';
  return graph.nodes.map((n) => n.id).join('|') + '#' +
    graph.edges.map((e) => e.id).join('|');
}

function draw(state: StoreState): void {
  renderStatus(statusHost, state);
  renderProposalList(proposalHost, state, {
    onSelect: (id) => store.select(id),
    onDecide: (id, decision) => {
      void store.decide(id, decision);
    },
  });
  renderJournal(journalHost, state.session?.journal ?? []);

  const graph = state.session?.graph;
  if (!graph) {
    canvasHost.textContent = '';
    return;
  }
  const selected =
    state.session?.proposals.find((p) => p.id === state.selectedProposalId) ?? null;
  try {
    const key = graphKey(state);
    if (!layoutCache || layoutCache.key !== key) {
      layoutCache = { key, layout: computeLayout(graph) };
    }
    const scene = buildScene(graph, selected, null, layoutCache.layout);
    renderScene(canvasHost, scene);
  } catch (error) {
    // Drawing must never block the review: degrade to a list.
    console.error('layout failed, falling back to list view', error);
    renderFallbackList(canvasHost, buildScene(graph, null, null, new Map()));
  }
}

store.subscribe(draw);

fileInput.addEventListener('change', async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  const text = await file.text();
  try {
    await store.openSession(JSON.parse(text));
  } catch (error) {
    console.error(error);
  }
});

draw(store.getState());
