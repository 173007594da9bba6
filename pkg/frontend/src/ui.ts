// Proposal list, journal pane and status line.

import type { StoreState } from './store';
import type { JournalEntry, Proposal } from './types';

export interface UiHandlers {
  onSelect: (proposalId: string | null) => void;
  onDecide: (proposalId: string, decision: 'accept' | 'reject') => void;
}

export function renderProposalList(
  container: HTMLElement,
  state: StoreState,
  handlers: UiHandlers,
): void {
  container.textContent = '';
  const proposals = state.session?.proposals ?? [];

  const heading = document.createElement('h2');
  heading.textContent = proposals.length
    ? `${proposals.length} open proposal${proposals.length === 1 ? '' : 's'}`
    : '0 open proposals';
  container.appendChild(heading);

  if (!proposals.length) {
    const done = document.createElement('p');
    done.setAttribute('class', 'all-done');
    done.textContent = state.session
      ? 'Nothing left to review.'
      : 'Load a graph to begin.';
    container.appendChild(done);
    return;
  }

  for (const proposal of proposals) {
    container.appendChild(proposalCard(proposal, state, handlers));
  }
}

function proposalCard(
  proposal: Proposal,
  state: StoreState,
  handlers: UiHandlers,
): HTMLElement {
  const card = document.createElement('article');
  const selected = state.selectedProposalId === proposal.id;
  card.setAttribute('class', `proposal${selected ? ' selected' : ''}`);
  card.setAttribute('data-proposal-id', proposal.id);

  const header = document.createElement('header');
  const badge = document.createElement('span');
  badge.setAttribute('class', `badge badge-${proposal.recommendation}`);
  badge.textContent = proposal.recommendation;
  const title = document.createElement('strong');
  title.textContent = `rule ${proposal.ruleId}`;
  header.appendChild(title);
  header.appendChild(badge);
  card.appendChild(header);

  const description = document.createElement('p');
  description.setAttribute('class', 'description');
  description.textContent = proposal.description;
  card.appendChild(description);

  const explanation = document.createElement('p');
  explanation.setAttribute('class', 'explanation');
  explanation.textContent = proposal.explanation;
  card.appendChild(explanation);

  const affected = document.createElement('p');
  affected.setAttribute('class', 'affected');
  affected.textContent = 'affects ' + Object.values(proposal.match.nodes).join(', ');
  card.appendChild(affected);

  const actions = document.createElement('div');
  actions.setAttribute('class', 'actions');
  const accept = document.createElement('button');
  accept.textContent = 'Accept';
  accept.setAttribute('class', 'accept');
  accept.disabled = state.busy;
  accept.addEventListener('click', (event) => {
    event.stopPropagation();
    handlers.onDecide(proposal.id, 'accept');
  });
  const reject = document.createElement('button');
  reject.textContent = 'Reject';
  reject.setAttribute('class', 'reject');
  reject.disabled = state.busy;
  reject.addEventListener('click', (event) => {
    event.stopPropagation();
    handlers.onDecide(proposal.id, 'reject');
  });
  actions.appendChild(accept);
  actions.appendChild(reject);
  card.appendChild(actions);

  card.addEventListener('click', () => {
    handlers.onSelect(selected ? null : proposal.id);
  });
  return card;
}

export function renderJournal(container: HTMLElement, journal: JournalEntry[]): void {
  container.textContent = '';
  const heading = document.createElement('h2');
  heading.textContent = 'Journal';
  container.appendChild(heading);
  const list = document.createElement('ol');
  for (const entry of journal) {
    const item = document.createElement('li');
    item.setAttribute('class', `journal-${entry.decision}`);
    item.textContent = `${entry.decision}: rule ${entry.ruleId} (${entry.proposalId})`;
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderStatus(container: HTMLElement, state: StoreState): void {
  const session = state.session;
  const parts: string[] = [];
  if (session) {
    parts.push(`session ${session.sessionId}`);
    parts.push(`${session.graph.nodes.length} nodes / ${session.graph.edges.length} edges`);
  }
  if (state.notice) parts.push(state.notice);
  container.textContent = parts.join(' | ');
}
