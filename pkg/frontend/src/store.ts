// Review session state. The store is the single owner of server state on the
// client: every mutation round-trips through the service and replaces the
// local snapshot with the response, so the UI is always reconstructible from
// a plain GET.

import { ApiRequestError, ReviewApi } from './api';
import type { SessionState } from './types';

export interface StoreState {
  session: SessionState | null;
  selectedProposalId: string | null;
  busy: boolean;
  notice: string | null;
}

type Listener = (state: StoreState) => void;

export class ReviewStore {
  private state: StoreState = {
    session: null,
    selectedProposalId: null,
    busy: false,
    notice: null,
  };
  private listeners: Listener[] = [];

  constructor(private api: ReviewApi) {}

  getState(): StoreState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(partial: Partial<StoreState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  private adoptSession(session: SessionState): void {
    // Keep the selection if the proposal survived re-analysis.
    const selected = this.state.selectedProposalId;
    const stillOpen = session.proposals.some((p) => p.id === selected);
    this.set({
      session,
      selectedProposalId: stillOpen ? selected : null,
    });
  }

  async openSession(document: object): Promise<void> {
    this.set({ busy: true, notice: null });
    try {
      this.adoptSession(await this.api.createSession(document));
    } catch (error) {
      this.set({ notice: describe(error) });
      throw error;
    } finally {
      this.set({ busy: false });
    }
  }

  async refresh(): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    this.adoptSession(await this.api.getSession(session.sessionId));
  }

  select(proposalId: string | null): void {
    this.set({ selectedProposalId: proposalId, notice: null });
  }

  /** Accept or reject one proposal; re-renders from the service response.
   *  While a decision is in flight further decisions are ignored, so a
   *  double-click cannot fire twice. */
  async decide(proposalId: string, decision: 'accept' | 'reject'): Promise<void> {
    const session = this.state.session;
    if (!session || this.state.busy) return;
    this.set({ busy: true, notice: null });
    try {
      this.adoptSession(await this.api.decide(session.sessionId, proposalId, decision));
    } catch (error) {
      if (error instanceof ApiRequestError && error.status === 409) {
        // The proposal went stale under us: refresh and tell the user.
        this.adoptSession(await this.api.getSession(session.sessionId));
        this.set({ notice: 'proposal outdated - list refreshed' });
        return;
      }
      this.set({ notice: describe(error) });
      throw error;
    } finally {
      this.set({ busy: false });
    }
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiRequestError) {
    return error.location ? `${error.message} (${error.location})` : error.message;
  }
  return error instanceof Error ? error.message : String(error);
}
