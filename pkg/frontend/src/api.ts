import type { GraphDocument, RuleInfo, SessionState } from './types';

const JSON_HEADERS = { 'Content-Type': 'application/json' } as const;

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    message: string,
    public location?: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let message = `${response.status} ${response.statusText}`;
    let location: string | undefined;
    try {
      const body = await response.json();
      if (body && typeof body.error === 'string') {
        message = body.error;
        location = body.location;
      }
    } catch {
      // not a JSON error body; keep the status line
    }
    throw new ApiRequestError(response.status, message, location);
  }
  return (await response.json()) as T;
}

export class ReviewApi {
  constructor(private baseUrl: string = '') {}

  createSession(document: GraphDocument | object): Promise<SessionState> {
    return fetch(`${this.baseUrl}/api/sessions`, {
      method: 'POST',
      headers: JSON_HEADERS,
      body: JSON.stringify(document),
    }).then((r) => asJson<SessionState>(r));
  }

  getSession(sessionId: string): Promise<SessionState> {
    return fetch(`${this.baseUrl}/api/sessions/${encodeURIComponent(sessionId)}`)
      .then((r) => asJson<SessionState>(r));
  }

  decide(
    sessionId: string,
    proposalId: string,
    decision: 'accept' | 'reject',
  ): Promise<SessionState> {
    const sid = encodeURIComponent(sessionId);
    const pid = encodeURIComponent(proposalId);
    return fetch(`${this.baseUrl}/api/sessions/${sid}/proposals/${pid}/${decision}`, {
      method: 'POST',
    }).then((r) => asJson<SessionState>(r));
  }

  exportGraph(sessionId: string): Promise<GraphDocument> {
    const sid = encodeURIComponent(sessionId);
    return fetch(`${this.baseUrl}/api/sessions/${sid}/export?format=pidg`)
      .then((r) => asJson<GraphDocument>(r));
  }

  exportDot(sessionId: string): Promise<string> {
    const sid = encodeURIComponent(sessionId);
    return fetch(`${this.baseUrl}/api/sessions/${sid}/export?format=dot`)
      .then(async (r) => {
        if (!r.ok) throw new ApiRequestError(r.status, r.statusText);
        return r.text();
      });
  }

  listRules(): Promise<RuleInfo[]> {
    return fetch(`${this.baseUrl}/api/rules`)
      .then((r) => asJson<{ rules: RuleInfo[] }>(r))
      .then((body) => body.rules);
  }
}
