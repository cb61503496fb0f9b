// Thin client for the steering service. Commands go over fetch; pushes
// arrive on an EventSource with resume-from-sequence on reconnect.

import type { ActionResponse, StatePayload, StreamEvent } from "./types.js";

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  async createSession(maze: string): Promise<StatePayload> {
    return this.post("/sessions", { maze });
  }

  async getState(sessionId: string): Promise<StatePayload> {
    const res = await fetch(`${this.baseUrl}/sessions/${sessionId}/state`);
    if (!res.ok) throw new Error(`state failed: ${res.status}`);
    return res.json();
  }

  async sendAction(sessionId: string, action: string): Promise<ActionResponse> {
    return this.post(`/sessions/${sessionId}/action`, { action });
  }

  async setLearning(sessionId: string, enabled: boolean): Promise<void> {
    await this.post(`/sessions/${sessionId}/learning`, { enabled });
  }

  async requestIntelligence(sessionId: string, scope = ""): Promise<void> {
    const query = scope ? `?scope=${encodeURIComponent(scope)}` : "";
    const res = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/intelligence${query}`,
    );
    if (!res.ok) throw new Error(`intelligence failed: ${res.status}`);
  }

  openStream(
    sessionId: string,
    since: number,
    onEvent: (event: StreamEvent) => void,
    onError: () => void,
  ): EventSource {
    const source = new EventSource(
      `${this.baseUrl}/sessions/${sessionId}/events?since=${since}`,
    );
    for (const type of ["session", "action", "learning", "intelligence"]) {
      source.addEventListener(type, (raw) => {
        onEvent(JSON.parse((raw as MessageEvent).data) as StreamEvent);
      });
    }
    source.onerror = onError;
    return source;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) {
      let detail = `${res.status}`;
      try {
        detail = (await res.json()).detail ?? detail;
      } catch {
        // keep the status code
      }
      throw new Error(detail);
    }
    return res.json();
  }
}
