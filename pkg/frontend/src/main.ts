// Wiring: session lifecycle, keyboard steering, event-stream subscription.
// Arrow keys point the agent, space moves it forward. All state shown comes
// from the server; key presses queue so rapid input stays ordered.

import { ApiClient } from "./api.js";
import { applyEvent, initialView, type ViewState } from "./state.js";
import { renderView, showBanner, type Panels } from "./render.js";
import type { StreamEvent } from "./types.js";

const KEY_ACTIONS: Record<string, string> = {
  ArrowUp: "face-up",
  ArrowDown: "face-down",
  ArrowLeft: "face-left",
  ArrowRight: "face-right",
  " ": "move",
  w: "move",
};

function panels(): Panels {
  const get = <T extends HTMLElement>(id: string) =>
    document.getElementById(id) as T;
  return {
    maze: get<HTMLCanvasElement>("maze"),
    sensors: get("sensors"),
    prediction: get("prediction"),
    pm: get("pm"),
    learning: get<HTMLInputElement>("learning"),
    chart: get<HTMLCanvasElement>("chart"),
    banner: get("banner"),
  };
}

class App {
  private view: ViewState = initialView();
  private queue: Promise<unknown> = Promise.resolve();
  private stream: EventSource | null = null;
  private readonly ui = panels();

  constructor(private readonly api: ApiClient) {}

  async start(): Promise<void> {
    const params = new URLSearchParams(location.search);
    const maze = params.get("maze") ?? "t-maze";
    try {
      const stored = sessionStorage.getItem("predintel-session");
      let sessionId: string;
      if (stored) {
        // refresh resumes the existing session; the stream replays from 0
        await this.api.getState(stored);
        sessionId = stored;
      } else {
        const state = await this.api.createSession(maze);
        sessionId = state.session_id;
        sessionStorage.setItem("predintel-session", sessionId);
      }
      this.subscribe(sessionId);
      showBanner(this.ui, null);
    } catch (err) {
      sessionStorage.removeItem("predintel-session");
      showBanner(this.ui, `cannot reach service: ${(err as Error).message} — retrying in 3s`);
      setTimeout(() => void this.start(), 3000);
      return;
    }
    this.bindControls();
  }

  private subscribe(sessionId: string): void {
    this.stream?.close();
    this.stream = this.api.openStream(
      sessionId,
      this.view.lastSeq,
      (event: StreamEvent) => {
        this.view = applyEvent(this.view, event);
        renderView(this.view, this.ui);
      },
      () => {
        showBanner(this.ui, "stream lost — reconnecting");
        setTimeout(() => {
          if (this.view.sessionId) this.subscribe(this.view.sessionId);
        }, 2000);
      },
    );
  }

  private bindControls(): void {
    document.addEventListener("keydown", (event) => {
      const action = KEY_ACTIONS[event.key];
      if (!action || !this.view.sessionId) return;
      event.preventDefault();
      this.enqueue(action);
    });
    for (const button of document.querySelectorAll<HTMLButtonElement>("[data-action]")) {
      button.addEventListener("click", () => {
        if (this.view.sessionId) this.enqueue(button.dataset.action!);
      });
    }
    this.ui.learning.addEventListener("change", () => {
      if (!this.view.sessionId) return;
      this.chain(() =>
        this.api.setLearning(this.view.sessionId!, this.ui.learning.checked),
      );
    });
    const measure = document.getElementById("measure");
    measure?.addEventListener("click", () => {
      if (!this.view.sessionId) return;
      this.chain(() => this.api.requestIntelligence(this.view.sessionId!));
    });
  }

  private enqueue(action: string): void {
    this.chain(() => this.api.sendAction(this.view.sessionId!, action));
  }

  private chain(task: () => Promise<unknown>): void {
    this.queue = this.queue
      .then(task)
      .then(() => showBanner(this.ui, null))
      .catch((err: Error) => showBanner(this.ui, err.message));
  }
}

const base = new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";
void new App(new ApiClient(base)).start();
