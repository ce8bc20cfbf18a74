/** Single-page chat UI. All business decisions live on the server; this
 * renders the mirrored state and gates controls by phase. */

import { ApiError, ServiceClient } from "./api.js";
import {
  allowedControls,
  beginRequest,
  confirmationResolved,
  errorReceived,
  initialState,
  interpretationReceived,
  questionSent,
  sessionStarted,
  UiSessionView,
} from "./state.js";

export interface AppOptions {
  client: ServiceClient;
  defaultStart?: string;
  defaultGoal?: string;
}

export class ChatApp {
  state: UiSessionView = initialState();

  private readonly root: HTMLElement;
  private readonly client: ServiceClient;

  private startInput!: HTMLInputElement;
  private goalInput!: HTMLInputElement;
  private startButton!: HTMLButtonElement;
  private questionInput!: HTMLInputElement;
  private askButton!: HTMLButtonElement;
  private acceptButton!: HTMLButtonElement;
  private rejectButton!: HTMLButtonElement;
  private phaseIndicator!: HTMLElement;
  private pathList!: HTMLElement;
  private transcriptList!: HTMLElement;
  private banner!: HTMLElement;

  constructor(root: HTMLElement, options: AppOptions) {
    this.root = root;
    this.client = options.client;
    this.buildSkeleton(options);
    this.render();
  }

  private buildSkeleton(options: AppOptions): void {
    this.root.innerHTML = `
      <section class="session-form">
        <input data-id="start" placeholder="start node id" />
        <input data-id="goal" placeholder="goal node id" />
        <button data-id="start-session">Start session</button>
      </section>
      <div data-id="banner" class="banner" hidden></div>
      <section class="path">
        <h2>Recommended path</h2>
        <ol data-id="path"></ol>
      </section>
      <section class="chat">
        <div data-id="phase" class="phase-indicator">no session</div>
        <ul data-id="transcript"></ul>
        <div class="composer">
          <input data-id="question" placeholder="Ask about a material on your path" />
          <button data-id="ask">Ask</button>
          <button data-id="accept">Accept</button>
          <button data-id="reject">Reject</button>
        </div>
      </section>
    `;
    const find = <T extends HTMLElement>(id: string): T => {
      const el = this.root.querySelector<T>(`[data-id="${id}"]`);
      if (!el) throw new Error(`missing element ${id}`);
      return el;
    };
    this.startInput = find<HTMLInputElement>("start");
    this.goalInput = find<HTMLInputElement>("goal");
    this.startButton = find<HTMLButtonElement>("start-session");
    this.questionInput = find<HTMLInputElement>("question");
    this.askButton = find<HTMLButtonElement>("ask");
    this.acceptButton = find<HTMLButtonElement>("accept");
    this.rejectButton = find<HTMLButtonElement>("reject");
    this.phaseIndicator = find("phase");
    this.pathList = find("path");
    this.transcriptList = find("transcript");
    this.banner = find("banner");

    this.startInput.value = options.defaultStart ?? "";
    this.goalInput.value = options.defaultGoal ?? "";

    this.startButton.addEventListener("click", () => void this.startSession());
    this.askButton.addEventListener("click", () => void this.ask());
    this.acceptButton.addEventListener("click", () => void this.confirm(true));
    this.rejectButton.addEventListener("click", () => void this.confirm(false));
    this.questionInput.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter" && !this.askButton.disabled) {
        void this.ask();
      }
    });
  }

  async startSession(): Promise<void> {
    if (!allowedControls(this.state).start) return;
    this.update(beginRequest(this.state));
    try {
      const response = await this.client.startSession(
        this.startInput.value.trim(),
        this.goalInput.value.trim(),
      );
      this.update(
        sessionStarted(this.state, response.session_id, response.phase, response.path),
      );
    } catch (error) {
      this.handleError(error);
    }
  }

  async ask(question?: string): Promise<void> {
    if (!allowedControls(this.state).ask || this.state.sessionId === null) return;
    const text = (question ?? this.questionInput.value).trim();
    if (!text) return;
    this.update(beginRequest(questionSent(this.state, text)));
    try {
      const response = await this.client.ask(this.state.sessionId, text);
      this.questionInput.value = "";
      this.update(
        interpretationReceived(this.state, response.phase, response.interpretation),
      );
    } catch (error) {
      this.handleError(error);
    }
  }

  async confirm(accepted: boolean): Promise<void> {
    const controls = allowedControls(this.state);
    if (!(accepted ? controls.accept : controls.reject)) return;
    if (this.state.sessionId === null) return;
    this.update(beginRequest(this.state));
    try {
      const response = await this.client.confirm(this.state.sessionId, accepted);
      this.update(
        confirmationResolved(this.state, response.phase, accepted, response.explanation),
      );
    } catch (error) {
      await this.handleError(error, /* resync */ true);
    }
  }

  /** Connection errors get an inline banner; domain errors join the transcript. */
  private async handleError(error: unknown, resync = false): Promise<void> {
    if (error instanceof ApiError) {
      let phase = this.state.phase ?? undefined;
      if (resync && this.state.sessionId !== null) {
        // a failed generation resets the server session; mirror it
        try {
          const view = await this.client.getPath(this.state.sessionId);
          phase = view.phase;
        } catch {
          // keep the previous phase if the resync itself fails
        }
      }
      this.update(
        errorReceived(this.state, error.code, error.message, error.candidates, phase),
      );
    } else {
      this.update({ ...this.state, busy: false });
      this.showBanner(`connection error: ${String(error)} — retry when ready`);
      this.render();
      return;
    }
    this.hideBanner();
  }

  private showBanner(text: string): void {
    this.banner.textContent = text;
    this.banner.hidden = false;
  }

  private hideBanner(): void {
    this.banner.hidden = true;
    this.banner.textContent = "";
  }

  private update(state: UiSessionView): void {
    this.state = state;
    this.render();
  }

  private render(): void {
    const controls = allowedControls(this.state);
    this.startButton.disabled = !controls.start;
    this.askButton.disabled = !controls.ask;
    this.questionInput.disabled = !controls.ask;
    this.acceptButton.disabled = !controls.accept;
    this.rejectButton.disabled = !controls.reject;
    this.phaseIndicator.textContent = this.state.phase ?? "no session";
    this.renderPath();
    this.renderTranscript();
  }

  private renderPath(): void {
    this.pathList.innerHTML = "";
    if (!this.state.path) return;
    for (const step of this.state.path.steps) {
      const item = document.createElement("li");
      const badge = document.createElement("span");
      badge.className = "level-badge";
      badge.textContent = step.level;
      const title = document.createElement("a");
      title.href = "#";
      title.className = "step-title";
      title.textContent = step.title;
      // clicking a title prefills a question about it
      title.addEventListener("click", (event) => {
        event.preventDefault();
        this.questionInput.value = `Tell me about ${step.title}`;
      });
      item.append(badge, title);
      this.pathList.append(item);
    }
  }

  private renderTranscript(): void {
    this.transcriptList.innerHTML = "";
    for (const turn of this.state.transcript) {
      const item = document.createElement("li");
      item.className = `turn turn-${turn.kind}`;
      switch (turn.kind) {
        case "user":
          item.textContent = turn.text;
          break;
        case "interpretation":
          item.textContent = turn.text;
          break;
        case "confirmation":
          item.textContent = turn.accepted ? "Accepted" : "Rejected";
          break;
        case "explanation": {
          for (const [slot, value] of Object.entries(turn.explanation.slot_values)) {
            const section = document.createElement("section");
            section.className = "slot-section";
            const heading = document.createElement("h3");
            heading.textContent = slot;
            const body = document.createElement("p");
            body.textContent = value;
            section.append(heading, body);
            item.append(section);
          }
          break;
        }
        case "error": {
          item.textContent = `[${turn.code}] ${turn.text}`;
          if (turn.candidates && turn.candidates.length > 0) {
            const hint = document.createElement("p");
            hint.textContent = `Try one of: ${turn.candidates.join(", ")}`;
            item.append(hint);
          }
          break;
        }
      }
      this.transcriptList.append(item);
    }
  }
}

export function mountApp(root: HTMLElement, options: AppOptions): ChatApp {
  return new ChatApp(root, options);
}
