/** Client-side mirror of the server session state machine.
 *
 * The server is the source of truth; this module only tracks what the
 * last response said and derives which controls may be enabled. The
 * transcript is append-only.
 */

import type { ExplanationView, Phase, PathView } from "./api.js";

export type TranscriptTurn =
  | { kind: "user"; text: string }
  | { kind: "interpretation"; text: string }
  | { kind: "confirmation"; accepted: boolean }
  | { kind: "explanation"; explanation: ExplanationView }
  | { kind: "error"; code: string; text: string; candidates?: string[] };

export interface UiSessionView {
  sessionId: string | null;
  phase: Phase | null;
  path: PathView | null;
  transcript: readonly TranscriptTurn[];
  /** one in-flight request per session */
  busy: boolean;
}

export function initialState(): UiSessionView {
  return { sessionId: null, phase: null, path: null, transcript: [], busy: false };
}

/** Controls that may be enabled in the current state. */
export interface Controls {
  start: boolean;
  ask: boolean;
  accept: boolean;
  reject: boolean;
}

export function allowedControls(state: UiSessionView): Controls {
  if (state.busy) {
    return { start: false, ask: false, accept: false, reject: false };
  }
  if (state.sessionId === null || state.phase === null) {
    return { start: true, ask: false, accept: false, reject: false };
  }
  return {
    start: true,
    ask: state.phase === "awaiting_question" || state.phase === "answered",
    accept: state.phase === "awaiting_confirmation",
    reject: state.phase === "awaiting_confirmation",
  };
}

function appended(state: UiSessionView, ...turns: TranscriptTurn[]): TranscriptTurn[] {
  return [...state.transcript, ...turns];
}

export function beginRequest(state: UiSessionView): UiSessionView {
  return { ...state, busy: true };
}

export function sessionStarted(
  _previous: UiSessionView,
  sessionId: string,
  phase: Phase,
  path: PathView,
): UiSessionView {
  // a new session starts a new transcript
  return { sessionId, phase, path, transcript: [], busy: false };
}

export function questionSent(state: UiSessionView, question: string): UiSessionView {
  return { ...state, transcript: appended(state, { kind: "user", text: question }) };
}

export function interpretationReceived(
  state: UiSessionView,
  phase: Phase,
  interpretation: string,
): UiSessionView {
  return {
    ...state,
    phase,
    busy: false,
    transcript: appended(state, { kind: "interpretation", text: interpretation }),
  };
}

export function confirmationResolved(
  state: UiSessionView,
  phase: Phase,
  accepted: boolean,
  explanation?: ExplanationView,
): UiSessionView {
  const turns: TranscriptTurn[] = [{ kind: "confirmation", accepted }];
  if (explanation) {
    turns.push({ kind: "explanation", explanation });
  }
  return { ...state, phase, busy: false, transcript: appended(state, ...turns) };
}

export function errorReceived(
  state: UiSessionView,
  code: string,
  text: string,
  candidates?: string[],
  phase?: Phase,
): UiSessionView {
  return {
    ...state,
    phase: phase ?? state.phase,
    busy: false,
    transcript: appended(state, { kind: "error", code, text, candidates }),
  };
}
