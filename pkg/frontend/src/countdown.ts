import type { ActionBody } from "./types.js";

// Response time is measured on the client (the service is stateless about
// display timing), so every action carries seconds since the exercise showed.

export function elapsedSeconds(startedAtMs: number, nowMs: number): number {
  return Math.max(0, (nowMs - startedAtMs) / 1000);
}

export function remainingSeconds(allottedSec: number, startedAtMs: number, nowMs: number): number {
  return Math.max(0, allottedSec - elapsedSeconds(startedAtMs, nowMs));
}

export function isExpired(allottedSec: number, startedAtMs: number, nowMs: number): boolean {
  return remainingSeconds(allottedSec, startedAtMs, nowMs) <= 0;
}

export function formatClock(seconds: number): string {
  const whole = Math.ceil(seconds);
  const m = Math.floor(whole / 60);
  const s = whole % 60;
  return `${m}:${s.toString().padStart(2, "0")}`;
}

// On expiry the client submits for the learner with rt past the allotted
// time, which the service classifies as a timeout.
export function timeoutAction(allottedSec: number, effort?: number): ActionBody {
  const action: ActionBody = { type: "SubmitAnswer", answer: "", rt: allottedSec + 0.5 };
  if (effort !== undefined) action.effort = effort;
  return action;
}
