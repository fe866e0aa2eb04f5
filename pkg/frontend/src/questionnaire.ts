import type { QuestionnaireItem } from "./types.js";

// Sliders run -100..100 in the DOM; the service wants agreement in [-1, 1].
export function sliderToAgreement(raw: number): number {
  const scaled = raw / 100;
  return Math.max(-1, Math.min(1, scaled));
}

export interface QuestionnaireState {
  itemIds: string[];
  answers: Map<string, number>;
}

export function createState(items: QuestionnaireItem[]): QuestionnaireState {
  return { itemIds: items.map((item) => item.id), answers: new Map() };
}

// Only items the user actually touched count as answered.
export function setAnswer(state: QuestionnaireState, id: string, agreement: number): void {
  if (!state.itemIds.includes(id)) throw new Error(`unknown item ${id}`);
  if (agreement < -1 || agreement > 1) throw new Error(`agreement ${agreement} outside [-1, 1]`);
  state.answers.set(id, agreement);
}

export function allAnswered(state: QuestionnaireState): boolean {
  return state.itemIds.every((id) => state.answers.has(id));
}

export function unansweredCount(state: QuestionnaireState): number {
  return state.itemIds.filter((id) => !state.answers.has(id)).length;
}

export function toPayload(state: QuestionnaireState): Record<string, number> {
  if (!allAnswered(state)) throw new Error("questionnaire incomplete");
  const payload: Record<string, number> = {};
  for (const id of state.itemIds) payload[id] = state.answers.get(id)!;
  return payload;
}
