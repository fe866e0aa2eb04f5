import { describe, expect, it } from "vitest";

import {
  allAnswered,
  createState,
  setAnswer,
  sliderToAgreement,
  toPayload,
  unansweredCount,
} from "../src/questionnaire";
import fixtures from "./fixtures/service.json";

const items = fixtures.questionnaire.items;

describe("slider mapping", () => {
  it("maps the DOM range onto [-1, 1]", () => {
    expect(sliderToAgreement(100)).toBe(1);
    expect(sliderToAgreement(-100)).toBe(-1);
    expect(sliderToAgreement(0)).toBe(0);
    expect(sliderToAgreement(50)).toBe(0.5);
  });

  it("clamps out-of-range raw values", () => {
    expect(sliderToAgreement(250)).toBe(1);
    expect(sliderToAgreement(-9999)).toBe(-1);
  });
});

describe("questionnaire state", () => {
  it("starts with nothing answered and the submit gate closed", () => {
    const state = createState(items);
    expect(allAnswered(state)).toBe(false);
    expect(unansweredCount(state)).toBe(items.length);
    expect(() => toPayload(state)).toThrow(/incomplete/);
  });

  it("opens the gate only when every item was touched", () => {
    const state = createState(items);
    for (const item of items.slice(0, -1)) setAnswer(state, item.id, 1);
    expect(allAnswered(state)).toBe(false);
    expect(unansweredCount(state)).toBe(1);
    setAnswer(state, items[items.length - 1]!.id, 0); // middle still counts
    expect(allAnswered(state)).toBe(true);
  });

  it("produces the exact wire payload", () => {
    const state = createState(items);
    for (const item of items) setAnswer(state, item.id, -0.5);
    const payload = toPayload(state);
    expect(Object.keys(payload)).toHaveLength(items.length);
    expect(payload[items[0]!.id]).toBe(-0.5);
  });

  it("rejects unknown items and out-of-range agreements", () => {
    const state = createState(items);
    expect(() => setAnswer(state, "zzz", 0)).toThrow(/unknown/);
    expect(() => setAnswer(state, items[0]!.id, 1.5)).toThrow(/outside/);
  });
});

describe("service questionnaire contract", () => {
  it("every item carries id, prompt, and dimension", () => {
    expect(items.length).toBe(20);
    for (const item of items) {
      expect(item.id).toBeTruthy();
      expect(item.prompt).toBeTruthy();
      expect(["EI", "SN", "TF", "JP"]).toContain(item.dimension);
    }
  });
});
