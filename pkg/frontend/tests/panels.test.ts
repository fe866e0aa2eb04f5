// Contract tests: the fixtures are verbatim responses captured from the real
// service (fixed seed 11, all-agree answers). The render model must display
// what the service said, verbatim — the UI never computes emotions or tactics.
import { describe, expect, it } from "vitest";

import {
  GESTURE_ICONS,
  agentPanels,
  emotionChips,
  iconFor,
  statusLine,
  summaryView,
} from "../src/panels";
import type { SessionEnvelope } from "../src/types";
import fixtures from "./fixtures/service.json";

const env1 = fixtures.created_env1 as unknown as SessionEnvelope;
const env2 = fixtures.created_env2 as unknown as SessionEnvelope;
const env3 = fixtures.created_env3 as unknown as SessionEnvelope;
const afterCorrect = fixtures.after_correct_env3 as unknown as SessionEnvelope;
const afterWrong = fixtures.after_wrong_env2 as unknown as SessionEnvelope;
const afterLeave = fixtures.after_leave as unknown as SessionEnvelope;

describe("panel visibility per mode", () => {
  it("plain mode hides both agents", () => {
    const panels = agentPanels(env1);
    expect(panels.tutor.visible).toBe(false);
    expect(panels.classmate.visible).toBe(false);
  });

  it("tutor mode shows only the tutor", () => {
    const panels = agentPanels(env2);
    expect(panels.tutor.visible).toBe(true);
    expect(panels.classmate.visible).toBe(false);
  });

  it("full mode shows tutor and classmate", () => {
    const panels = agentPanels(env3);
    expect(panels.tutor.visible).toBe(true);
    expect(panels.classmate.visible).toBe(true);
    expect(panels.classmate.title).toContain(env3.vca!);
  });
});

describe("behavior rendering round-trips the service", () => {
  it("shows the congratulation exactly as the service sent it", () => {
    const congratulation = afterCorrect.behaviors.find(
      (b) => b.tactic === "CongratulateStudent",
    )!;
    const panels = agentPanels(afterCorrect);
    const shown = panels.tutor.behaviors.find((b) => b.tactic === "CongratulateStudent")!;
    expect(shown.utterance).toBe(congratulation.utterance);
    expect(shown.gestures.map((g) => g.caption)).toEqual(congratulation.gestures);
  });

  it("keeps classmate talk out of the tutor panel", () => {
    const panels = agentPanels(afterCorrect);
    const tutorCount = afterCorrect.behaviors.filter((b) => b.actor === "VTA").length;
    const classmateCount = afterCorrect.behaviors.filter((b) => b.actor === "VCA").length;
    expect(panels.tutor.behaviors).toHaveLength(tutorCount);
    expect(panels.classmate.behaviors).toHaveLength(classmateCount);
  });

  it("tutor-only mode never carries classmate behaviors", () => {
    expect(afterWrong.behaviors.every((b) => b.actor === "VTA")).toBe(true);
    expect(agentPanels(afterWrong).classmate.visible).toBe(false);
  });

  it("every gesture the service uses has a static icon", () => {
    const seen = new Set(
      [afterCorrect, afterWrong, afterLeave].flatMap((env) =>
        env.behaviors.flatMap((b) => b.gestures),
      ),
    );
    expect(seen.size).toBeGreaterThan(0);
    for (const gesture of seen) {
      expect(GESTURE_ICONS[gesture], `icon for ${gesture}`).toBeDefined();
    }
    expect(iconFor("NotAGesture")).toBe("•"); // unknown descriptors still render
  });
});

describe("emotion chips", () => {
  it("mirror the service's levels verbatim", () => {
    const chips = emotionChips(afterCorrect);
    expect(chips.length).toBe(Object.keys(afterCorrect.emotions).length);
    for (const chip of chips) {
      expect(afterCorrect.emotions[chip.name]).toBe(chip.level);
    }
  });

  it("stay empty in plain mode", () => {
    expect(emotionChips(env1)).toEqual([]);
  });
});

describe("status and summary", () => {
  it("names the learner's placement and position", () => {
    const line = statusLine(env3);
    expect(line).toContain(env3.personality);
    expect(line).toContain(env3.group);
    expect(line).toContain(`of ${env3.exercise_total}`);
  });

  it("drops the exercise counter once the bank is done", () => {
    const closed = { ...env3, exercise: null };
    expect(statusLine(closed)).not.toContain("exercise");
  });

  it("summarizes a finished session from envelope fields only", () => {
    const view = summaryView(afterLeave);
    expect(view.heading).toBeTruthy();
    const joined = view.lines.join(" ");
    expect(joined).toContain(String(afterLeave.progress.answered));
    expect(joined).toContain(String(afterLeave.progress.correct));
    expect(joined).toContain(afterLeave.personality);
  });
});
