import type { Behavior, SessionEnvelope } from "./types.js";

// Gesture descriptors render as a static icon plus the descriptor as caption.
export const GESTURE_ICONS: Record<string, string> = {
  Congratulate: "🎉",
  Pleased: "😊",
  Speak: "💬",
  Think: "🤔",
  Explain: "📖",
  Encourage: "💪",
  Point: "👉",
  Wave: "👋",
  Nod: "🙂",
  Idle: "🪑",
  Smile: "😄",
  Alert: "⏰",
  Write: "✍️",
  Greet: "🤝",
};

export function iconFor(gesture: string): string {
  return GESTURE_ICONS[gesture] ?? "•";
}

export interface GestureView {
  icon: string;
  caption: string;
}

export interface BehaviorView {
  tactic: string;
  gestures: GestureView[];
  utterance: string;
}

export interface PanelView {
  visible: boolean;
  title: string;
  behaviors: BehaviorView[];
}

function toView(behavior: Behavior): BehaviorView {
  return {
    tactic: behavior.tactic,
    gestures: behavior.gestures.map((g) => ({ icon: iconFor(g), caption: g })),
    utterance: behavior.utterance,
  };
}

// Env1 shows no agents, Env2 only the tutor, Env3 both (the classmate panel
// appears once a classmate exists).
export function agentPanels(env: SessionEnvelope): { tutor: PanelView; classmate: PanelView } {
  const tutorBehaviors = env.behaviors.filter((b) => b.actor === "VTA").map(toView);
  const classmateBehaviors = env.behaviors.filter((b) => b.actor === "VCA").map(toView);
  return {
    tutor: {
      visible: env.mode !== "Env1",
      title: "Tutor",
      behaviors: tutorBehaviors,
    },
    classmate: {
      visible: env.mode === "Env3" && env.vca !== null,
      title: env.vca ? `Classmate (${env.vca})` : "Classmate",
      behaviors: classmateBehaviors,
    },
  };
}

export interface EmotionChip {
  name: string;
  level: string;
}

export function emotionChips(env: SessionEnvelope): EmotionChip[] {
  return Object.entries(env.emotions)
    .map(([name, level]) => ({ name, level }))
    .sort((a, b) => a.name.localeCompare(b.name));
}

export function statusLine(env: SessionEnvelope): string {
  const place = `${env.personality} · ${env.group} group`;
  if (env.exercise === null) return place;
  return `${place} · exercise ${env.exercise_index + 1} of ${env.exercise_total}`;
}

export interface SummaryView {
  heading: string;
  lines: string[];
}

export function summaryView(env: SessionEnvelope): SummaryView {
  const lines = [
    `Personality ${env.personality}, ${env.group} group`,
    `Answered ${env.progress.answered}, correct ${env.progress.correct}`,
  ];
  if (env.vca) lines.push(`Classmate personality prefix ${env.vca}`);
  return { heading: "Session finished", lines };
}
