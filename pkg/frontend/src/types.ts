// Shapes of the service's JSON, verbatim. The client renders these and never
// derives emotions or tactics on its own.

export type Mode = "Env1" | "Env2" | "Env3";

export interface QuestionnaireItem {
  id: string;
  prompt: string;
  dimension: string;
}

export interface Questionnaire {
  version: string;
  items: QuestionnaireItem[];
}

export interface ExerciseView {
  id: string;
  prompt: string;
  difficulty: number;
  default_time: number;
}

export interface Behavior {
  actor: "VTA" | "VCA";
  tactic: string;
  gestures: string[];
  utterance: string;
}

export interface Progress {
  answered: number;
  correct: number;
}

export interface SessionEnvelope {
  id: string;
  mode: Mode;
  status: "Active" | "Closed";
  personality: string;
  group: string;
  vca: string | null;
  exercise: ExerciseView | null;
  exercise_index: number;
  exercise_total: number;
  behaviors: Behavior[];
  emotions: Record<string, string>;
  progress: Progress;
  seq: number;
  intensities?: Record<string, number>;
}

export type ActionType =
  | "SubmitAnswer"
  | "RequestHelp"
  | "RejectHelp"
  | "Skip"
  | "Think"
  | "Leave";

export interface ActionBody {
  type: ActionType;
  answer?: string;
  rt: number;
  effort?: number;
}
