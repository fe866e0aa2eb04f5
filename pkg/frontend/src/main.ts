import { ApiError, TutorApi } from "./api.js";
import {
  elapsedSeconds,
  formatClock,
  isExpired,
  remainingSeconds,
  timeoutAction,
} from "./countdown.js";
import {
  allAnswered,
  createState,
  setAnswer,
  sliderToAgreement,
  toPayload,
  unansweredCount,
  type QuestionnaireState,
} from "./questionnaire.js";
import { agentPanels, emotionChips, statusLine, summaryView, type PanelView } from "./panels.js";
import type { ActionBody, Mode, SessionEnvelope } from "./types.js";

const api = new TutorApi();

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
};

interface AppState {
  questionnaire: QuestionnaireState | null;
  session: SessionEnvelope | null;
  exerciseShownAt: number;
  shownExerciseId: string | null;
  timeoutPosted: boolean;
  ticker: number | null;
  busy: boolean;
}

const state: AppState = {
  questionnaire: null,
  session: null,
  exerciseShownAt: 0,
  shownExerciseId: null,
  timeoutPosted: false,
  ticker: null,
  busy: false,
};

function showScreen(name: "questionnaire" | "session" | "summary"): void {
  for (const screen of ["questionnaire", "session", "summary"]) {
    el(`screen-${screen}`).hidden = screen !== name;
  }
}

function showBanner(message: string): void {
  const banner = el("banner");
  banner.textContent = message;
  banner.hidden = false;
}

function hideBanner(): void {
  el("banner").hidden = true;
}

// --- questionnaire screen ---------------------------------------------------

async function loadQuestionnaire(): Promise<void> {
  hideBanner();
  const list = el("question-list");
  list.textContent = "Loading…";
  try {
    const form = await api.getQuestionnaire();
    state.questionnaire = createState(form.items);
    list.textContent = "";
    for (const item of form.items) {
      const row = document.createElement("div");
      row.className = "question";
      const prompt = document.createElement("p");
      prompt.textContent = item.prompt;
      const labels = document.createElement("div");
      labels.className = "scale-labels";
      labels.innerHTML = "<span>disagree</span><span>agree</span>";
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "-100";
      slider.max = "100";
      slider.value = "0";
      slider.addEventListener("input", () => {
        setAnswer(state.questionnaire!, item.id, sliderToAgreement(Number(slider.value)));
        row.classList.add("answered");
        refreshSubmit();
      });
      row.append(prompt, labels, slider);
      list.append(row);
    }
    refreshSubmit();
  } catch (err) {
    list.textContent = "";
    showBanner(`Could not load the questionnaire. ${describe(err)}`);
  }
}

function refreshSubmit(): void {
  const button = el("start-session") as HTMLButtonElement;
  const q = state.questionnaire;
  const ready = q !== null && allAnswered(q);
  button.disabled = !ready;
  el("answer-hint").textContent = ready
    ? "Ready to start."
    : q
      ? `${unansweredCount(q)} question(s) left — move every slider once.`
      : "";
}

function chosenMode(): Mode {
  const checked = document.querySelector<HTMLInputElement>("input[name=mode]:checked");
  return (checked?.value ?? "Env3") as Mode;
}

async function startSession(): Promise<void> {
  if (!state.questionnaire) return;
  hideBanner();
  try {
    const env = await api.createSession(toPayload(state.questionnaire), chosenMode());
    applyEnvelope(env);
    showScreen("session");
  } catch (err) {
    showBanner(`Could not start a session. ${describe(err)}`);
  }
}

// --- session screen ---------------------------------------------------------

function applyEnvelope(env: SessionEnvelope): void {
  state.session = env;
  if (env.status === "Closed") {
    finishSession(env);
    return;
  }
  if (env.exercise && env.exercise.id !== state.shownExerciseId) {
    state.shownExerciseId = env.exercise.id;
    state.exerciseShownAt = Date.now();
    state.timeoutPosted = false;
    (el("answer-input") as HTMLInputElement).value = "";
  }
  renderSession(env);
  if (state.ticker === null) {
    state.ticker = window.setInterval(tick, 250);
  }
}

function renderSession(env: SessionEnvelope): void {
  el("session-status").textContent = statusLine(env);
  el("progress").textContent =
    `answered ${env.progress.answered} · correct ${env.progress.correct}`;
  el("exercise-prompt").textContent = env.exercise ? env.exercise.prompt : "No exercise.";

  const panels = agentPanels(env);
  renderPanel("tutor-panel", panels.tutor);
  renderPanel("classmate-panel", panels.classmate);

  const chipBox = el("emotion-chips");
  chipBox.textContent = "";
  for (const chip of emotionChips(env)) {
    const span = document.createElement("span");
    span.className = `chip chip-${chip.level.toLowerCase()}`;
    span.textContent = `${chip.name}: ${chip.level}`;
    chipBox.append(span);
  }
}

function renderPanel(id: string, view: PanelView): void {
  const panel = el(id);
  panel.hidden = !view.visible;
  if (!view.visible) return;
  panel.textContent = "";
  const title = document.createElement("h3");
  title.textContent = view.title;
  panel.append(title);
  if (view.behaviors.length === 0) {
    const idle = document.createElement("p");
    idle.className = "muted";
    idle.textContent = "…";
    panel.append(idle);
    return;
  }
  for (const behavior of view.behaviors) {
    const card = document.createElement("div");
    card.className = "behavior";
    const gestures = document.createElement("div");
    gestures.className = "gestures";
    for (const g of behavior.gestures) {
      const fig = document.createElement("span");
      fig.className = "gesture";
      fig.title = g.caption;
      fig.textContent = `${g.icon} ${g.caption}`;
      gestures.append(fig);
    }
    const utterance = document.createElement("p");
    utterance.className = "utterance";
    utterance.textContent = behavior.utterance;
    card.append(gestures, utterance);
    panel.append(card);
  }
}

function tick(): void {
  const env = state.session;
  if (!env || !env.exercise) return;
  const dt = env.exercise.default_time;
  el("countdown").textContent = formatClock(remainingSeconds(dt, state.exerciseShownAt, Date.now()));
  if (isExpired(dt, state.exerciseShownAt, Date.now()) && !state.timeoutPosted) {
    state.timeoutPosted = true;
    void sendAction(timeoutAction(dt, currentEffort()));
  }
}

function currentEffort(): number {
  return Number((el("effort-slider") as HTMLInputElement).value) / 100;
}

function measuredRt(): number {
  return elapsedSeconds(state.exerciseShownAt, Date.now());
}

async function sendAction(action: ActionBody): Promise<void> {
  const env = state.session;
  if (!env || state.busy) return;
  state.busy = true;
  hideBanner();
  try {
    applyEnvelope(await api.sendAction(env.id, action));
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      // the session closed under us; fetch the final state and wrap up
      try {
        finishSession(await api.getSession(env.id));
      } catch (inner) {
        showBanner(`Session closed, summary unavailable. ${describe(inner)}`);
      }
    } else {
      showBanner(`Action failed. ${describe(err)}`);
    }
  } finally {
    state.busy = false;
  }
}

function submitAnswer(): void {
  const answer = (el("answer-input") as HTMLInputElement).value;
  void sendAction({
    type: "SubmitAnswer",
    answer,
    rt: measuredRt(),
    effort: currentEffort(),
  });
}

function plainAction(type: ActionBody["type"]): void {
  void sendAction({ type, rt: measuredRt() });
}

// --- summary screen ---------------------------------------------------------

function finishSession(env: SessionEnvelope): void {
  state.session = env;
  if (state.ticker !== null) {
    clearInterval(state.ticker);
    state.ticker = null;
  }
  const view = summaryView(env);
  el("summary-heading").textContent = view.heading;
  const list = el("summary-lines");
  list.textContent = "";
  for (const line of view.lines) {
    const item = document.createElement("li");
    item.textContent = line;
    list.append(item);
  }
  (el("log-link") as HTMLAnchorElement).href = api.logUrl(env.id);
  showScreen("summary");
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? "The service is not reachable." : `${err.status}: ${err.message}`;
  }
  return String(err);
}

// --- wiring -----------------------------------------------------------------

export function boot(): void {
  el("start-session").addEventListener("click", () => void startSession());
  el("retry-load").addEventListener("click", () => void loadQuestionnaire());
  el("btn-submit").addEventListener("click", submitAnswer);
  el("btn-help").addEventListener("click", () => plainAction("RequestHelp"));
  el("btn-reject").addEventListener("click", () => plainAction("RejectHelp"));
  el("btn-skip").addEventListener("click", () => plainAction("Skip"));
  el("btn-think").addEventListener("click", () => plainAction("Think"));
  el("btn-leave").addEventListener("click", () => plainAction("Leave"));
  el("effort-value").textContent = "50%";
  el("effort-slider").addEventListener("input", () => {
    el("effort-value").textContent = `${Math.round(currentEffort() * 100)}%`;
  });
  showScreen("questionnaire");
  void loadQuestionnaire();
}

boot();
