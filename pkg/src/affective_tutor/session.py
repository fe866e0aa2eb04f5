"""Tutoring session state machine and the event log.

A session binds one learner profile to an exercise bank under one of three
environment modes:

  Env1  exercises only; answers are graded and logged, nothing else runs.
  Env2  the teacher reacts to the learner's emotions; no classmate exists.
  Env3  teacher plus opposed-personality classmate, attitude and
        fortunes-of-others emotions, and group-changing meta tactics.

Every learner action is classified into an environment event, appraised
(in Env2/Env3), matched against the knowledge base, and appended to a
line-delimited JSON log that replays byte for byte under the same seed.
"""

from __future__ import annotations

import json
import logging
import random
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

from .appraisal import (
    AppraisalInputs,
    EmotionKind,
    EmotionState,
    EnvironmentalState,
    EventKind,
    EVENT_VALENCE,
    Observation,
    Phase,
    Valence,
    WeightTable,
    appraise_first_branch,
    appraise_fortunes_of_others,
    appraise_love_hate,
    desirability,
    event_impact,
    likelihood,
    unexpectedness,
    update_environmental_state,
)
from .personality import (
    LearningGroup,
    PersonalityProfile,
    QuestionnaireForm,
    build_profile,
    select_vca_personality,
)
from .tactics import (
    KnowledgeBase,
    RuleContext,
    ScriptCatalog,
    Tactic,
    TacticPlan,
    apply_meta_tactics,
    evaluate_rules,
    realize_tactics,
)

logger = logging.getLogger(__name__)

EFFORT_EVENT_THRESHOLD = 0.66
DEFAULT_VCA_SKILL = 0.6

# events that settle the open "will I get this one right" prospect
_OUTCOME_EVENTS = frozenset(
    {EventKind.ACCURATE_RESPONSE, EventKind.INACCURATE_RESPONSE, EventKind.TIMEOUT}
)
_ADVANCING_EVENTS = frozenset(
    {EventKind.ACCURATE_RESPONSE, EventKind.SKIP_EXERCISE, EventKind.TIMEOUT}
)


class Mode(str, Enum):
    ENV1 = "Env1"
    ENV2 = "Env2"
    ENV3 = "Env3"


class SessionStatus(str, Enum):
    ACTIVE = "Active"
    CLOSED = "Closed"


class SessionClosedError(RuntimeError):
    """Raised when an action is applied to a closed session."""


class BankError(ValueError):
    """Raised when an exercise bank fails validation."""


@dataclass(frozen=True)
class Exercise:
    id: str
    prompt: str
    answer_key: str
    difficulty: float
    default_time: float  # seconds allotted before a timeout

    def public_dict(self) -> dict[str, Any]:
        # the answer key must never leave the server
        return {
            "id": self.id,
            "prompt": self.prompt,
            "difficulty": self.difficulty,
            "default_time": self.default_time,
        }


@dataclass(frozen=True)
class ExerciseBank:
    title: str
    exercises: tuple[Exercise, ...]

    def __len__(self) -> int:
        return len(self.exercises)


def load_exercise_bank(source: str | Path | dict) -> ExerciseBank:
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise BankError(f"{source}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    else:
        raw = source
    if not isinstance(raw, dict) or not isinstance(raw.get("exercises"), list):
        raise BankError("bank must be an object with an 'exercises' array")
    if not raw["exercises"]:
        raise BankError("exercise bank is empty")
    exercises: list[Exercise] = []
    seen: set[str] = set()
    for idx, entry in enumerate(raw["exercises"]):
        where = f"exercise #{idx + 1}"
        if not isinstance(entry, dict):
            raise BankError(f"{where}: not an object")
        ex_id = entry.get("id")
        if not isinstance(ex_id, str) or not ex_id:
            raise BankError(f"{where}: missing id")
        if ex_id in seen:
            raise BankError(f"exercise '{ex_id}': duplicate id")
        seen.add(ex_id)
        key = entry.get("answer_key")
        if not isinstance(key, str) or not key.strip():
            raise BankError(f"exercise '{ex_id}': missing answer_key")
        difficulty = entry.get("difficulty", 0.5)
        if not isinstance(difficulty, (int, float)) or not 0.0 <= difficulty <= 1.0:
            raise BankError(f"exercise '{ex_id}': difficulty outside [0, 1]")
        dt = entry.get("default_time")
        if not isinstance(dt, (int, float)) or dt <= 0:
            raise BankError(f"exercise '{ex_id}': default_time must be positive")
        exercises.append(
            Exercise(
                id=ex_id,
                prompt=str(entry.get("prompt", "")),
                answer_key=key,
                difficulty=float(difficulty),
                default_time=float(dt),
            )
        )
    return ExerciseBank(title=str(raw.get("title", "untitled")), exercises=tuple(exercises))


# ---------------------------------------------------------------------------
# learner actions

class ActionType(str, Enum):
    SUBMIT_ANSWER = "SubmitAnswer"
    REQUEST_HELP = "RequestHelp"
    REJECT_HELP = "RejectHelp"
    SKIP = "Skip"
    THINK = "Think"
    LEAVE = "Leave"


@dataclass(frozen=True)
class LearnerAction:
    type: ActionType
    answer: str | None = None
    rt: float = 0.0          # seconds spent before acting
    effort: float | None = None

    def __post_init__(self) -> None:
        if self.rt < 0.0:
            raise ValueError(f"response time must be >= 0, got {self.rt}")
        if self.type is ActionType.SUBMIT_ANSWER and self.answer is None:
            raise ValueError("SubmitAnswer requires an answer string")
        if self.effort is not None and not 0.0 <= self.effort <= 1.0:
            raise ValueError(f"effort {self.effort} outside [0, 1]")

    def as_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"type": self.type.value, "rt": self.rt}
        if self.answer is not None:
            payload["answer"] = self.answer
        if self.effort is not None:
            payload["effort"] = self.effort
        return payload

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "LearnerAction":
        try:
            action_type = ActionType(raw["type"])
        except (KeyError, ValueError):
            raise ValueError(f"unknown action type {raw.get('type')!r}") from None
        return cls(
            type=action_type,
            answer=raw.get("answer"),
            rt=float(raw.get("rt", 0.0)),
            effort=raw.get("effort"),
        )


_EVENT_BY_ACTION = {
    ActionType.REQUEST_HELP: EventKind.HELP_REQUESTED,
    ActionType.REJECT_HELP: EventKind.HELP_REJECTED,
    ActionType.SKIP: EventKind.SKIP_EXERCISE,
    ActionType.THINK: EventKind.THINKING,
    ActionType.LEAVE: EventKind.LEAVE_CLASS,
}


def grade_answer(exercise: Exercise, answer: str) -> float:
    """Binary grading: exact match after trimming and case folding."""
    return 1.0 if answer.strip().casefold() == exercise.answer_key.strip().casefold() else 0.0


def classify_event(action: LearnerAction, dt: float, grade: float | None = None) -> EventKind:
    """Map an action to its environment event; late submissions are timeouts."""
    if action.type is ActionType.SUBMIT_ANSWER:
        if action.rt > dt:
            return EventKind.TIMEOUT
        if grade is None:
            raise ValueError("an in-time submission needs a grade to classify")
        return (
            EventKind.ACCURATE_RESPONSE if grade >= 0.5 else EventKind.INACCURATE_RESPONSE
        )
    return _EVENT_BY_ACTION[action.type]


# ---------------------------------------------------------------------------
# records and state

@dataclass(frozen=True)
class EventRecord:
    seq: int
    t: float
    subject: str              # "Learner" or "VCA"
    kind: EventKind
    grade: float | None = None
    action: dict[str, Any] | None = None
    appraisal: AppraisalInputs | None = None
    emotions_after: dict[str, float] | None = None
    plan: TacticPlan | None = None
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, Any]:
        # field order is part of the log format; keep it stable
        out: dict[str, Any] = {
            "seq": self.seq,
            "t": self.t,
            "subject": self.subject,
            "kind": self.kind.value,
            "grade": self.grade,
            "action": self.action,
            "appraisal": self.appraisal.as_dict() if self.appraisal else None,
            "emotions": self.emotions_after,
            "plan": self.plan.as_dict() if self.plan else None,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass
class SessionState:
    id: str
    mode: Mode
    profile: PersonalityProfile
    group: LearningGroup
    vca: str | None
    env: EnvironmentalState
    emotions: EmotionState
    bank: ExerciseBank
    kb: KnowledgeBase
    scripts: ScriptCatalog
    weights: WeightTable
    seed: int
    rng: random.Random
    form_answers: dict[str, float]
    vca_skill: float = DEFAULT_VCA_SKILL
    history: list[bool] = field(default_factory=list)
    cursor: int = 0
    status: SessionStatus = SessionStatus.ACTIVE
    log: list[EventRecord] = field(default_factory=list)
    clock: float = 0.0
    closed_reason: str | None = None

    @property
    def current_exercise(self) -> Exercise | None:
        if self.status is SessionStatus.CLOSED or self.cursor >= len(self.bank):
            return None
        return self.bank.exercises[self.cursor]

    def close(self, reason: str) -> None:
        if self.status is SessionStatus.ACTIVE:
            self.status = SessionStatus.CLOSED
            self.closed_reason = reason
            logger.info("session %s closed: %s", self.id, reason)

    def next_seq(self) -> int:
        return len(self.log) + 1


def _prospective_desirability(session: SessionState) -> float:
    """Desirability of getting the pending exercise right."""
    impact = event_impact(
        EventKind.ACCURATE_RESPONSE, session.env.as_vector(), session.weights
    )
    return desirability(impact, session.profile.goals)


def _raise_prospect(session: SessionState) -> None:
    """Recompute Hope/Fear for the pending exercise and fold them in."""
    if session.current_exercise is None:
        return
    inputs = AppraisalInputs(
        desirability=_prospective_desirability(session),
        likelihood=likelihood(session.history),
        unexpectedness=0.0,
    )
    prospect = appraise_first_branch(inputs, session.emotions, Phase.PROSPECT_RAISED)
    session.emotions = session.emotions.merged(
        {
            EmotionKind.HOPE: prospect.get(EmotionKind.HOPE),
            EmotionKind.FEAR: prospect.get(EmotionKind.FEAR),
        }
    )


def start_session(
    mode: Mode,
    form: QuestionnaireForm,
    answers: Mapping[str, float],
    bank: ExerciseBank,
    kb: KnowledgeBase,
    scripts: ScriptCatalog,
    seed: int,
    weights: WeightTable | None = None,
    session_id: str | None = None,
    vca_skill: float = DEFAULT_VCA_SKILL,
) -> SessionState:
    """Score the learner, place them in a group, and open the session."""
    if not 0.0 <= vca_skill <= 1.0:
        raise ValueError(f"vca_skill {vca_skill} outside [0, 1]")
    profile = build_profile(form, answers)
    group = profile.group
    vca = None
    if mode is Mode.ENV3 and group is not LearningGroup.INDEPENDENT:
        vca = select_vca_personality(profile.type_code)
    session = SessionState(
        id=session_id or uuid.uuid4().hex[:12],
        mode=mode,
        profile=profile,
        group=group,
        vca=vca,
        env=EnvironmentalState.initial(independent=group is LearningGroup.INDEPENDENT),
        emotions=EmotionState.neutral(),
        bank=bank,
        kb=kb,
        scripts=scripts,
        weights=weights or WeightTable(),
        seed=seed,
        rng=random.Random(seed),
        form_answers={k: float(v) for k, v in answers.items()},
        vca_skill=vca_skill,
    )
    if mode in (Mode.ENV2, Mode.ENV3):
        _raise_prospect(session)
    logger.info(
        "session %s started: mode=%s type=%s group=%s vca=%s seed=%d",
        session.id, mode.value, profile.type_code, group.value, vca, seed,
    )
    return session


def _append(session: SessionState, record: EventRecord) -> EventRecord:
    session.log.append(record)
    return record


def _step_env1(
    session: SessionState, action: LearnerAction, kind: EventKind, grade: float | None
) -> EventRecord:
    if _effort_event_due(action):
        _append(
            session,
            EventRecord(
                seq=session.next_seq(),
                t=session.clock,
                subject="Learner",
                kind=EventKind.EFFORT_SHOWN,
            ),
        )
    return _append(
        session,
        EventRecord(
            seq=session.next_seq(),
            t=session.clock,
            subject="Learner",
            kind=kind,
            grade=grade,
            action=action.as_dict(),
        ),
    )


def _effort_event_due(action: LearnerAction) -> bool:
    return (
        action.type is ActionType.SUBMIT_ANSWER
        and action.effort is not None
        and action.effort >= EFFORT_EVENT_THRESHOLD
    )


def _vca_outcome(
    session: SessionState, state: EmotionState
) -> tuple[EventRecord | None, EmotionState]:
    """Competitive classmate attempts the same exercise; outcome is appraised
    through the fortunes-of-others branch against the learner's own goals."""
    correct = session.rng.random() < session.vca_skill
    vca_kind = EventKind.ACCURATE_RESPONSE if correct else EventKind.INACCURATE_RESPONSE
    impact = event_impact(vca_kind, session.env.as_vector(), session.weights)
    other_d = desirability(impact, session.profile.goals)
    liking = (
        EmotionKind.LOVE
        if state.get(EmotionKind.LOVE) >= state.get(EmotionKind.HATE)
        else EmotionKind.HATE
    )
    fortunes = appraise_fortunes_of_others(other_d, liking)
    state = state.merged(fortunes)
    record = EventRecord(
        seq=session.next_seq(),
        t=session.clock,
        subject="VCA",
        kind=vca_kind,
        appraisal=AppraisalInputs(other_d, likelihood(session.history), 0.0),
        emotions_after=state.as_dict(),
    )
    return record, state


def vca_outcome_event(session: SessionState) -> EventRecord | None:
    """Public wrapper: only meaningful for competitive Env3 sessions."""
    if (
        session.mode is not Mode.ENV3
        or session.group is not LearningGroup.COMPETITIVE
        or session.vca is None
    ):
        return None
    record, state = _vca_outcome(session, session.emotions)
    session.emotions = state
    return _append(session, record)


def step(session: SessionState, action: LearnerAction) -> tuple[SessionState, EventRecord]:
    """Apply one learner action and return the primary event record.

    A submission with high reported effort also logs an EffortShown record,
    and in competitive Env3 sessions the classmate's attempt is logged
    before the learner's own outcome record.
    """
    if session.status is not SessionStatus.ACTIVE:
        raise SessionClosedError(f"session {session.id} is closed")
    exercise = session.current_exercise
    if exercise is None:  # defensive; active sessions always have one
        raise SessionClosedError(f"session {session.id} has no pending exercise")

    dt = exercise.default_time
    grade: float | None = None
    if action.type is ActionType.SUBMIT_ANSWER and action.rt <= dt:
        grade = grade_answer(exercise, action.answer or "")
    kind = classify_event(action, dt, grade)
    session.clock += action.rt

    if session.mode is Mode.ENV1:
        record = _step_env1(session, action, kind, grade)
        _advance(session, kind, plan=None, action=action)
        return session, record

    # secondary effort event first; it is bookkeeping only
    if _effort_event_due(action):
        _append(
            session,
            EventRecord(
                seq=session.next_seq(),
                t=session.clock,
                subject="Learner",
                kind=EventKind.EFFORT_SHOWN,
            ),
        )

    prior = session.emotions
    prior_valence = prior.dominant_valence

    correct: bool | None = None
    if grade is not None:
        correct = grade >= 0.5
    elif kind is EventKind.TIMEOUT:
        correct = False
    obs = Observation(
        rt=action.rt,
        dt=dt,
        grade=grade if grade is not None else session.env.grade,
        effort=action.effort if action.effort is not None else session.env.effort,
        help_requested=kind is EventKind.HELP_REQUESTED,
        correct=correct,
    )
    session.env = update_environmental_state(session.env, obs)

    lik = likelihood(session.history)
    outcome = 1.0 if EVENT_VALENCE[kind] is Valence.POSITIVE else 0.0
    impact = event_impact(kind, session.env.as_vector(), session.weights)
    inputs = AppraisalInputs(
        desirability=desirability(impact, session.profile.goals),
        likelihood=lik,
        unexpectedness=unexpectedness(lik, outcome),
    )
    state = appraise_first_branch(inputs, prior, Phase.OUTCOME_RESOLVED)

    if kind in _OUTCOME_EVENTS:
        session.history.append(kind is EventKind.ACCURATE_RESPONSE)

    if session.mode is Mode.ENV3 and session.vca is not None:
        attitude = appraise_love_hate(prior_valence, EVENT_VALENCE[kind])
        state = state.merged(
            {
                EmotionKind.LOVE: 1.0 if attitude is EmotionKind.LOVE else 0.0,
                EmotionKind.HATE: 1.0 if attitude is EmotionKind.HATE else 0.0,
            }
        )

    vca_record: EventRecord | None = None
    if (
        session.mode is Mode.ENV3
        and session.group is LearningGroup.COMPETITIVE
        and session.vca is not None
        and action.type is ActionType.SUBMIT_ANSWER
    ):
        vca_record, state = _vca_outcome(session, state)

    ctx = RuleContext(
        mode=session.mode.value,
        group=session.group,
        levels=state.levels(),
        event=kind,
        response_speed=session.env.response_speed,
        vca_prefix=session.vca,
    )
    plan = evaluate_rules(session.kb, ctx)
    plan = realize_tactics(plan, session.scripts, session.rng)

    notes: tuple[str, ...] = ()
    if session.mode is Mode.ENV3:
        notes = tuple(apply_meta_tactics(plan, session))

    session.emotions = state
    if vca_record is not None:
        _append(session, vca_record)
    record = _append(
        session,
        EventRecord(
            seq=session.next_seq(),
            t=session.clock,
            subject="Learner",
            kind=kind,
            grade=grade,
            action=action.as_dict(),
            appraisal=inputs,
            emotions_after=state.as_dict(),
            plan=plan,
            notes=notes,
        ),
    )
    _advance(session, kind, plan=plan, action=action)
    if session.status is SessionStatus.ACTIVE:
        _raise_prospect(session)
    return session, record


def _advance(
    session: SessionState,
    kind: EventKind,
    plan: TacticPlan | None,
    action: LearnerAction,
) -> None:
    """Move the cursor, close on leave or when the bank runs out."""
    if action.type is ActionType.LEAVE:
        session.close("left")
        return
    if session.status is not SessionStatus.ACTIVE:
        return
    advances = kind in _ADVANCING_EVENTS
    if plan is not None and not advances:
        advances = Tactic.SHOW_NEXT_EXERCISE in plan.vta or Tactic.SHOW_NEXT_EXERCISE in plan.vca
    if advances:
        session.cursor += 1
        if session.cursor >= len(session.bank):
            session.close("bank exhausted")


# ---------------------------------------------------------------------------
# log export and replay

def _header_dict(session: SessionState) -> dict[str, Any]:
    return {
        "record": "header",
        "session": session.id,
        "mode": session.mode.value,
        "seed": session.seed,
        "personality": session.profile.type_code,
        "group": session.profile.group.value,
        "vca_skill": session.vca_skill,
        "bank": session.bank.title,
        "answers": dict(sorted(session.form_answers.items())),
    }


def export_log(session: SessionState) -> str:
    """Header line plus one line per event record, newline terminated."""
    lines = [json.dumps(_header_dict(session), separators=(",", ":"), ensure_ascii=False)]
    for record in session.log:
        lines.append(
            json.dumps(record.as_dict(), separators=(",", ":"), ensure_ascii=False)
        )
    return "\n".join(lines) + "\n"


def replay_log(
    log_text: str,
    form: QuestionnaireForm,
    bank: ExerciseBank,
    kb: KnowledgeBase,
    scripts: ScriptCatalog,
    weights: WeightTable | None = None,
) -> str:
    """Re-run the actions recorded in a log and export the resulting log.

    With the same assets and seed the output is byte-identical to the input.
    """
    lines = [line for line in log_text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty log")
    header = json.loads(lines[0])
    if header.get("record") != "header":
        raise ValueError("first log line is not a header")
    session = start_session(
        mode=Mode(header["mode"]),
        form=form,
        answers=header["answers"],
        bank=bank,
        kb=kb,
        scripts=scripts,
        seed=int(header["seed"]),
        weights=weights,
        session_id=header["session"],
        vca_skill=float(header.get("vca_skill", DEFAULT_VCA_SKILL)),
    )
    for line in lines[1:]:
        entry = json.loads(line)
        if entry.get("subject") != "Learner" or entry.get("action") is None:
            continue
        step(session, LearnerAction.from_dict(entry["action"]))
    return export_log(session)
