"""Scripted learners for exercising whole sessions without a human.

A learner profile is a small parameter bundle (skill, pace, help seeking,
effort, patience) plus questionnaire answers. The simulator drives a
session from those parameters under its own seeded generator, separate
from the session's generator, so identical inputs always produce
identical logs and reports.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .appraisal import WeightTable
from .personality import ALL_TYPES, QuestionnaireForm
from .session import (
    ActionType,
    ExerciseBank,
    LearnerAction,
    Mode,
    SessionState,
    SessionStatus,
    export_log,
    start_session,
    step,
)
from .tactics import KnowledgeBase, ScriptCatalog

logger = logging.getLogger(__name__)

WRONG_ANSWER_TEXT = "no idea"

HELP_RT_SHARE = 0.15   # pause before asking for help, as share of allotted time
SKIP_RT_SHARE = 0.25   # pause before giving an exercise up


class SimulationError(RuntimeError):
    """Raised when a batch run fails; names the (profile, mode) pair."""


@dataclass(frozen=True)
class LearnerProfile:
    name: str
    questionnaire_answers: Mapping[str, float]
    skill: float             # chance a submission is correct
    speed_factor: float      # response time scale; above 1 risks timeouts
    help_propensity: float   # chance to ask for help before submitting
    effort_level: float
    quit_after: int | None = None  # submissions before walking out

    def __post_init__(self) -> None:
        for label, value in (
            ("skill", self.skill),
            ("help_propensity", self.help_propensity),
            ("effort_level", self.effort_level),
        ):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{label} {value} outside [0, 1]")
        if not 0.0 < self.speed_factor <= 2.0:
            raise ValueError(f"speed_factor {self.speed_factor} outside (0, 2]")
        if self.quit_after is not None and self.quit_after < 0:
            raise ValueError("quit_after must be >= 0")


def load_profiles(source: str | Path | list) -> list[LearnerProfile]:
    if isinstance(source, (str, Path)):
        raw = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        raw = source
    if not isinstance(raw, list) or not raw:
        raise ValueError("profiles file must be a non-empty JSON array")
    profiles = []
    for entry in raw:
        profiles.append(
            LearnerProfile(
                name=str(entry["name"]),
                questionnaire_answers={
                    k: float(v) for k, v in entry["questionnaire_answers"].items()
                },
                skill=float(entry["skill"]),
                speed_factor=float(entry["speed_factor"]),
                help_propensity=float(entry["help_propensity"]),
                effort_level=float(entry["effort_level"]),
                quit_after=entry.get("quit_after"),
            )
        )
    return profiles


_SKILLS = (0.85, 0.6, 0.35)
_SPEEDS = (0.7, 0.95, 1.25, 0.85)
_HELPS = (0.1, 0.35, 0.55)
_EFFORTS = (0.75, 0.45, 0.9, 0.3)


def canonical_profiles(form: QuestionnaireForm) -> list[LearnerProfile]:
    """One profile per type, answering +1 on items keyed to its own letters.

    Such answers score unambiguously: every dimension mean lands on +1 or
    -1, never on a tie. Behavior parameters are varied deterministically
    so batches cover fast, slow, helpless and help-hungry learners.
    """
    profiles = []
    for i, code in enumerate(ALL_TYPES):
        answers = {
            item.id: 1.0 if item.keyed_pole in code else -1.0 for item in form.items
        }
        profiles.append(
            LearnerProfile(
                name=f"{code}-learner",
                questionnaire_answers=answers,
                skill=_SKILLS[i % len(_SKILLS)],
                speed_factor=_SPEEDS[i % len(_SPEEDS)],
                help_propensity=_HELPS[i % len(_HELPS)],
                effort_level=_EFFORTS[i % len(_EFFORTS)],
                quit_after=None,
            )
        )
    return profiles


# ---------------------------------------------------------------------------
# driving one session

def _session_stats(session: SessionState, profile: LearnerProfile, seed: int) -> dict[str, Any]:
    events: dict[str, int] = {}
    tactics: dict[str, dict[str, int]] = {"VTA": {}, "VCA": {}}
    trajectory: list[dict[str, Any]] = []
    love_seen = False
    hate_seen = False
    for record in session.log:
        events[record.kind.value] = events.get(record.kind.value, 0) + 1
        if record.plan is not None:
            for behavior in record.plan.realized:
                bucket = tactics[behavior.actor.value]
                bucket[behavior.tactic.value] = bucket.get(behavior.tactic.value, 0) + 1
        if record.emotions_after is not None and record.subject == "Learner":
            love_seen = love_seen or record.emotions_after.get("Love", 0.0) > 0.0
            hate_seen = hate_seen or record.emotions_after.get("Hate", 0.0) > 0.0
            top = max(record.emotions_after.items(), key=lambda kv: (kv[1], kv[0]))
            trajectory.append({"seq": record.seq, "top": top[0], "x": round(top[1], 6)})
    return {
        "profile": profile.name,
        "mode": session.mode.value,
        "seed": seed,
        "personality": session.profile.type_code,
        "initial_group": session.profile.group.value,
        "final_group": session.group.value,
        "status": session.status.value,
        "closed_reason": session.closed_reason,
        "records": len(session.log),
        "events": dict(sorted(events.items())),
        "tactics": {
            "VTA": dict(sorted(tactics["VTA"].items())),
            "VCA": dict(sorted(tactics["VCA"].items())),
        },
        "love_seen": love_seen,
        "hate_seen": hate_seen,
        "trajectory": trajectory,
    }


def simulate_session(
    profile: LearnerProfile,
    bank: ExerciseBank,
    kb: KnowledgeBase,
    scripts: ScriptCatalog,
    mode: Mode,
    seed: int,
    form: QuestionnaireForm,
    weights: WeightTable | None = None,
    vca_skill: float = 0.6,
) -> tuple[SessionState, dict[str, Any]]:
    """Run one scripted session to completion; returns the session and stats."""
    learner_rng = random.Random(f"{seed}:learner")
    session = start_session(
        mode=mode,
        form=form,
        answers=profile.questionnaire_answers,
        bank=bank,
        kb=kb,
        scripts=scripts,
        seed=seed,
        weights=weights,
        session_id=f"sim-{profile.name}-{mode.value}",
        vca_skill=vca_skill,
    )
    submissions = 0
    while session.status is SessionStatus.ACTIVE:
        if profile.quit_after is not None and submissions >= profile.quit_after:
            step(session, LearnerAction(type=ActionType.LEAVE, rt=0.0))
            break
        exercise = session.current_exercise
        assert exercise is not None  # active sessions always hold one
        dt = exercise.default_time

        # fixed draw order per attempt (help?, pace, correct?) keeps runs
        # with different skill values aligned on the same seed
        wants_help = learner_rng.random() < profile.help_propensity
        pace = learner_rng.uniform(0.5, 1.0)
        is_correct = learner_rng.random() < profile.skill

        if wants_help:
            step(
                session,
                LearnerAction(type=ActionType.REQUEST_HELP, rt=HELP_RT_SHARE * dt),
            )
            if session.status is not SessionStatus.ACTIVE:
                break

        rt = profile.speed_factor * dt * pace
        answer = exercise.answer_key if is_correct else WRONG_ANSWER_TEXT
        before = session.cursor
        step(
            session,
            LearnerAction(
                type=ActionType.SUBMIT_ANSWER,
                answer=answer,
                rt=rt,
                effort=profile.effort_level,
            ),
        )
        submissions += 1
        if session.status is not SessionStatus.ACTIVE:
            break
        if session.cursor == before:
            # wrong answer left the exercise open; give it up and move on
            step(session, LearnerAction(type=ActionType.SKIP, rt=SKIP_RT_SHARE * dt))
    stats = _session_stats(session, profile, seed)
    return session, stats


# ---------------------------------------------------------------------------
# batches

@dataclass
class SimulationReport:
    base_seed: int
    sessions: list[dict[str, Any]] = field(default_factory=list)

    def aggregate(self) -> dict[str, Any]:
        groups: dict[str, int] = {}
        tactic_freq: dict[str, dict[str, dict[str, int]]] = {}
        total_events = 0
        for s in self.sessions:
            groups[s["initial_group"]] = groups.get(s["initial_group"], 0) + 1
            per_mode = tactic_freq.setdefault(s["mode"], {"VTA": {}, "VCA": {}})
            for actor in ("VTA", "VCA"):
                for tactic, n in s["tactics"][actor].items():
                    per_mode[actor][tactic] = per_mode[actor].get(tactic, 0) + n
            total_events += s["records"]
        return {
            "base_seed": self.base_seed,
            "sessions": len(self.sessions),
            "total_events": total_events,
            "group_distribution": dict(sorted(groups.items())),
            "tactic_frequency": {
                mode: {
                    "VTA": dict(sorted(freq["VTA"].items())),
                    "VCA": dict(sorted(freq["VCA"].items())),
                }
                for mode, freq in sorted(tactic_freq.items())
            },
        }

    def to_json(self) -> str:
        payload = {"aggregate": self.aggregate(), "sessions": self.sessions}
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        agg = self.aggregate()
        lines = [
            f"batch of {agg['sessions']} sessions, base seed {agg['base_seed']}",
            f"total event records: {agg['total_events']}",
            "group distribution: "
            + ", ".join(f"{g}={n}" for g, n in agg["group_distribution"].items()),
            "",
            f"{'session':34} {'mode':5} {'group':12} {'events':>6} {'vta':>4} {'vca':>4}",
        ]
        for s in self.sessions:
            vta = sum(s["tactics"]["VTA"].values())
            vca = sum(s["tactics"]["VCA"].values())
            name = f"{s['profile']}/{s['seed']}"
            lines.append(
                f"{name:34} {s['mode']:5} {s['final_group']:12} "
                f"{s['records']:>6} {vta:>4} {vca:>4}"
            )
        return "\n".join(lines) + "\n"


def batch_simulate(
    profiles: Sequence[LearnerProfile],
    bank: ExerciseBank,
    kb: KnowledgeBase,
    scripts: ScriptCatalog,
    modes: Iterable[Mode],
    base_seed: int,
    form: QuestionnaireForm,
    weights: WeightTable | None = None,
    vca_skill: float = 0.6,
    keep_sessions: bool = False,
) -> SimulationReport | tuple[SimulationReport, list[SessionState]]:
    """One session per (profile, mode), seeded base_seed + running index."""
    report = SimulationReport(base_seed=base_seed)
    kept: list[SessionState] = []
    index = 0
    for profile in profiles:
        for mode in modes:
            seed = base_seed + index
            index += 1
            try:
                session, stats = simulate_session(
                    profile, bank, kb, scripts, mode, seed, form,
                    weights=weights, vca_skill=vca_skill,
                )
            except Exception as exc:
                raise SimulationError(
                    f"simulation failed for profile '{profile.name}' in {mode.value}: {exc}"
                ) from exc
            report.sessions.append(stats)
            if keep_sessions:
                kept.append(session)
    logger.info("batch complete: %d sessions", len(report.sessions))
    if keep_sessions:
        return report, kept
    return report


def write_batch_outputs(
    report: SimulationReport, sessions: Sequence[SessionState], out_dir: str | Path
) -> list[Path]:
    """Write one log per session plus the JSON and text reports."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for session in sessions:
        path = out / f"{session.id}.ndjson"
        path.write_text(export_log(session), encoding="utf-8")
        written.append(path)
    report_json = out / "report.json"
    report_json.write_text(report.to_json(), encoding="utf-8")
    written.append(report_json)
    report_txt = out / "report.txt"
    report_txt.write_text(report.to_text(), encoding="utf-8")
    written.append(report_txt)
    return written
