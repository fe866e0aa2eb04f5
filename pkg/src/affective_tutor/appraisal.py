"""Environment tracking and cognitive appraisal of tutoring events.

The learner's situation is summarized by five variables in [0, 1]
(independence, potential of cooperation, response speed, grade, effort).
Events observed in the environment are turned into a desirability score
against the learner's goals, then into emotion intensities. Emotions are
event scoped: each appraisal recomputes the full set and anything the
current phase does not produce drops back to zero.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

from .personality import GoalVector

logger = logging.getLogger(__name__)


def clamp(x: float, lo: float = 0.0, hi: float = 1.0) -> float:
    return lo if x < lo else hi if x > hi else x


class Valence(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


class EventKind(str, Enum):
    ACCURATE_RESPONSE = "AccurateResponse"
    INACCURATE_RESPONSE = "InaccurateResponse"
    TIMEOUT = "Timeout"
    HELP_REQUESTED = "HelpRequested"
    HELP_REJECTED = "HelpRejected"
    EFFORT_SHOWN = "EffortShown"
    THINKING = "Thinking"
    SKIP_EXERCISE = "SkipExercise"
    LEAVE_CLASS = "LeaveClass"


EVENT_VALENCE: dict[EventKind, Valence] = {
    EventKind.ACCURATE_RESPONSE: Valence.POSITIVE,
    EventKind.EFFORT_SHOWN: Valence.POSITIVE,
    EventKind.THINKING: Valence.POSITIVE,
    EventKind.HELP_REQUESTED: Valence.POSITIVE,
    EventKind.INACCURATE_RESPONSE: Valence.NEGATIVE,
    EventKind.TIMEOUT: Valence.NEGATIVE,
    EventKind.LEAVE_CLASS: Valence.NEGATIVE,
    EventKind.HELP_REJECTED: Valence.NEGATIVE,
    EventKind.SKIP_EXERCISE: Valence.NEGATIVE,
}


class EmotionKind(str, Enum):
    JOY = "Joy"
    DISTRESS = "Distress"
    HOPE = "Hope"
    FEAR = "Fear"
    SATISFACTION = "Satisfaction"
    DISAPPOINTMENT = "Disappointment"
    RELIEF = "Relief"
    FEAR_CONFIRMED = "FearConfirmed"
    HAPPY_FOR = "HappyFor"
    PITY = "Pity"
    GLOATING = "Gloating"
    RESENTMENT = "Resentment"
    LOVE = "Love"
    HATE = "Hate"


# Valence split used for the dominant-valence sums. Gloating and HappyFor
# count as positive, Pity and Resentment as negative.
POSITIVE_EMOTIONS = frozenset(
    {
        EmotionKind.JOY,
        EmotionKind.HOPE,
        EmotionKind.SATISFACTION,
        EmotionKind.RELIEF,
        EmotionKind.GLOATING,
        EmotionKind.HAPPY_FOR,
        EmotionKind.LOVE,
    }
)
NEGATIVE_EMOTIONS = frozenset(
    {
        EmotionKind.DISTRESS,
        EmotionKind.FEAR,
        EmotionKind.DISAPPOINTMENT,
        EmotionKind.FEAR_CONFIRMED,
        EmotionKind.PITY,
        EmotionKind.RESENTMENT,
        EmotionKind.HATE,
    }
)


class Level(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


_LEVEL_RANK = {Level.LOW: 0, Level.MEDIUM: 1, Level.HIGH: 2}


def level_rank(level: Level) -> int:
    return _LEVEL_RANK[level]


def linguistic_level(intensity: float) -> Level:
    """Map an intensity to Low [0, 1/3), Medium [1/3, 2/3), High [2/3, 1]."""
    if not 0.0 <= intensity <= 1.0:
        raise ValueError(f"intensity {intensity} outside [0, 1]")
    if intensity < 1.0 / 3.0:
        return Level.LOW
    if intensity < 2.0 / 3.0:
        return Level.MEDIUM
    return Level.HIGH


class Phase(str, Enum):
    PROSPECT_RAISED = "ProspectRaised"
    OUTCOME_RESOLVED = "OutcomeResolved"


# ---------------------------------------------------------------------------
# environmental state

@dataclass(frozen=True)
class EnvironmentalState:
    independence: float = 0.0
    potential_of_cooperation: float = 1.0
    response_speed: float = 0.0
    grade: float = 0.0
    effort: float = 0.0
    exercises_attempted: int = 0
    help_requests: int = 0
    correct_count: int = 0

    @classmethod
    def initial(cls, independent: bool) -> "EnvironmentalState":
        # learners placed in the independent group start fully independent
        ind = 1.0 if independent else 0.0
        return cls(independence=ind, potential_of_cooperation=1.0 - ind)

    def as_vector(self) -> tuple[float, float, float, float, float]:
        return (
            self.independence,
            self.potential_of_cooperation,
            self.response_speed,
            self.grade,
            self.effort,
        )


@dataclass(frozen=True)
class Observation:
    """One observed unit of learner activity feeding the state update."""
    rt: float
    dt: float
    grade: float
    effort: float
    help_requested: bool = False
    correct: bool | None = None


def update_environmental_state(
    state: EnvironmentalState, obs: Observation
) -> EnvironmentalState:
    """Fold an observation into the counters and recompute the five variables.

    Independence is one minus the help-request share; potential of
    cooperation is its complement, so the two always sum to one.
    """
    if obs.dt <= 0.0:
        raise ValueError(f"allotted time must be positive, got {obs.dt}")
    if obs.rt < 0.0:
        raise ValueError(f"response time must be >= 0, got {obs.rt}")
    if not 0.0 <= obs.grade <= 1.0:
        raise ValueError(f"grade {obs.grade} outside [0, 1]")
    if not 0.0 <= obs.effort <= 1.0:
        raise ValueError(f"effort {obs.effort} outside [0, 1]")

    attempted = state.exercises_attempted + 1
    helps = state.help_requests + (1 if obs.help_requested else 0)
    correct = state.correct_count + (1 if obs.correct else 0)

    independence = 1.0 - helps / max(1, attempted)
    return EnvironmentalState(
        independence=independence,
        potential_of_cooperation=1.0 - independence,
        response_speed=clamp(1.0 - obs.rt / obs.dt),
        grade=obs.grade,
        effort=obs.effort,
        exercises_attempted=attempted,
        help_requests=helps,
        correct_count=correct,
    )


# ---------------------------------------------------------------------------
# weights and value computation

VARIABLE_ORDER = (
    "independence",
    "potential_of_cooperation",
    "response_speed",
    "grade",
    "effort",
)

# default variable-by-goal weights
_DEFAULT_WEIGHTS = {
    "independence": (3.0, 1.0, 1.0, 1.0),
    "potential_of_cooperation": (1.0, 1.0, 1.0, 3.0),
    "response_speed": (1.0, 1.0, 3.0, 1.0),
    "grade": (2.0, 1.0, 1.0, 2.0),
    "effort": (1.0, 3.0, 1.0, 1.0),
}


@dataclass(frozen=True)
class WeightTable:
    """Non-negative weight of each environmental variable under each goal."""
    rows: Mapping[str, tuple[float, float, float, float]] = field(
        default_factory=lambda: dict(_DEFAULT_WEIGHTS)
    )

    def __post_init__(self) -> None:
        missing = [v for v in VARIABLE_ORDER if v not in self.rows]
        if missing:
            raise ValueError(f"weight table missing rows: {', '.join(missing)}")
        for name in VARIABLE_ORDER:
            row = self.rows[name]
            if len(row) != 4:
                raise ValueError(f"row '{name}' must have four goal weights")
            if any(w < 0 for w in row):
                raise ValueError(f"row '{name}' has a negative weight")
        for j in range(4):
            if sum(self.rows[name][j] for name in VARIABLE_ORDER) <= 0.0:
                raise ValueError(f"goal column {j + 1} has zero total weight")

    def column(self, goal_index: int) -> tuple[float, ...]:
        """Weights of the five variables under goal_index (0-based)."""
        if not 0 <= goal_index < 4:
            raise ValueError(f"goal index {goal_index} outside 0..3")
        return tuple(self.rows[name][goal_index] for name in VARIABLE_ORDER)


def load_weight_table(source: str | Path | dict) -> WeightTable:
    if isinstance(source, (str, Path)):
        raw = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        raw = source
    rows = raw.get("weights") if isinstance(raw, dict) else None
    if not isinstance(rows, dict):
        raise ValueError("weight table file must contain a 'weights' object")
    parsed = {}
    for name, row in rows.items():
        if name not in VARIABLE_ORDER:
            raise ValueError(f"unknown variable '{name}' in weight table")
        parsed[name] = tuple(float(w) for w in row)
    return WeightTable(rows=parsed)


def value_function(weights: Sequence[float], values: Sequence[float]) -> float:
    """Weighted mean of variable values; stays in [0, 1] for valid inputs."""
    if len(weights) != len(values):
        raise ValueError("weights and values must have equal length")
    total = float(sum(weights))
    if total <= 0.0:
        raise ValueError("weights must have positive sum")
    for w in weights:
        if w < 0.0:
            raise ValueError(f"negative weight {w}")
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"variable value {v} outside [0, 1]")
    return sum(w * v for w, v in zip(weights, values)) / total


def event_impact(
    kind: EventKind,
    values: Sequence[float],
    table: WeightTable | None = None,
) -> tuple[float, float, float, float]:
    """Per-goal impact of an event: its valence sign times the goal's value."""
    table = table or WeightTable()
    sign = 1.0 if EVENT_VALENCE[kind] is Valence.POSITIVE else -1.0
    return tuple(sign * value_function(table.column(j), values) for j in range(4))  # type: ignore[return-value]


def desirability(impact: Sequence[float], goals: GoalVector) -> float:
    """Goal-weighted mean of the impact row, in [-1, 1]."""
    if len(impact) != 4:
        raise ValueError("impact row must have four components")
    for a in impact:
        if not -1.0 <= a <= 1.0:
            raise ValueError(f"impact value {a} outside [-1, 1]")
    total = sum(goals)
    if total <= 0.0:
        raise ValueError("goal vector must have positive mass")
    return sum(a * g for a, g in zip(impact, goals)) / total


def likelihood(history: Sequence[bool]) -> float:
    """Running success ratio; an empty history counts as even odds."""
    if not history:
        return 0.5
    return sum(1 for h in history if h) / len(history)


def unexpectedness(likelihood_value: float, outcome: float) -> float:
    if not 0.0 <= likelihood_value <= 1.0:
        raise ValueError(f"likelihood {likelihood_value} outside [0, 1]")
    if not 0.0 <= outcome <= 1.0:
        raise ValueError(f"outcome {outcome} outside [0, 1]")
    return abs(outcome - likelihood_value)


# ---------------------------------------------------------------------------
# emotions

@dataclass(frozen=True)
class AppraisalInputs:
    desirability: float
    likelihood: float
    unexpectedness: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.desirability <= 1.0:
            raise ValueError(f"desirability {self.desirability} outside [-1, 1]")
        if not 0.0 <= self.likelihood <= 1.0:
            raise ValueError(f"likelihood {self.likelihood} outside [0, 1]")
        if not 0.0 <= self.unexpectedness <= 1.0:
            raise ValueError(f"unexpectedness {self.unexpectedness} outside [0, 1]")

    def as_dict(self) -> dict[str, float]:
        return {
            "desirability": self.desirability,
            "likelihood": self.likelihood,
            "unexpectedness": self.unexpectedness,
        }


@dataclass(frozen=True)
class EmotionState:
    intensities: Mapping[EmotionKind, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for kind, x in self.intensities.items():
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"{kind.value} intensity {x} outside [0, 1]")
        if self.get(EmotionKind.LOVE) > 0.0 and self.get(EmotionKind.HATE) > 0.0:
            raise ValueError("Love and Hate cannot be active together")

    @classmethod
    def neutral(cls) -> "EmotionState":
        return cls(intensities={})

    def get(self, kind: EmotionKind) -> float:
        return self.intensities.get(kind, 0.0)

    def level(self, kind: EmotionKind) -> Level:
        return linguistic_level(self.get(kind))

    def levels(self) -> dict[EmotionKind, Level]:
        return {kind: self.level(kind) for kind in EmotionKind}

    def with_values(self, **by_name: float) -> "EmotionState":
        updated = dict(self.intensities)
        for name, x in by_name.items():
            updated[EmotionKind[name.upper()]] = x
        return EmotionState(intensities=updated)

    def merged(self, extra: Mapping[EmotionKind, float]) -> "EmotionState":
        updated = dict(self.intensities)
        updated.update(extra)
        return EmotionState(intensities=updated)

    @property
    def dominant_valence(self) -> Valence:
        pos = sum(self.get(k) for k in POSITIVE_EMOTIONS)
        neg = sum(self.get(k) for k in NEGATIVE_EMOTIONS)
        return Valence.POSITIVE if pos >= neg else Valence.NEGATIVE

    def as_dict(self) -> dict[str, float]:
        return {kind.value: self.get(kind) for kind in EmotionKind}


def appraise_first_branch(
    inputs: AppraisalInputs, prior: EmotionState, phase: Phase
) -> EmotionState:
    """Well-being and prospect emotions for one event.

    ProspectRaised populates Hope or Fear from the prospect's desirability
    scaled by likelihood. OutcomeResolved populates Joy or Distress and
    settles the prior prospect: a good outcome confirms Hope (Satisfaction)
    and disconfirms Fear (Relief); a bad outcome is the mirror image, with
    unexpectedness boosting the confirmation terms. Everything the phase
    does not produce is reset to zero.
    """
    d = inputs.desirability
    out: dict[EmotionKind, float] = {}
    if phase is Phase.PROSPECT_RAISED:
        out[EmotionKind.HOPE] = clamp(inputs.likelihood * max(0.0, d))
        out[EmotionKind.FEAR] = clamp(inputs.likelihood * max(0.0, -d))
    elif phase is Phase.OUTCOME_RESOLVED:
        mu = (1.0 + inputs.unexpectedness) / 2.0
        hope = prior.get(EmotionKind.HOPE)
        fear = prior.get(EmotionKind.FEAR)
        if d > 0.0:
            out[EmotionKind.JOY] = clamp(d)
            out[EmotionKind.SATISFACTION] = clamp(hope * mu)
            out[EmotionKind.RELIEF] = clamp(fear * mu)
        elif d < 0.0:
            out[EmotionKind.DISTRESS] = clamp(-d)
            out[EmotionKind.DISAPPOINTMENT] = clamp(hope * mu)
            out[EmotionKind.FEAR_CONFIRMED] = clamp(fear * mu)
        # a neutral outcome stirs nothing
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown phase {phase!r}")
    return EmotionState(intensities={k: v for k, v in out.items() if v > 0.0})


def appraise_fortunes_of_others(
    other_desirability: float, liking: EmotionKind
) -> dict[EmotionKind, float]:
    """Reaction to the classmate's outcome, gated by Love or Hate toward it.

    Exactly one of HappyFor, Pity, Gloating, Resentment is nonzero, with
    intensity |other_desirability|.
    """
    if liking not in (EmotionKind.LOVE, EmotionKind.HATE):
        raise ValueError("liking must be Love or Hate")
    if not -1.0 <= other_desirability <= 1.0:
        raise ValueError(f"desirability {other_desirability} outside [-1, 1]")

    result = {
        EmotionKind.HAPPY_FOR: 0.0,
        EmotionKind.PITY: 0.0,
        EmotionKind.GLOATING: 0.0,
        EmotionKind.RESENTMENT: 0.0,
    }
    magnitude = abs(other_desirability)
    if magnitude == 0.0:
        return result
    good = other_desirability > 0.0
    loved = liking is EmotionKind.LOVE
    if good and loved:
        result[EmotionKind.HAPPY_FOR] = magnitude
    elif not good and loved:
        result[EmotionKind.PITY] = magnitude
    elif not good and not loved:
        result[EmotionKind.GLOATING] = magnitude
    else:
        result[EmotionKind.RESENTMENT] = magnitude
    return result


def appraise_love_hate(current_valence: Valence, event_valence: Valence) -> EmotionKind:
    """Attitude toward the classmate; the learner's current mood decides.

    All four mood/event combinations are covered: a negative mood yields
    Hate and a positive mood yields Love whatever the event's sign.
    """
    del event_valence  # attended but not decisive
    if current_valence is Valence.NEGATIVE:
        return EmotionKind.HATE
    return EmotionKind.LOVE
