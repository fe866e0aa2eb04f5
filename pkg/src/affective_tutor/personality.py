"""Questionnaire scoring: type letters, learning goals, group placement.

A questionnaire form is a JSON document of Likert items. Each item is keyed
to one pole of one dimension (EI, SN, TF, JP) and optionally carries weights
that tie agreement with the item to one or more learning goals.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping

logger = logging.getLogger(__name__)

DIMENSIONS = ("EI", "SN", "TF", "JP")
# first pole wins only on a strictly positive score; ties fall to the second
POLES = {"EI": ("E", "I"), "SN": ("S", "N"), "TF": ("T", "F"), "JP": ("J", "P")}

GOAL_COUNT = 4


class LearningGroup(str, Enum):
    INDEPENDENT = "Independent"
    COOPERATIVE = "Cooperative"
    COMPETITIVE = "Competitive"


# 16-type partition: 6 independent, 7 cooperative, 3 competitive.
GROUP_BY_TYPE: dict[str, LearningGroup] = {
    "INTJ": LearningGroup.INDEPENDENT,
    "INFP": LearningGroup.INDEPENDENT,
    "ISTJ": LearningGroup.INDEPENDENT,
    "INTP": LearningGroup.INDEPENDENT,
    "ISFP": LearningGroup.INDEPENDENT,
    "ISTP": LearningGroup.INDEPENDENT,
    "INFJ": LearningGroup.COOPERATIVE,
    "ENFP": LearningGroup.COOPERATIVE,
    "ISFJ": LearningGroup.COOPERATIVE,
    "ESFP": LearningGroup.COOPERATIVE,
    "ESTP": LearningGroup.COOPERATIVE,
    "ENFJ": LearningGroup.COOPERATIVE,
    "ESTJ": LearningGroup.COOPERATIVE,
    "ENTP": LearningGroup.COMPETITIVE,
    "ENTJ": LearningGroup.COMPETITIVE,
    "ESFJ": LearningGroup.COMPETITIVE,
}

ALL_TYPES = tuple(GROUP_BY_TYPE)

_FLIP = {"E": "I", "I": "E", "S": "N", "N": "S"}


class FormError(ValueError):
    """Raised when a questionnaire form or an answer set is unusable."""


@dataclass(frozen=True)
class QuestionItem:
    id: str
    prompt: str
    dimension: str            # one of DIMENSIONS
    keyed_pole: str           # pole the item is written toward
    goal_weights: Mapping[int, float]  # goal index (1..4) -> weight >= 0


@dataclass(frozen=True)
class QuestionnaireForm:
    version: str
    items: tuple[QuestionItem, ...]

    def items_for(self, dimension: str) -> list[QuestionItem]:
        return [it for it in self.items if it.dimension == dimension]


@dataclass(frozen=True)
class DimensionScores:
    """Signed per-dimension means; positive leans to the first pole."""
    ei: float
    sn: float
    tf: float
    jp: float

    def as_dict(self) -> dict[str, float]:
        return {"EI": self.ei, "SN": self.sn, "TF": self.tf, "JP": self.jp}


@dataclass(frozen=True)
class GoalVector:
    """Weights for the four learning goals, each in [0, 1], sum > 0."""
    values: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.values) != GOAL_COUNT:
            raise ValueError("goal vector needs exactly four components")
        for g in self.values:
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"goal weight {g} outside [0, 1]")
        if sum(self.values) <= 0.0:
            raise ValueError("goal vector must have positive mass")

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


UNIFORM_GOALS = GoalVector((0.25, 0.25, 0.25, 0.25))


@dataclass(frozen=True)
class PersonalityProfile:
    scores: DimensionScores
    type_code: str
    group: LearningGroup
    goals: GoalVector


def load_form(source: str | Path | dict) -> QuestionnaireForm:
    """Load and validate a questionnaire form from a path or parsed dict."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormError(f"{source}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    else:
        raw = source

    if not isinstance(raw, dict) or not isinstance(raw.get("items"), list):
        raise FormError("form must be an object with an 'items' array")

    items: list[QuestionItem] = []
    seen: set[str] = set()
    for idx, entry in enumerate(raw["items"]):
        where = f"item #{idx + 1}"
        if not isinstance(entry, dict):
            raise FormError(f"{where}: not an object")
        item_id = entry.get("id")
        if not isinstance(item_id, str) or not item_id:
            raise FormError(f"{where}: missing id")
        where = f"item '{item_id}'"
        if item_id in seen:
            raise FormError(f"{where}: duplicate id")
        seen.add(item_id)
        dim = entry.get("dimension")
        if dim not in DIMENSIONS:
            raise FormError(f"{where}: unknown dimension {dim!r}")
        pole = entry.get("keyed_pole")
        if pole not in POLES[dim]:
            raise FormError(f"{where}: keyed_pole {pole!r} does not belong to {dim}")
        weights: dict[int, float] = {}
        for key, value in (entry.get("goal_weights") or {}).items():
            try:
                goal = int(key)
            except (TypeError, ValueError):
                raise FormError(f"{where}: goal key {key!r} is not an integer") from None
            if not 1 <= goal <= GOAL_COUNT:
                raise FormError(f"{where}: goal index {goal} outside 1..{GOAL_COUNT}")
            if not isinstance(value, (int, float)) or value < 0:
                raise FormError(f"{where}: weight for goal {goal} must be >= 0")
            weights[goal] = float(value)
        items.append(
            QuestionItem(
                id=item_id,
                prompt=str(entry.get("prompt", "")),
                dimension=dim,
                keyed_pole=pole,
                goal_weights=weights,
            )
        )

    form = QuestionnaireForm(version=str(raw.get("version", "unversioned")), items=tuple(items))

    for dim in DIMENSIONS:
        if not form.items_for(dim):
            raise FormError(f"form has no items for dimension {dim}")
    for goal in range(1, GOAL_COUNT + 1):
        total = sum(it.goal_weights.get(goal, 0.0) for it in form.items)
        if total <= 0.0:
            raise FormError(f"form has zero total weight for goal {goal}")

    logger.debug("loaded form %s with %d items", form.version, len(form.items))
    return form


def _check_answers(form: QuestionnaireForm, answers: Mapping[str, float]) -> None:
    known = {it.id for it in form.items}
    unknown = sorted(set(answers) - known)
    if unknown:
        raise FormError(f"answers reference unknown items: {', '.join(unknown)}")
    missing = sorted(known - set(answers))
    if missing:
        raise FormError(f"missing answers for items: {', '.join(missing)}")
    for item_id, value in answers.items():
        if not isinstance(value, (int, float)) or not -1.0 <= value <= 1.0:
            raise FormError(f"answer for '{item_id}' must be a number in [-1, 1]")


def score_questionnaire(
    form: QuestionnaireForm, answers: Mapping[str, float]
) -> tuple[DimensionScores, str]:
    """Score answers into per-dimension means and a four-letter type code.

    Agreement with an item counts toward its keyed pole; the per-dimension
    score is the mean signed agreement, positive toward the first pole.
    """
    _check_answers(form, answers)

    means: dict[str, float] = {}
    for dim in DIMENSIONS:
        first = POLES[dim][0]
        items = form.items_for(dim)
        total = 0.0
        for it in items:
            a = float(answers[it.id])
            total += a if it.keyed_pole == first else -a
        means[dim] = total / len(items)

    letters = []
    for dim in DIMENSIONS:
        first, second = POLES[dim]
        letters.append(first if means[dim] > 0.0 else second)
    code = "".join(letters)
    return DimensionScores(means["EI"], means["SN"], means["TF"], means["JP"]), code


def derive_goal_vector(form: QuestionnaireForm, answers: Mapping[str, float]) -> GoalVector:
    """Aggregate positive agreement into the four goal weights.

    Each goal's weight is the weighted share of endorsed items, so a learner
    who rejects everything falls back to the uniform vector.
    """
    _check_answers(form, answers)

    raw: list[float] = []
    for goal in range(1, GOAL_COUNT + 1):
        num = 0.0
        den = 0.0
        for it in form.items:
            w = it.goal_weights.get(goal, 0.0)
            if w <= 0.0:
                continue
            den += w
            num += w * max(0.0, float(answers[it.id]))
        raw.append(num / den if den > 0.0 else 0.0)

    if all(v == 0.0 for v in raw):
        return UNIFORM_GOALS
    clamped = tuple(min(1.0, max(0.0, v)) for v in raw)
    return GoalVector(clamped)  # type: ignore[arg-type]


def assign_group(type_code: str) -> LearningGroup:
    try:
        return GROUP_BY_TYPE[type_code]
    except KeyError:
        raise ValueError(f"unknown personality type {type_code!r}") from None


def select_vca_personality(type_code: str, group: LearningGroup | None = None) -> str:
    """Two-letter prefix of the opposed classmate personality (E/I and S/N flipped).

    `group` is the learner's current group when it differs from the type's
    default (the tutor can reassign groups mid-session); a learner working
    independently gets no classmate.
    """
    if type_code not in GROUP_BY_TYPE:
        raise ValueError(f"unknown personality type {type_code!r}")
    if group is None:
        group = GROUP_BY_TYPE[type_code]
    if group is LearningGroup.INDEPENDENT:
        raise ValueError(f"{type_code} learns independently; no classmate is assigned")
    return _FLIP[type_code[0]] + _FLIP[type_code[1]]


def build_profile(form: QuestionnaireForm, answers: Mapping[str, float]) -> PersonalityProfile:
    """Convenience: score, type, group and goal vector in one pass."""
    scores, code = score_questionnaire(form, answers)
    return PersonalityProfile(
        scores=scores,
        type_code=code,
        group=assign_group(code),
        goals=derive_goal_vector(form, answers),
    )
