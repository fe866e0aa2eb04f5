"""Rule-based tactic selection and behavior realization for the two agents.

The knowledge base is an ordered list of if/then rules over the learner's
group, emotion levels, the observed event, response speed relative to a
threshold, and the classmate's personality prefix. Evaluation is first
match in file order. Conclusions name tactics for the virtual teacher
(VTA) and the virtual classmate (VCA); which tactics each agent may use
depends on the learner's group, and the loader rejects rules that could
conclude an illegal pairing.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, TYPE_CHECKING

from .appraisal import EmotionKind, EventKind, Level, level_rank
from .personality import LearningGroup, select_vca_personality

if TYPE_CHECKING:  # only for type hints; session imports this module
    from .session import SessionState

logger = logging.getLogger(__name__)

MODES = ("Env1", "Env2", "Env3")
RULE_MODES = ("Env2", "Env3")  # Env1 never consults the knowledge base

VCA_PREFIXES = ("IN", "IS", "EN", "ES")


class Actor(str, Enum):
    VTA = "VTA"
    VCA = "VCA"


class Tactic(str, Enum):
    INCREASE_STUDENT_SELF_ABILITY = "IncreaseStudentSelfAbility"
    INCREASE_STUDENT_EFFORT = "IncreaseStudentEffort"
    CONGRATULATE_STUDENT = "CongratulateStudent"
    CONGRATULATE_CLASSMATE = "CongratulateClassmate"
    ENCOURAGE_STUDENT = "EncourageStudent"
    RECOGNIZE_STUDENT_EFFORT = "RecognizeStudentEffort"
    SHOW_STUDENT_NEW_SKILLS = "ShowStudentNewSkills"
    SHOW_NEXT_EXERCISE = "ShowNextExercise"
    ALLOW_TO_LEAVE_VIRTUAL_CLASS = "AllowToLeaveVirtualClass"
    TEACHER_IS_IDLE = "TeacherIsIdle"
    PROPOSE_COOPERATE_WITH_VCA = "ProposeCooperateWithVCA"
    CHANGE_STUDENT_GROUP_TO_INDEPENDENT = "ChangeStudentGroupToIndependent"
    CHANGE_STUDENT_GROUP_TO_COOPERATIVE = "ChangeStudentGroupToCooperative"
    CHANGE_STUDENT_GROUP_TO_COMPETITIVE = "ChangeStudentGroupToCompetitive"
    PERSUADE_STUDENT_TO_THINK_MORE_FOR_PROBLEM = "PersuadeStudentToThinkMoreForProblem"
    COOPERATE_WITH_STUDENT = "CooperateWithStudent"
    NOTIFY_STUDENT_FOR_DEADLINE = "NotifyStudentForDeadline"
    GIVE_HELP = "GiveHelp"
    PERSUADE_STUDENT_TO_BE_INDEPENDENT = "PersuadeStudentToBeIndependent"
    OFFER_COOPERATION = "OfferCooperation"


GROUP_SWITCH_TARGET: dict[Tactic, LearningGroup] = {
    Tactic.CHANGE_STUDENT_GROUP_TO_INDEPENDENT: LearningGroup.INDEPENDENT,
    Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE: LearningGroup.COOPERATIVE,
    Tactic.CHANGE_STUDENT_GROUP_TO_COMPETITIVE: LearningGroup.COMPETITIVE,
}

# Per-group tactic catalogs. In the independent group only the teacher acts;
# the same tactic can belong to different actors in different groups.
CATALOG: dict[LearningGroup, dict[Actor, frozenset[Tactic]]] = {
    LearningGroup.INDEPENDENT: {
        Actor.VTA: frozenset(
            {
                Tactic.INCREASE_STUDENT_SELF_ABILITY,
                Tactic.INCREASE_STUDENT_EFFORT,
                Tactic.CONGRATULATE_STUDENT,
                Tactic.ENCOURAGE_STUDENT,
                Tactic.RECOGNIZE_STUDENT_EFFORT,
                Tactic.SHOW_STUDENT_NEW_SKILLS,
                Tactic.ALLOW_TO_LEAVE_VIRTUAL_CLASS,
                Tactic.TEACHER_IS_IDLE,
                Tactic.PROPOSE_COOPERATE_WITH_VCA,
                Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE,
                Tactic.CHANGE_STUDENT_GROUP_TO_COMPETITIVE,
                Tactic.SHOW_NEXT_EXERCISE,
            }
        ),
        Actor.VCA: frozenset(),
    },
    LearningGroup.COOPERATIVE: {
        Actor.VTA: frozenset(
            {
                Tactic.CONGRATULATE_STUDENT,
                Tactic.RECOGNIZE_STUDENT_EFFORT,
                Tactic.SHOW_STUDENT_NEW_SKILLS,
                Tactic.SHOW_NEXT_EXERCISE,
                Tactic.ALLOW_TO_LEAVE_VIRTUAL_CLASS,
                Tactic.TEACHER_IS_IDLE,
                Tactic.CHANGE_STUDENT_GROUP_TO_INDEPENDENT,
                Tactic.CHANGE_STUDENT_GROUP_TO_COMPETITIVE,
            }
        ),
        Actor.VCA: frozenset(
            {
                Tactic.INCREASE_STUDENT_SELF_ABILITY,
                Tactic.INCREASE_STUDENT_EFFORT,
                Tactic.PERSUADE_STUDENT_TO_THINK_MORE_FOR_PROBLEM,
                Tactic.COOPERATE_WITH_STUDENT,
                Tactic.NOTIFY_STUDENT_FOR_DEADLINE,
                Tactic.ENCOURAGE_STUDENT,
                Tactic.GIVE_HELP,
                Tactic.PERSUADE_STUDENT_TO_BE_INDEPENDENT,
                Tactic.OFFER_COOPERATION,
            }
        ),
    },
    LearningGroup.COMPETITIVE: {
        Actor.VTA: frozenset(
            {
                Tactic.CONGRATULATE_STUDENT,
                Tactic.CONGRATULATE_CLASSMATE,
                Tactic.INCREASE_STUDENT_SELF_ABILITY,
                Tactic.ENCOURAGE_STUDENT,
                Tactic.RECOGNIZE_STUDENT_EFFORT,
                Tactic.SHOW_STUDENT_NEW_SKILLS,
                Tactic.SHOW_NEXT_EXERCISE,
                Tactic.ALLOW_TO_LEAVE_VIRTUAL_CLASS,
                Tactic.TEACHER_IS_IDLE,
                Tactic.CHANGE_STUDENT_GROUP_TO_INDEPENDENT,
                Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE,
            }
        ),
        Actor.VCA: frozenset(
            {
                Tactic.INCREASE_STUDENT_EFFORT,
                Tactic.PERSUADE_STUDENT_TO_THINK_MORE_FOR_PROBLEM,
                Tactic.NOTIFY_STUDENT_FOR_DEADLINE,
            }
        ),
    },
}

# teacher tactics any group can receive; Env2 rules are validated against this
VTA_TACTICS_ANY_GROUP = frozenset().union(
    *(CATALOG[g][Actor.VTA] for g in LearningGroup)
)


class KnowledgeBaseError(ValueError):
    """Raised when a knowledge base or script catalog fails validation."""


# ---------------------------------------------------------------------------
# conditions

class Speed(str, Enum):
    HIGHER_THAN_THRESHOLD = "HigherThanThreshold"
    LOWER_THAN_THRESHOLD = "LowerThanThreshold"


@dataclass(frozen=True)
class RuleContext:
    """Facts a rule can test. vca_prefix is None when no classmate exists."""
    mode: str
    group: LearningGroup
    levels: Mapping[EmotionKind, Level]
    event: EventKind
    response_speed: float
    vca_prefix: str | None = None


@dataclass(frozen=True)
class GroupIs:
    group: LearningGroup

    def holds(self, ctx: RuleContext, threshold: float) -> bool:
        return ctx.group is self.group


@dataclass(frozen=True)
class EmotionAt:
    emotion: EmotionKind
    level: Level
    at_least: bool = False

    def holds(self, ctx: RuleContext, threshold: float) -> bool:
        actual = ctx.levels.get(self.emotion, Level.LOW)
        if self.at_least:
            return level_rank(actual) >= level_rank(self.level)
        return actual is self.level


@dataclass(frozen=True)
class EventIs:
    kind: EventKind

    def holds(self, ctx: RuleContext, threshold: float) -> bool:
        return ctx.event is self.kind


@dataclass(frozen=True)
class SpeedIs:
    speed: Speed

    def holds(self, ctx: RuleContext, threshold: float) -> bool:
        higher = ctx.response_speed >= threshold
        return higher if self.speed is Speed.HIGHER_THAN_THRESHOLD else not higher


@dataclass(frozen=True)
class VcaPrefixIs:
    prefix: str

    def holds(self, ctx: RuleContext, threshold: float) -> bool:
        return ctx.vca_prefix == self.prefix


@dataclass(frozen=True)
class AllOf:
    children: tuple[Any, ...]

    def holds(self, ctx: RuleContext, threshold: float) -> bool:
        return all(c.holds(ctx, threshold) for c in self.children)


@dataclass(frozen=True)
class AnyOf:
    children: tuple[Any, ...]

    def holds(self, ctx: RuleContext, threshold: float) -> bool:
        return any(c.holds(ctx, threshold) for c in self.children)


def _admits_group(node: Any, group: LearningGroup) -> bool:
    """Whether some fact assignment with this group can satisfy the node.

    Conditions contain no negation, so replacing every non-group atom with
    True gives the exact answer.
    """
    if isinstance(node, GroupIs):
        return node.group is group
    if isinstance(node, AllOf):
        return all(_admits_group(c, group) for c in node.children)
    if isinstance(node, AnyOf):
        return any(_admits_group(c, group) for c in node.children)
    return True


@dataclass(frozen=True)
class Rule:
    id: str
    condition: Any
    conclusions: tuple[tuple[Actor, Tactic], ...]
    modes: frozenset[str] = frozenset(RULE_MODES)
    note: str = ""

    def concluded_actors(self) -> set[Actor]:
        return {actor for actor, _ in self.conclusions}


@dataclass(frozen=True)
class KnowledgeBase:
    rules: tuple[Rule, ...]
    speed_threshold: float = 0.5


# ---------------------------------------------------------------------------
# loading

def _parse_condition(node: Any, where: str) -> Any:
    if not isinstance(node, dict) or not node:
        raise KnowledgeBaseError(f"{where}: condition must be a non-empty object")
    if "all" in node or "any" in node:
        key = "all" if "all" in node else "any"
        children = node[key]
        if not isinstance(children, list) or not children:
            raise KnowledgeBaseError(f"{where}: '{key}' needs a non-empty list")
        parsed = tuple(_parse_condition(c, where) for c in children)
        return AllOf(parsed) if key == "all" else AnyOf(parsed)
    if "group" in node:
        try:
            return GroupIs(LearningGroup(node["group"]))
        except ValueError:
            raise KnowledgeBaseError(f"{where}: unknown group {node['group']!r}") from None
    if "emotion" in node:
        try:
            emotion = EmotionKind(node["emotion"])
        except ValueError:
            raise KnowledgeBaseError(f"{where}: unknown emotion {node['emotion']!r}") from None
        if "is" in node:
            level_name, at_least = node["is"], False
        elif "at_least" in node:
            level_name, at_least = node["at_least"], True
        else:
            raise KnowledgeBaseError(f"{where}: emotion atom needs 'is' or 'at_least'")
        try:
            level = Level(level_name)
        except ValueError:
            raise KnowledgeBaseError(f"{where}: unknown level {level_name!r}") from None
        return EmotionAt(emotion, level, at_least)
    if "event" in node:
        try:
            return EventIs(EventKind(node["event"]))
        except ValueError:
            raise KnowledgeBaseError(f"{where}: unknown event {node['event']!r}") from None
    if "speed" in node:
        try:
            return SpeedIs(Speed(node["speed"]))
        except ValueError:
            raise KnowledgeBaseError(f"{where}: unknown speed test {node['speed']!r}") from None
    if "vca" in node:
        prefix = node["vca"]
        if prefix not in VCA_PREFIXES:
            raise KnowledgeBaseError(f"{where}: unknown classmate prefix {prefix!r}")
        return VcaPrefixIs(prefix)
    raise KnowledgeBaseError(f"{where}: unrecognized condition {sorted(node)!r}")


def _validate_rule_legality(rule: Rule) -> None:
    if "Env3" in rule.modes:
        admitted = [g for g in LearningGroup if _admits_group(rule.condition, g)]
        if not admitted:
            raise KnowledgeBaseError(f"rule '{rule.id}': conditions admit no group")
        for group in admitted:
            for actor, tactic in rule.conclusions:
                if tactic not in CATALOG[group][actor]:
                    raise KnowledgeBaseError(
                        f"rule '{rule.id}': {actor.value} may not use "
                        f"{tactic.value} in the {group.value} group"
                    )
    if "Env2" in rule.modes:
        # no classmate exists in Env2, so only teacher tactics are possible
        for actor, tactic in rule.conclusions:
            if actor is not Actor.VTA:
                raise KnowledgeBaseError(
                    f"rule '{rule.id}': only VTA conclusions are allowed in Env2"
                )
            if tactic not in VTA_TACTICS_ANY_GROUP:
                raise KnowledgeBaseError(
                    f"rule '{rule.id}': {tactic.value} is not a teacher tactic"
                )


def load_knowledge_base(source: str | Path | dict) -> KnowledgeBase:
    """Load rules from a path or parsed dict, validating names and legality."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise KnowledgeBaseError(
                f"{source}: invalid JSON at line {exc.lineno}: {exc.msg}"
            ) from exc
    else:
        raw = source

    if not isinstance(raw, dict) or not isinstance(raw.get("rules"), list):
        raise KnowledgeBaseError("knowledge base must be an object with a 'rules' array")

    threshold = raw.get("speed_threshold", 0.5)
    if not isinstance(threshold, (int, float)) or not 0.0 <= threshold <= 1.0:
        raise KnowledgeBaseError(f"speed_threshold {threshold!r} outside [0, 1]")

    rules: list[Rule] = []
    seen: set[str] = set()
    for idx, entry in enumerate(raw["rules"]):
        where = f"rule #{idx + 1}"
        if not isinstance(entry, dict):
            raise KnowledgeBaseError(f"{where}: not an object")
        rule_id = entry.get("id")
        if not isinstance(rule_id, str) or not rule_id:
            raise KnowledgeBaseError(f"{where}: missing id")
        where = f"rule '{rule_id}'"
        if rule_id in seen:
            raise KnowledgeBaseError(f"{where}: duplicate id")
        seen.add(rule_id)

        modes_raw = entry.get("modes", list(RULE_MODES))
        if not isinstance(modes_raw, list) or not modes_raw:
            raise KnowledgeBaseError(f"{where}: 'modes' must be a non-empty list")
        for m in modes_raw:
            if m not in RULE_MODES:
                raise KnowledgeBaseError(f"{where}: rules cannot target mode {m!r}")

        condition = _parse_condition(entry.get("if"), where)

        then = entry.get("then")
        if not isinstance(then, list) or not then:
            raise KnowledgeBaseError(f"{where}: 'then' must be a non-empty list")
        conclusions: list[tuple[Actor, Tactic]] = []
        for c in then:
            if not isinstance(c, dict):
                raise KnowledgeBaseError(f"{where}: conclusion entries must be objects")
            try:
                actor = Actor(c.get("actor"))
            except ValueError:
                raise KnowledgeBaseError(f"{where}: unknown actor {c.get('actor')!r}") from None
            try:
                tactic = Tactic(c.get("tactic"))
            except ValueError:
                raise KnowledgeBaseError(f"{where}: unknown tactic {c.get('tactic')!r}") from None
            conclusions.append((actor, tactic))

        rule = Rule(
            id=rule_id,
            condition=condition,
            conclusions=tuple(conclusions),
            modes=frozenset(modes_raw),
            note=str(entry.get("note", "")),
        )
        _validate_rule_legality(rule)
        rules.append(rule)

    kb = KnowledgeBase(rules=tuple(rules), speed_threshold=float(threshold))
    logger.debug("loaded knowledge base with %d rules", len(kb.rules))
    return kb


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class RealizedBehavior:
    actor: Actor
    tactic: Tactic
    gestures: tuple[str, ...]
    utterance: str

    def as_dict(self) -> dict[str, Any]:
        return {
            "actor": self.actor.value,
            "tactic": self.tactic.value,
            "gestures": list(self.gestures),
            "utterance": self.utterance,
        }


@dataclass(frozen=True)
class TacticPlan:
    group: LearningGroup
    vta: tuple[Tactic, ...]
    vca: tuple[Tactic, ...]
    fired_rule: str | None
    realized: tuple[RealizedBehavior, ...] = ()

    def as_dict(self) -> dict[str, Any]:
        return {
            "fired_rule": self.fired_rule,
            "vta": [t.value for t in self.vta],
            "vca": [t.value for t in self.vca],
            "realized": [b.as_dict() for b in self.realized],
        }


def evaluate_rules(kb: KnowledgeBase, ctx: RuleContext) -> TacticPlan:
    """First rule whose condition holds wins; no match falls back to an idle teacher.

    Rules are skipped when they target a different mode, and rules with
    classmate conclusions are skipped while no classmate exists.
    """
    if ctx.mode not in MODES:
        raise ValueError(f"unknown mode {ctx.mode!r}")
    for rule in kb.rules:
        if ctx.mode not in rule.modes:
            continue
        if ctx.vca_prefix is None and Actor.VCA in rule.concluded_actors():
            continue
        if rule.condition.holds(ctx, kb.speed_threshold):
            vta = tuple(t for a, t in rule.conclusions if a is Actor.VTA)
            vca = tuple(t for a, t in rule.conclusions if a is Actor.VCA)
            return TacticPlan(group=ctx.group, vta=vta, vca=vca, fired_rule=rule.id)
    return TacticPlan(
        group=ctx.group, vta=(Tactic.TEACHER_IS_IDLE,), vca=(), fired_rule=None
    )


# ---------------------------------------------------------------------------
# behavior scripts

@dataclass(frozen=True)
class BehaviorScript:
    gestures: tuple[str, ...]
    utterances: tuple[str, ...]


@dataclass(frozen=True)
class ScriptCatalog:
    vocabulary: frozenset[str]
    scripts: Mapping[Tactic, BehaviorScript]
    variants: Mapping[tuple[Tactic, LearningGroup], BehaviorScript]

    def script_for(self, tactic: Tactic, group: LearningGroup) -> BehaviorScript:
        variant = self.variants.get((tactic, group))
        if variant is not None:
            return variant
        try:
            return self.scripts[tactic]
        except KeyError:
            raise KeyError(f"no behavior script for tactic {tactic.value}") from None


def _parse_script(entry: Any, vocabulary: frozenset[str], where: str) -> BehaviorScript:
    if not isinstance(entry, dict):
        raise KnowledgeBaseError(f"{where}: script must be an object")
    gestures = entry.get("gestures")
    utterances = entry.get("utterances")
    if not isinstance(gestures, list) or not gestures:
        raise KnowledgeBaseError(f"{where}: 'gestures' must be a non-empty list")
    if not isinstance(utterances, list) or not utterances:
        raise KnowledgeBaseError(f"{where}: 'utterances' must be a non-empty list")
    for g in gestures:
        if g not in vocabulary:
            raise KnowledgeBaseError(f"{where}: gesture {g!r} not in vocabulary")
    for u in utterances:
        if not isinstance(u, str) or not u.strip():
            raise KnowledgeBaseError(f"{where}: blank utterance")
    return BehaviorScript(gestures=tuple(gestures), utterances=tuple(utterances))


def load_behavior_scripts(source: str | Path | dict) -> ScriptCatalog:
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise KnowledgeBaseError(
                f"{source}: invalid JSON at line {exc.lineno}: {exc.msg}"
            ) from exc
    else:
        raw = source

    if not isinstance(raw, dict) or not isinstance(raw.get("scripts"), dict):
        raise KnowledgeBaseError("script catalog must be an object with a 'scripts' map")
    vocab_raw = raw.get("vocabulary")
    if not isinstance(vocab_raw, list) or not vocab_raw:
        raise KnowledgeBaseError("script catalog needs a gesture 'vocabulary' list")
    vocabulary = frozenset(str(v) for v in vocab_raw)

    scripts: dict[Tactic, BehaviorScript] = {}
    variants: dict[tuple[Tactic, LearningGroup], BehaviorScript] = {}
    for name, entry in raw["scripts"].items():
        try:
            tactic = Tactic(name)
        except ValueError:
            raise KnowledgeBaseError(f"unknown tactic {name!r} in script catalog") from None
        where = f"script '{name}'"
        scripts[tactic] = _parse_script(entry, vocabulary, where)
        for group_name, sub in (entry.get("variants") or {}).items():
            try:
                group = LearningGroup(group_name)
            except ValueError:
                raise KnowledgeBaseError(
                    f"{where}: unknown group variant {group_name!r}"
                ) from None
            variants[(tactic, group)] = _parse_script(
                sub, vocabulary, f"{where} variant {group_name}"
            )

    return ScriptCatalog(vocabulary=vocabulary, scripts=scripts, variants=variants)


def realize_tactics(
    plan: TacticPlan, catalog: ScriptCatalog, rng: random.Random | int
) -> TacticPlan:
    """Attach gestures and one pool utterance per tactic; the plan itself is untouched."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    realized: list[RealizedBehavior] = []
    for actor, tactic_list in ((Actor.VTA, plan.vta), (Actor.VCA, plan.vca)):
        for tactic in tactic_list:
            try:
                script = catalog.script_for(tactic, plan.group)
            except KeyError as exc:
                raise ValueError(str(exc)) from None
            utterance = script.utterances[rng.randrange(len(script.utterances))]
            realized.append(
                RealizedBehavior(
                    actor=actor,
                    tactic=tactic,
                    gestures=script.gestures,
                    utterance=utterance,
                )
            )
    return replace(plan, realized=tuple(realized))


# ---------------------------------------------------------------------------
# meta tactics

def apply_meta_tactics(plan: TacticPlan, session: "SessionState") -> list[str]:
    """Apply group switches and class dismissal to the session, in plan order.

    Returns human-readable notes for the log. Switching to the current
    group is a recorded no-op. Entering a social group in the full
    environment creates the opposed classmate; entering the independent
    group removes it.
    """
    notes: list[str] = []
    for tactic in (*plan.vta, *plan.vca):
        if tactic is Tactic.ALLOW_TO_LEAVE_VIRTUAL_CLASS:
            session.close("dismissed")
            notes.append("session closed by AllowToLeaveVirtualClass")
            continue
        target = GROUP_SWITCH_TARGET.get(tactic)
        if target is None:
            continue
        if session.group is target:
            notes.append(f"group switch to {target.value} ignored; already there")
            logger.info("session %s: %s", session.id, notes[-1])
            continue
        session.group = target
        if target is LearningGroup.INDEPENDENT:
            session.vca = None
        elif session.mode.value == "Env3":
            session.vca = select_vca_personality(session.profile.type_code, group=target)
        notes.append(f"group switched to {target.value}")
        logger.info("session %s: %s", session.id, notes[-1])
    return notes
