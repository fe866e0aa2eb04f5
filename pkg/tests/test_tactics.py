import random
from dataclasses import dataclass, field

import pytest

from affective_tutor.appraisal import EmotionKind, EventKind, Level
from affective_tutor.assets import default_knowledge_base, default_scripts
from affective_tutor.personality import LearningGroup
from affective_tutor.tactics import (
    CATALOG,
    VTA_TACTICS_ANY_GROUP,
    Actor,
    KnowledgeBaseError,
    RuleContext,
    Tactic,
    TacticPlan,
    apply_meta_tactics,
    evaluate_rules,
    load_behavior_scripts,
    load_knowledge_base,
    realize_tactics,
)


def ctx(
    mode="Env3",
    group=LearningGroup.INDEPENDENT,
    levels=None,
    event=EventKind.INACCURATE_RESPONSE,
    speed=0.8,
    vca=None,
):
    return RuleContext(
        mode=mode,
        group=group,
        levels=levels or {},
        event=event,
        response_speed=speed,
        vca_prefix=vca,
    )


def minimal_kb(rules, threshold=0.5):
    return load_knowledge_base({"speed_threshold": threshold, "rules": rules})


class TestCatalogs:
    def test_shape(self):
        ind = CATALOG[LearningGroup.INDEPENDENT]
        coop = CATALOG[LearningGroup.COOPERATIVE]
        comp = CATALOG[LearningGroup.COMPETITIVE]
        assert len(ind[Actor.VTA]) == 12 and not ind[Actor.VCA]
        assert len(coop[Actor.VTA]) == 8 and len(coop[Actor.VCA]) == 9
        assert len(comp[Actor.VTA]) == 11 and len(comp[Actor.VCA]) == 3

    def test_actor_split_moves_between_groups(self):
        # confidence-building belongs to the teacher when the learner is alone
        # and to the classmate in the cooperative group
        t = Tactic.INCREASE_STUDENT_SELF_ABILITY
        assert t in CATALOG[LearningGroup.INDEPENDENT][Actor.VTA]
        assert t in CATALOG[LearningGroup.COOPERATIVE][Actor.VCA]
        assert t not in CATALOG[LearningGroup.COOPERATIVE][Actor.VTA]

    def test_union_covers_special_tactics(self):
        assert Tactic.PROPOSE_COOPERATE_WITH_VCA in VTA_TACTICS_ANY_GROUP
        assert Tactic.CONGRATULATE_CLASSMATE in VTA_TACTICS_ANY_GROUP
        assert Tactic.GIVE_HELP not in VTA_TACTICS_ANY_GROUP


class TestGoldenRules:
    """The four printed rules, each under its stated context."""

    def test_tutor_only_wrong_answer(self):
        kb = default_knowledge_base()
        plan = evaluate_rules(
            kb,
            ctx(
                mode="Env2",
                group=LearningGroup.COOPERATIVE,
                levels={EmotionKind.DISAPPOINTMENT: Level.HIGH},
            ),
        )
        assert plan.fired_rule == "tutor-env.wrong-answer.disappointment"
        assert plan.vta == (
            Tactic.INCREASE_STUDENT_SELF_ABILITY,
            Tactic.INCREASE_STUDENT_EFFORT,
        )
        assert plan.vca == ()

    def test_tutor_only_accepts_medium_disappointment(self):
        plan = evaluate_rules(
            default_knowledge_base(),
            ctx(mode="Env2", levels={EmotionKind.DISAPPOINTMENT: Level.MEDIUM}),
        )
        assert plan.fired_rule == "tutor-env.wrong-answer.disappointment"

    def test_independent_wrong_answer(self):
        plan = evaluate_rules(
            default_knowledge_base(),
            ctx(
                group=LearningGroup.INDEPENDENT,
                levels={EmotionKind.DISAPPOINTMENT: Level.HIGH},
            ),
        )
        assert plan.fired_rule == "independent.wrong-answer.disappointment"
        assert plan.vta == (
            Tactic.INCREASE_STUDENT_SELF_ABILITY,
            Tactic.INCREASE_STUDENT_EFFORT,
            Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE,
        )
        assert plan.vca == ()

    def test_cooperative_fond_distress(self):
        plan = evaluate_rules(
            default_knowledge_base(),
            ctx(
                group=LearningGroup.COOPERATIVE,
                levels={EmotionKind.LOVE: Level.HIGH, EmotionKind.DISTRESS: Level.HIGH},
                vca="IN",
            ),
        )
        assert plan.fired_rule == "cooperative.wrong-answer.fond-distress"
        assert plan.vta == (Tactic.RECOGNIZE_STUDENT_EFFORT,)
        assert plan.vca == (Tactic.PERSUADE_STUDENT_TO_THINK_MORE_FOR_PROBLEM,)

    def test_competitive_fond_distress(self):
        plan = evaluate_rules(
            default_knowledge_base(),
            ctx(
                group=LearningGroup.COMPETITIVE,
                levels={EmotionKind.LOVE: Level.HIGH, EmotionKind.DISTRESS: Level.HIGH},
                vca="IS",
            ),
        )
        assert plan.fired_rule == "competitive.wrong-answer.fond-distress"
        assert plan.vta == (
            Tactic.RECOGNIZE_STUDENT_EFFORT,
            Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE,
        )
        assert plan.vca == (Tactic.PERSUADE_STUDENT_TO_THINK_MORE_FOR_PROBLEM,)

    def test_extraverted_classmate_does_not_trigger_fond_distress(self):
        plan = evaluate_rules(
            default_knowledge_base(),
            ctx(
                group=LearningGroup.COOPERATIVE,
                levels={EmotionKind.LOVE: Level.HIGH, EmotionKind.DISTRESS: Level.HIGH},
                vca="EN",
            ),
        )
        assert plan.fired_rule != "cooperative.wrong-answer.fond-distress"

    def test_slow_response_does_not_trigger_fond_distress(self):
        plan = evaluate_rules(
            default_knowledge_base(),
            ctx(
                group=LearningGroup.COOPERATIVE,
                levels={EmotionKind.LOVE: Level.HIGH, EmotionKind.DISTRESS: Level.HIGH},
                vca="IN",
                speed=0.2,
            ),
        )
        assert plan.fired_rule != "cooperative.wrong-answer.fond-distress"


class TestEvaluation:
    def test_first_match_wins(self):
        kb = minimal_kb(
            [
                {
                    "id": "one",
                    "if": {"event": "AccurateResponse"},
                    "then": [{"actor": "VTA", "tactic": "CongratulateStudent"}],
                },
                {
                    "id": "two",
                    "if": {"event": "AccurateResponse"},
                    "then": [{"actor": "VTA", "tactic": "RecognizeStudentEffort"}],
                },
            ]
        )
        plan = evaluate_rules(kb, ctx(event=EventKind.ACCURATE_RESPONSE))
        assert plan.fired_rule == "one"

    def test_fallback_is_idle_teacher(self):
        kb = minimal_kb(
            [
                {
                    "id": "only",
                    "if": {"event": "AccurateResponse"},
                    "then": [{"actor": "VTA", "tactic": "CongratulateStudent"}],
                }
            ]
        )
        plan = evaluate_rules(kb, ctx(event=EventKind.SKIP_EXERCISE))
        assert plan.fired_rule is None
        assert plan.vta == (Tactic.TEACHER_IS_IDLE,)
        assert plan.vca == ()

    def test_mode_scoping(self):
        kb = minimal_kb(
            [
                {
                    "id": "full-env-only",
                    "modes": ["Env3"],
                    "if": {"event": "AccurateResponse"},
                    "then": [{"actor": "VTA", "tactic": "CongratulateStudent"}],
                }
            ]
        )
        in_env2 = evaluate_rules(kb, ctx(mode="Env2", event=EventKind.ACCURATE_RESPONSE))
        assert in_env2.fired_rule is None
        in_env3 = evaluate_rules(kb, ctx(mode="Env3", event=EventKind.ACCURATE_RESPONSE))
        assert in_env3.fired_rule == "full-env-only"

    def test_classmate_rules_skipped_without_classmate(self):
        kb = minimal_kb(
            [
                {
                    "id": "needs-classmate",
                    "modes": ["Env3"],
                    "if": {"all": [{"group": "Cooperative"}, {"event": "HelpRequested"}]},
                    "then": [{"actor": "VCA", "tactic": "GiveHelp"}],
                },
                {
                    "id": "teacher-helps",
                    "if": {"event": "HelpRequested"},
                    "then": [{"actor": "VTA", "tactic": "RecognizeStudentEffort"}],
                },
            ]
        )
        without = evaluate_rules(
            kb, ctx(group=LearningGroup.COOPERATIVE, event=EventKind.HELP_REQUESTED)
        )
        assert without.fired_rule == "teacher-helps"
        with_vca = evaluate_rules(
            kb,
            ctx(group=LearningGroup.COOPERATIVE, event=EventKind.HELP_REQUESTED, vca="EN"),
        )
        assert with_vca.fired_rule == "needs-classmate"

    def test_at_least_matches_higher_levels(self):
        kb = minimal_kb(
            [
                {
                    "id": "joyful",
                    "if": {"emotion": "Joy", "at_least": "Medium"},
                    "then": [{"actor": "VTA", "tactic": "CongratulateStudent"}],
                }
            ]
        )
        assert (
            evaluate_rules(kb, ctx(levels={EmotionKind.JOY: Level.HIGH})).fired_rule
            == "joyful"
        )
        assert (
            evaluate_rules(kb, ctx(levels={EmotionKind.JOY: Level.MEDIUM})).fired_rule
            == "joyful"
        )
        assert evaluate_rules(kb, ctx(levels={EmotionKind.JOY: Level.LOW})).fired_rule is None

    def test_speed_threshold_boundary_counts_as_higher(self):
        kb = minimal_kb(
            [
                {
                    "id": "fast",
                    "if": {"speed": "HigherThanThreshold"},
                    "then": [{"actor": "VTA", "tactic": "TeacherIsIdle"}],
                },
            ],
            threshold=0.5,
        )
        assert evaluate_rules(kb, ctx(speed=0.5)).fired_rule == "fast"
        assert evaluate_rules(kb, ctx(speed=0.49)).fired_rule is None

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            evaluate_rules(default_knowledge_base(), ctx(mode="Env9"))

    def test_evaluation_is_pure(self):
        kb = default_knowledge_base()
        context = ctx(
            group=LearningGroup.COOPERATIVE,
            levels={EmotionKind.LOVE: Level.HIGH, EmotionKind.DISTRESS: Level.HIGH},
            vca="IN",
        )
        assert evaluate_rules(kb, context) == evaluate_rules(kb, context)

    def test_emitted_plans_are_group_legal(self):
        kb = default_knowledge_base()
        rng = random.Random(41)
        levels_pool = list(Level)
        for _ in range(400):
            group = rng.choice(list(LearningGroup))
            context = ctx(
                group=group,
                levels={k: rng.choice(levels_pool) for k in EmotionKind},
                event=rng.choice(list(EventKind)),
                speed=rng.random(),
                vca=None
                if group is LearningGroup.INDEPENDENT
                else rng.choice(["IN", "IS", "EN", "ES"]),
            )
            plan = evaluate_rules(kb, context)
            for t in plan.vta:
                assert t in CATALOG[group][Actor.VTA], (group, plan.fired_rule, t)
            for t in plan.vca:
                assert t in CATALOG[group][Actor.VCA], (group, plan.fired_rule, t)
            if group is LearningGroup.INDEPENDENT:
                assert plan.vca == ()


class TestLoaderValidation:
    def test_duplicate_rule_id(self):
        rule = {
            "id": "dup",
            "if": {"event": "AccurateResponse"},
            "then": [{"actor": "VTA", "tactic": "CongratulateStudent"}],
        }
        with pytest.raises(KnowledgeBaseError, match="duplicate"):
            minimal_kb([rule, dict(rule)])

    def test_rejects_empty_rules(self):
        with pytest.raises(KnowledgeBaseError):
            load_knowledge_base({"rules": "nope"})

    def test_rejects_unknown_names(self):
        base = {
            "id": "r",
            "if": {"event": "AccurateResponse"},
            "then": [{"actor": "VTA", "tactic": "CongratulateStudent"}],
        }
        bad_event = dict(base, **{"if": {"event": "Nope"}})
        with pytest.raises(KnowledgeBaseError, match="event"):
            minimal_kb([bad_event])
        bad_emotion = dict(base, **{"if": {"emotion": "Nope", "is": "High"}})
        with pytest.raises(KnowledgeBaseError, match="emotion"):
            minimal_kb([bad_emotion])
        bad_level = dict(base, **{"if": {"emotion": "Joy", "is": "Gigantic"}})
        with pytest.raises(KnowledgeBaseError, match="level"):
            minimal_kb([bad_level])
        bad_group = dict(base, **{"if": {"group": "Lonely"}})
        with pytest.raises(KnowledgeBaseError, match="group"):
            minimal_kb([bad_group])
        bad_tactic = dict(base, then=[{"actor": "VTA", "tactic": "DoMagic"}])
        with pytest.raises(KnowledgeBaseError, match="tactic"):
            minimal_kb([bad_tactic])
        bad_actor = dict(base, then=[{"actor": "DJ", "tactic": "CongratulateStudent"}])
        with pytest.raises(KnowledgeBaseError, match="actor"):
            minimal_kb([bad_actor])
        bad_vca = dict(base, **{"if": {"vca": "XX"}})
        with pytest.raises(KnowledgeBaseError, match="prefix"):
            minimal_kb([bad_vca])

    def test_rejects_empty_condition_and_conclusions(self):
        with pytest.raises(KnowledgeBaseError, match="condition"):
            minimal_kb([{"id": "r", "if": {}, "then": [{"actor": "VTA", "tactic": "TeacherIsIdle"}]}])
        with pytest.raises(KnowledgeBaseError, match="then"):
            minimal_kb([{"id": "r", "if": {"event": "Timeout"}, "then": []}])
        with pytest.raises(KnowledgeBaseError, match="'all'"):
            minimal_kb([{"id": "r", "if": {"all": []}, "then": [{"actor": "VTA", "tactic": "TeacherIsIdle"}]}])

    def test_rejects_bad_modes(self):
        rule = {
            "id": "r",
            "modes": ["Env1"],
            "if": {"event": "Timeout"},
            "then": [{"actor": "VTA", "tactic": "TeacherIsIdle"}],
        }
        with pytest.raises(KnowledgeBaseError, match="mode"):
            minimal_kb([rule])

    def test_rejects_bad_threshold(self):
        with pytest.raises(KnowledgeBaseError, match="speed_threshold"):
            minimal_kb([], threshold=1.5)

    def test_group_legality_enforced(self):
        # the cooperation proposal belongs to the independent catalog only
        rule = {
            "id": "r",
            "modes": ["Env3"],
            "if": {"group": "Cooperative"},
            "then": [{"actor": "VTA", "tactic": "ProposeCooperateWithVCA"}],
        }
        with pytest.raises(KnowledgeBaseError, match="may not use"):
            minimal_kb([rule])

    def test_groupless_rule_must_be_legal_everywhere(self):
        # no group atom admits all groups; GiveHelp is cooperative-only
        rule = {
            "id": "r",
            "modes": ["Env3"],
            "if": {"event": "HelpRequested"},
            "then": [{"actor": "VCA", "tactic": "GiveHelp"}],
        }
        with pytest.raises(KnowledgeBaseError, match="may not use"):
            minimal_kb([rule])

    def test_contradictory_groups_admit_nothing(self):
        rule = {
            "id": "r",
            "modes": ["Env3"],
            "if": {"all": [{"group": "Cooperative"}, {"group": "Competitive"}]},
            "then": [{"actor": "VTA", "tactic": "TeacherIsIdle"}],
        }
        with pytest.raises(KnowledgeBaseError, match="admit no group"):
            minimal_kb([rule])

    def test_env2_rules_are_teacher_only(self):
        rule = {
            "id": "r",
            "modes": ["Env2"],
            "if": {"all": [{"group": "Cooperative"}, {"event": "HelpRequested"}]},
            "then": [{"actor": "VCA", "tactic": "GiveHelp"}],
        }
        with pytest.raises(KnowledgeBaseError, match="VTA"):
            minimal_kb([rule])

    def test_default_kb_loads(self):
        kb = default_knowledge_base()
        assert len(kb.rules) >= 4
        assert kb.speed_threshold == 0.5


class TestScripts:
    def test_default_catalog_covers_every_tactic(self):
        catalog = default_scripts()
        for tactic in Tactic:
            assert catalog.script_for(tactic, LearningGroup.INDEPENDENT)

    def test_congratulation_pool(self):
        catalog = default_scripts()
        script = catalog.script_for(Tactic.CONGRATULATE_STUDENT, LearningGroup.COOPERATIVE)
        assert len(script.utterances) == 5
        assert "Congratulations for your efforts!" in script.utterances

    def test_group_variant_dispatch(self):
        catalog = default_scripts()
        base = catalog.script_for(
            Tactic.PERSUADE_STUDENT_TO_THINK_MORE_FOR_PROBLEM, LearningGroup.COOPERATIVE
        )
        variant = catalog.script_for(
            Tactic.PERSUADE_STUDENT_TO_THINK_MORE_FOR_PROBLEM, LearningGroup.COMPETITIVE
        )
        assert base.gestures != variant.gestures
        assert set(base.utterances) != set(variant.utterances)

    def test_realization_is_deterministic(self):
        catalog = default_scripts()
        plan = TacticPlan(
            group=LearningGroup.COOPERATIVE,
            vta=(Tactic.CONGRATULATE_STUDENT, Tactic.RECOGNIZE_STUDENT_EFFORT),
            vca=(Tactic.GIVE_HELP,),
            fired_rule="x",
        )
        a = realize_tactics(plan, catalog, 12)
        b = realize_tactics(plan, catalog, 12)
        assert a == b
        c = realize_tactics(plan, catalog, 13)
        assert isinstance(c.realized, tuple)
        # vta behaviors come first, then vca, matching plan order
        assert [r.tactic for r in a.realized] == [
            Tactic.CONGRATULATE_STUDENT,
            Tactic.RECOGNIZE_STUDENT_EFFORT,
            Tactic.GIVE_HELP,
        ]
        assert [r.actor for r in a.realized] == [Actor.VTA, Actor.VTA, Actor.VCA]
        for r in a.realized:
            pool = catalog.script_for(r.tactic, plan.group).utterances
            assert r.utterance in pool

    def test_empty_plan_realizes_empty(self):
        plan = TacticPlan(group=LearningGroup.INDEPENDENT, vta=(), vca=(), fired_rule=None)
        assert realize_tactics(plan, default_scripts(), 0).realized == ()

    def test_missing_script_names_tactic(self):
        catalog = load_behavior_scripts(
            {
                "vocabulary": ["Speak"],
                "scripts": {
                    "TeacherIsIdle": {"gestures": ["Speak"], "utterances": ["..."]}
                },
            }
        )
        plan = TacticPlan(
            group=LearningGroup.INDEPENDENT,
            vta=(Tactic.CONGRATULATE_STUDENT,),
            vca=(),
            fired_rule=None,
        )
        with pytest.raises(ValueError, match="CongratulateStudent"):
            realize_tactics(plan, catalog, 0)

    def test_script_validation(self):
        with pytest.raises(KnowledgeBaseError, match="vocabulary"):
            load_behavior_scripts(
                {
                    "vocabulary": ["Speak"],
                    "scripts": {
                        "TeacherIsIdle": {"gestures": ["Dance"], "utterances": ["hi"]}
                    },
                }
            )
        with pytest.raises(KnowledgeBaseError, match="utterance"):
            load_behavior_scripts(
                {
                    "vocabulary": ["Speak"],
                    "scripts": {
                        "TeacherIsIdle": {"gestures": ["Speak"], "utterances": ["  "]}
                    },
                }
            )
        with pytest.raises(KnowledgeBaseError, match="unknown tactic"):
            load_behavior_scripts(
                {
                    "vocabulary": ["Speak"],
                    "scripts": {"Juggle": {"gestures": ["Speak"], "utterances": ["hi"]}},
                }
            )


@dataclass
class _FakeMode:
    value: str


@dataclass
class _FakeProfile:
    type_code: str


@dataclass
class _FakeSession:
    id: str = "fake"
    mode: _FakeMode = field(default_factory=lambda: _FakeMode("Env3"))
    profile: _FakeProfile = field(default_factory=lambda: _FakeProfile("ISTJ"))
    group: LearningGroup = LearningGroup.INDEPENDENT
    vca: str | None = None
    closed_with: str | None = None

    def close(self, reason: str) -> None:
        self.closed_with = reason


def plan_with(*tactics: Tactic) -> TacticPlan:
    return TacticPlan(
        group=LearningGroup.INDEPENDENT, vta=tuple(tactics), vca=(), fired_rule="t"
    )


class TestMetaTactics:
    def test_switch_to_cooperative_creates_classmate(self):
        session = _FakeSession()
        notes = apply_meta_tactics(
            plan_with(Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE), session
        )
        assert session.group is LearningGroup.COOPERATIVE
        assert session.vca == "EN"
        assert any("switched" in n for n in notes)

    def test_switch_to_independent_removes_classmate(self):
        session = _FakeSession(group=LearningGroup.COOPERATIVE, vca="EN")
        apply_meta_tactics(plan_with(Tactic.CHANGE_STUDENT_GROUP_TO_INDEPENDENT), session)
        assert session.group is LearningGroup.INDEPENDENT
        assert session.vca is None

    def test_tutor_only_mode_never_creates_classmate(self):
        session = _FakeSession(mode=_FakeMode("Env2"))
        apply_meta_tactics(plan_with(Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE), session)
        assert session.group is LearningGroup.COOPERATIVE
        assert session.vca is None

    def test_noop_switch_is_logged(self):
        session = _FakeSession(group=LearningGroup.COOPERATIVE, vca="EN")
        notes = apply_meta_tactics(
            plan_with(Tactic.CHANGE_STUDENT_GROUP_TO_COOPERATIVE), session
        )
        assert any("ignored" in n for n in notes)
        assert session.vca == "EN"

    def test_dismissal_closes_session(self):
        session = _FakeSession()
        notes = apply_meta_tactics(plan_with(Tactic.ALLOW_TO_LEAVE_VIRTUAL_CLASS), session)
        assert session.closed_with == "dismissed"
        assert any("closed" in n for n in notes)

    def test_plain_tactics_change_nothing(self):
        session = _FakeSession()
        notes = apply_meta_tactics(plan_with(Tactic.CONGRATULATE_STUDENT), session)
        assert notes == []
        assert session.group is LearningGroup.INDEPENDENT
        assert session.closed_with is None
