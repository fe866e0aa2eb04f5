"""Emotion-aware virtual tutoring engine.

Learners are profiled by questionnaire, placed in a learning group, and
tutored by a virtual teacher (and, in the full environment, an opposed
personality classmate). Events are appraised into emotions, emotions
drive rule-based tactics, and everything lands in a replayable log.
"""

from .appraisal import (
    AppraisalInputs,
    EmotionKind,
    EmotionState,
    EnvironmentalState,
    EventKind,
    Level,
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
    linguistic_level,
    unexpectedness,
    update_environmental_state,
    value_function,
)
from .personality import (
    DimensionScores,
    GoalVector,
    LearningGroup,
    PersonalityProfile,
    QuestionnaireForm,
    assign_group,
    build_profile,
    derive_goal_vector,
    load_form,
    score_questionnaire,
    select_vca_personality,
)
from .session import (
    ActionType,
    EventRecord,
    Exercise,
    ExerciseBank,
    LearnerAction,
    Mode,
    SessionClosedError,
    SessionState,
    SessionStatus,
    classify_event,
    export_log,
    grade_answer,
    load_exercise_bank,
    replay_log,
    start_session,
    step,
    vca_outcome_event,
)
from .simulator import (
    LearnerProfile,
    SimulationReport,
    batch_simulate,
    canonical_profiles,
    load_profiles,
    simulate_session,
)
from .tactics import (
    Actor,
    KnowledgeBase,
    RuleContext,
    ScriptCatalog,
    Tactic,
    TacticPlan,
    apply_meta_tactics,
    evaluate_rules,
    load_behavior_scripts,
    load_knowledge_base,
    realize_tactics,
)

__version__ = "0.1.0"
