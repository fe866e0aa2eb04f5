"""Loaders for the default data files shipped inside the package."""

from __future__ import annotations

import json
from importlib.resources import files

from .personality import QuestionnaireForm, load_form
from .session import ExerciseBank, load_exercise_bank
from .simulator import LearnerProfile, load_profiles
from .tactics import KnowledgeBase, ScriptCatalog, load_behavior_scripts, load_knowledge_base


def _read(name: str) -> dict | list:
    text = files("affective_tutor").joinpath("data", name).read_text(encoding="utf-8")
    return json.loads(text)


def default_form() -> QuestionnaireForm:
    return load_form(_read("questionnaire.json"))


def default_bank() -> ExerciseBank:
    return load_exercise_bank(_read("exercise_bank.json"))


def default_knowledge_base() -> KnowledgeBase:
    return load_knowledge_base(_read("knowledge_base.json"))


def default_scripts() -> ScriptCatalog:
    return load_behavior_scripts(_read("behavior_scripts.json"))


def default_profiles() -> list[LearnerProfile]:
    return load_profiles(_read("profiles.json"))
