"""Command line entry points.

Subcommands:
  serve           run the HTTP service
  simulate        batch-run scripted learners and write logs + a report
  score           score questionnaire answers from a JSON file
  appraise-trace  replay a JSON event list through the appraisal pipeline
  validate-kb     cross-check rulebook tactics against the behavior scripts

Exit codes: 0 on success, 1 on operational failures, 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import assets
from .appraisal import (
    EventKind,
    EmotionKind,
    EmotionState,
    EnvironmentalState,
    AppraisalInputs,
    Observation,
    appraise_first_branch,
    desirability,
    event_impact,
    likelihood,
    unexpectedness,
    update_environmental_state,
    EVENT_VALENCE,
    Valence,
    Phase,
)
from .personality import load_form, build_profile, FormError
from .session import Mode, load_exercise_bank
from .simulator import batch_simulate, canonical_profiles, load_profiles, write_batch_outputs
from .tactics import KnowledgeBaseError, load_behavior_scripts, load_knowledge_base

logger = logging.getLogger(__name__)


def _add_asset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--form", help="questionnaire JSON (default: packaged)")
    p.add_argument("--bank", help="exercise bank JSON (default: packaged)")
    p.add_argument("--kb", help="rulebook JSON (default: packaged)")
    p.add_argument("--scripts", help="behavior scripts JSON (default: packaged)")


def _load_assets(args: argparse.Namespace):
    form = load_form(args.form) if args.form else assets.default_form()
    bank = load_exercise_bank(args.bank) if args.bank else assets.default_bank()
    kb = load_knowledge_base(args.kb) if args.kb else assets.default_knowledge_base()
    scripts = (
        load_behavior_scripts(args.scripts) if args.scripts else assets.default_scripts()
    )
    return form, bank, kb, scripts


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig(
        host=args.host,
        port=args.port,
        form_path=args.form,
        bank_path=args.bank,
        kb_path=args.kb,
        scripts_path=args.scripts,
        static_dir=args.static,
        default_mode=Mode(args.mode),
        fixed_seed=args.seed,
        debug_emotions=args.debug_emotions,
    )
    serve(config)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    form, bank, kb, scripts = _load_assets(args)
    if args.profiles:
        profiles = load_profiles(args.profiles)
    else:
        profiles = canonical_profiles(form)
    modes = [Mode(m) for m in args.mode]
    if args.out:
        report, sessions = batch_simulate(
            profiles, bank, kb, scripts,
            modes=modes, base_seed=args.seed, form=form, keep_sessions=True,
        )
        written = write_batch_outputs(report, sessions, Path(args.out))
        print(f"wrote {len(written)} files to {args.out}")
    else:
        report = batch_simulate(
            profiles, bank, kb, scripts, modes=modes, base_seed=args.seed, form=form,
        )
        print(report.to_text())
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    form = load_form(args.form) if args.form else assets.default_form()
    answers = json.loads(Path(args.answers).read_text(encoding="utf-8"))
    if not isinstance(answers, dict):
        raise FormError("answers file must hold a JSON object of item id -> value")
    profile = build_profile(form, answers)
    print(f"{profile.type_code} / {profile.group.value}")
    print("goals:", " ".join(f"g{i + 1}={g:.3f}" for i, g in enumerate(profile.goals)))
    if profile.group.value != "Independent":
        from .personality import select_vca_personality

        print("companion prefix:", select_vca_personality(profile.type_code))
    return 0


def _cmd_appraise_trace(args: argparse.Namespace) -> int:
    events = json.loads(Path(args.events).read_text(encoding="utf-8"))
    if not isinstance(events, list):
        raise ValueError("events file must hold a JSON array")
    goals = (0.25, 0.25, 0.25, 0.25)
    if args.goals:
        parts = [float(x) for x in args.goals.split(",")]
        if len(parts) != 4:
            raise ValueError("--goals needs four comma-separated numbers")
        goals = tuple(parts)  # type: ignore[assignment]
    env = EnvironmentalState.initial(independent=False)
    emotions = EmotionState.neutral()
    history: list[bool] = []
    for i, entry in enumerate(events):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ValueError(f"event {i}: need an object with a 'kind' field")
        kind = EventKind(entry["kind"])
        obs = Observation(
            rt=float(entry.get("rt", 10.0)),
            dt=float(entry.get("dt", 30.0)),
            grade=float(entry.get("grade", 0.0)),
            effort=float(entry.get("effort", 0.5)),
            help_requested=kind is EventKind.HELP_REQUESTED,
            correct=entry.get("correct"),
        )
        env = update_environmental_state(env, obs)
        impact = event_impact(kind, env.as_vector())
        des = desirability(impact, goals)
        lik = likelihood(history)
        positive = EVENT_VALENCE[kind] is Valence.POSITIVE
        unexp = unexpectedness(lik, 1.0 if positive else 0.0)
        inputs = AppraisalInputs(desirability=des, likelihood=lik, unexpectedness=unexp)
        emotions = appraise_first_branch(inputs, emotions, Phase.OUTCOME_RESOLVED)
        if kind in (
            EventKind.ACCURATE_RESPONSE,
            EventKind.INACCURATE_RESPONSE,
            EventKind.TIMEOUT,
        ):
            history.append(kind is EventKind.ACCURATE_RESPONSE)
        prospect = appraise_first_branch(
            AppraisalInputs(
                desirability=desirability(
                    event_impact(EventKind.ACCURATE_RESPONSE, env.as_vector()), goals
                ),
                likelihood=likelihood(history),
                unexpectedness=0.0,
            ),
            emotions,
            Phase.PROSPECT_RAISED,
        )
        emotions = emotions.merged(
            {
                EmotionKind.HOPE: prospect.get(EmotionKind.HOPE),
                EmotionKind.FEAR: prospect.get(EmotionKind.FEAR),
            }
        )
        line = {
            "event": kind.value,
            "inputs": inputs.as_dict(),
            "intensities": dict(sorted(emotions.as_dict().items())),
            "levels": {k.value: v.value for k, v in emotions.levels().items()},
        }
        print(json.dumps(line, separators=(",", ":"), ensure_ascii=False))
    return 0


def _cmd_validate_kb(args: argparse.Namespace) -> int:
    kb = load_knowledge_base(args.kb) if args.kb else assets.default_knowledge_base()
    scripts = (
        load_behavior_scripts(args.scripts) if args.scripts else assets.default_scripts()
    )
    missing: list[str] = []
    for rule in kb.rules:
        for _actor, tactic in rule.conclusions:
            if tactic not in scripts.scripts:
                missing.append(f"rule {rule.id!r}: no script for {tactic.value}")
    if missing:
        for line in missing:
            print(line, file=sys.stderr)
        return 1
    print(f"ok: {len(kb.rules)} rules, all concluded tactics have scripts")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affective-tutor",
        description="Emotion-aware tutoring engine: service, simulator, scoring tools.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--mode", default="Env3", choices=["Env1", "Env2", "Env3"])
    p.add_argument("--seed", type=int, default=None, help="fix the session seed")
    p.add_argument("--static", help="directory to serve at / (the web client build)")
    p.add_argument("--debug-emotions", action="store_true")
    _add_asset_args(p)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("simulate", help="run scripted learners, write logs and a report")
    p.add_argument("--profiles", help="learner profiles JSON (default: one per type)")
    p.add_argument(
        "--mode",
        nargs="+",
        default=["Env1", "Env2", "Env3"],
        choices=["Env1", "Env2", "Env3"],
    )
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", help="output directory (default: print report to stdout)")
    _add_asset_args(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("score", help="score questionnaire answers")
    p.add_argument("--form", help="questionnaire JSON (default: packaged)")
    p.add_argument("--answers", required=True, help="JSON file of item id -> value")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("appraise-trace", help="print appraisals for a JSON event list")
    p.add_argument("--events", required=True, help="JSON array of {kind, rt, dt, grade, effort}")
    p.add_argument("--goals", help="four comma-separated goal weights")
    p.set_defaults(func=_cmd_appraise_trace)

    p = sub.add_parser("validate-kb", help="check every concluded tactic has a script")
    p.add_argument("--kb", help="rulebook JSON (default: packaged)")
    p.add_argument("--scripts", help="behavior scripts JSON (default: packaged)")
    p.set_defaults(func=_cmd_validate_kb)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (FormError, KnowledgeBaseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
