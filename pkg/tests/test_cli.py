import json

import pytest

from affective_tutor.assets import default_form
from affective_tutor.cli import build_parser, main


def write_answers(tmp_path, value=1.0):
    answers = {item.id: value for item in default_form().items}
    target = tmp_path / "answers.json"
    target.write_text(json.dumps(answers), encoding="utf-8")
    return target


class TestParser:
    def test_subcommand_required(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([])
        assert exc.value.code == 2

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["score", "--nonsense"])
        assert exc.value.code == 2


class TestScore:
    def test_prints_type_group_and_goals(self, tmp_path, capsys):
        answers = write_answers(tmp_path)
        assert main(["score", "--answers", str(answers)]) == 0
        out = capsys.readouterr().out
        assert "ESTJ / Cooperative" in out
        assert "companion" in out.lower()
        assert out.count("g") >= 4

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert main(["score", "--answers", str(tmp_path / "absent.json")]) == 1
        assert capsys.readouterr().err != ""


class TestValidateKb:
    def test_default_assets_validate(self, capsys):
        assert main(["validate-kb"]) == 0
        assert "ok" in capsys.readouterr().out

    def test_missing_script_detected(self, tmp_path, capsys):
        from importlib.resources import files

        raw = files("affective_tutor").joinpath("data", "behavior_scripts.json")
        scripts = json.loads(raw.read_text(encoding="utf-8"))
        removed = scripts["scripts"].pop("GiveHelp")
        assert removed
        target = tmp_path / "scripts.json"
        target.write_text(json.dumps(scripts), encoding="utf-8")
        assert main(["validate-kb", "--scripts", str(target)]) == 1
        err = capsys.readouterr()
        assert "GiveHelp" in err.out + err.err


class TestAppraiseTrace:
    def test_emits_one_json_line_per_event(self, tmp_path, capsys):
        events = [
            {"kind": "AccurateResponse", "rt": 5.0, "dt": 30.0, "grade": 1.0,
             "effort": 0.8, "correct": True},
            {"kind": "InaccurateResponse", "rt": 9.0, "dt": 30.0, "grade": 0.0,
             "effort": 0.5, "correct": False},
        ]
        target = tmp_path / "events.json"
        target.write_text(json.dumps(events), encoding="utf-8")
        assert main(["appraise-trace", "--events", str(target)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        first, second = (json.loads(line) for line in lines)
        assert first["event"] == "AccurateResponse"
        assert first["intensities"]["Joy"] > 0.0
        assert first["levels"]["Joy"] in ("Low", "Medium", "High")
        assert second["intensities"]["Distress"] > 0.0
        assert 0.0 <= second["inputs"]["likelihood"] <= 1.0

    def test_custom_goals_shift_desirability(self, tmp_path, capsys):
        events = [{"kind": "AccurateResponse", "rt": 5.0, "dt": 30.0, "grade": 1.0,
                   "effort": 0.0, "correct": True}]
        target = tmp_path / "events.json"
        target.write_text(json.dumps(events), encoding="utf-8")

        def run(goals):
            assert main(["appraise-trace", "--events", str(target), "--goals", goals]) == 0
            line = capsys.readouterr().out.strip()
            return json.loads(line)["inputs"]["desirability"]

        grade_focused = run("0,0,0,1")
        effort_focused = run("0,1,0,0")
        assert grade_focused > effort_focused

    def test_bad_goals_exit_1(self, tmp_path, capsys):
        events = [{"kind": "AccurateResponse", "rt": 5.0, "dt": 30.0, "grade": 1.0,
                   "effort": 0.0, "correct": True}]
        target = tmp_path / "events.json"
        target.write_text(json.dumps(events), encoding="utf-8")
        assert main(["appraise-trace", "--events", str(target), "--goals", "1,2"]) == 1
        assert capsys.readouterr().err != ""


class TestSimulate:
    def test_writes_logs_and_reports(self, tmp_path, capsys):
        out = tmp_path / "runs"
        assert main(["simulate", "--mode", "Env2", "--seed", "3",
                     "--out", str(out)]) == 0
        files = sorted(p.name for p in out.iterdir())
        assert "report.json" in files
        assert "report.txt" in files
        assert sum(1 for f in files if f.endswith(".ndjson")) == 16
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        vca_total = sum(
            sum(s["tactics"]["VCA"].values()) for s in report["sessions"]
        )
        assert vca_total == 0

    def test_stdout_report_without_out(self, capsys):
        assert main(["simulate", "--mode", "Env1", "--seed", "3"]) == 0
        out = capsys.readouterr().out
        assert "batch of 16 sessions" in out
