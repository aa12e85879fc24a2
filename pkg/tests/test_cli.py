import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from stpgames import FiniteGame
from stpgames.cli import main

from conftest import EX413_L, EX51_V, EXAMPLES, SCHEMAS


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


REPORT = schema("report.schema.json")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    doc = json.loads(out) if out.strip() else None
    if doc is not None:
        jsonschema.validate(doc, REPORT)
    return code, doc, err


def ex(name):
    return EXAMPLES / name


def strip_timings(doc):
    doc = dict(doc)
    doc.pop("timings", None)
    return doc


def test_verify_estimate_exact_wpg(capsys):
    code, doc, err = run(capsys, "verify", ex("ex334.json"), "--estimate")
    assert code == 0
    r = doc["result"]
    assert r["kind"] == "ExactWPG"
    assert r["weights"][1] == pytest.approx(2.0, abs=1e-4)
    assert doc["input_digest"].startswith("sha256:")
    assert "ExactWPG" in err


def test_verify_fixed_weights_negative(capsys):
    code, doc, _ = run(capsys, "verify", ex("ex413.json"), "--weights", 1, 1, 1)
    assert code == 2
    assert doc["result"]["kind"] == "ClosestOnly"
    assert doc["result"]["distance"] == pytest.approx(3.5893, abs=1e-3)


def test_verify_zero_game_is_pg(capsys):
    code, doc, _ = run(capsys, "verify", ex("zero22.json"), "--weights", 1, 1)
    assert code == 0
    assert doc["result"]["kind"] == "ExactPG"


def test_verify_joint_mode_not_worse(capsys):
    _, fix, _ = run(capsys, "verify", ex("ex413.json"), "--weights", 1, 0.5135, 2.0853)
    _, joint, _ = run(capsys, "verify", ex("ex413.json"), "--weights", 1, 0.5135, 2.0853, "--mode", "joint")
    assert joint["result"]["distance"] <= fix["result"]["distance"] + 1e-12
    assert joint["settings"]["mode"] == "joint"


def test_verify_degenerate(capsys):
    code, doc, _ = run(capsys, "verify", ex("matching_pennies.json"))
    assert code == 3
    assert doc["result"]["kind"] == "Degenerate"


def test_nwpg(capsys):
    code, doc, _ = run(capsys, "nwpg", ex("ex413.json"))
    assert code == 0
    assert doc["result"]["is_nwpg"] is True
    code, doc, _ = run(capsys, "nwpg", ex("near_tie.json"))
    assert code == 2
    assert doc["result"]["mismatch_profiles"] == [1, 2]
    code, doc, _ = run(capsys, "nwpg", ex("matching_pennies.json"))
    assert code == 3


def test_design(capsys):
    code, doc, err = run(capsys, "design", ex("ex51.json"), ex("ex51_J.json"))
    assert code == 0
    assert doc["result"]["equivalent"] is True
    np.testing.assert_allclose(doc["result"]["weights"], [1, 0.8004, 1.5111, 1.2184], atol=5e-3)
    assert "equivalent=True" in err


def test_design_singular(capsys):
    code, doc, _ = run(capsys, "design", ex("ex51.json"), ex("constant_J.json"))
    assert code == 3
    assert doc["result"]["kind"] == "SingularDesign"


def test_design_round_trip(capsys, tmp_path):
    """A designed game fed back in with the same objective reproduces itself."""
    _, doc, _ = run(capsys, "design", ex("ex51.json"), ex("ex51_J.json"))
    u = doc["result"]["utilities"]
    path = tmp_path / "designed.json"
    path.write_text(json.dumps({"radices": [2, 2, 2, 2], "payoffs": u}))
    code, again, _ = run(capsys, "design", path, ex("ex51_J.json"))
    assert code == 0
    np.testing.assert_allclose(again["result"]["utilities"], u, atol=1e-8)
    assert again["result"]["residual"] <= 1e-8


def test_simulate(capsys):
    code, doc, err = run(capsys, "simulate", ex("ex413.json"), "--start", "1,1,1", "--steps", 4)
    assert code == 0
    r = doc["result"]
    assert r["flats"] == [1, 6, 2, 6, 2]
    assert r["cycle_start"] == 1 and r["cycle_length"] == 2
    assert r["dynamics"]["composed"] == EX413_L
    assert "cycle of length 2" in err


def test_simulate_kappa_steps_finds_cycle(capsys):
    code, doc, _ = run(capsys, "simulate", ex("ex51.json"), "--start", "2,1,2,1", "--steps", 16)
    assert code == 0
    assert doc["result"]["cycle_start"] is not None


def test_determinism(capsys):
    _, a, _ = run(capsys, "verify", ex("ex413.json"))
    _, b, _ = run(capsys, "verify", ex("ex413.json"))
    assert json.dumps(strip_timings(a), sort_keys=True) == json.dumps(strip_timings(b), sort_keys=True)


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code = main(["nwpg", str(ex("ex413.json")), "--output", str(target)])
    out, _ = capsys.readouterr()
    assert code == 0 and out == ""
    jsonschema.validate(json.loads(target.read_text()), REPORT)


@pytest.mark.parametrize("jobs", [1, 2])
def test_multiple_files(capsys, jobs):
    code, doc, _ = run(
        capsys, "verify", ex("ex334.json"), ex("ex413.json"), ex("zero22.json"), "--jobs", jobs
    )
    assert code == 2  # worst outcome wins
    assert [r["input"].split("/")[-1] for r in doc["reports"]] == ["ex334.json", "ex413.json", "zero22.json"]
    assert [r["result"]["kind"] for r in doc["reports"]] == ["ExactWPG", "ClosestOnly", "ExactPG"]


@pytest.mark.parametrize(
    "payload,field",
    [
        ({"radices": [2, 2], "payoffs": [[1, 2, 3], [1, 2, 3, 4]]}, "payoffs"),
        ({"radices": [1, 2], "payoffs": [[1, 2], [1, 2]]}, "radices"),
        ({"payoffs": [[1, 2, 3, 4], [1, 2, 3, 4]]}, "radices"),
        ({"radices": [2, 2], "payoffs": [[1, 2, 3, "x"], [1, 2, 3, 4]]}, "payoffs"),
    ],
)
def test_malformed_game(capsys, tmp_path, payload, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    code, doc, err = run(capsys, "verify", path)
    assert code == 64
    assert doc is None
    assert f"'{field}'" in err


def test_malformed_inputs_misc(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "nwpg", bad)[0] == 64
    assert run(capsys, "nwpg", tmp_path / "missing.json")[0] == 64
    short = tmp_path / "short.json"
    short.write_text("[1, 2, 3]")
    code, _, err = run(capsys, "design", ex("ex51.json"), short)
    assert code == 64 and "'objective'" in err
    code, _, err = run(capsys, "simulate", ex("ex413.json"), "--start", "3,1,1")
    assert code == 64 and "'start'" in err
    code, _, _ = run(capsys, "verify", ex("ex413.json"), "--weights", 1, -1, 1)
    assert code == 64
    code, _, _ = run(capsys, "verify", ex("ex413.json"), "--epsilon", 0)
    assert code == 64


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "stpgames", "verify", str(ex("ex334.json"))],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    jsonschema.validate(json.loads(proc.stdout), REPORT)


def test_fixtures_validate():
    game_schema = schema("game.schema.json")
    obj_schema = schema("objective.schema.json")
    for path in sorted(EXAMPLES.glob("*.json")):
        doc = json.loads(path.read_text())
        if isinstance(doc, list):
            jsonschema.validate(doc, obj_schema)
        else:
            jsonschema.validate(doc, game_schema)


def test_table_form_matches_payoff_form(capsys, tmp_path):
    g = FiniteGame((2, 2, 2, 2), EX51_V)
    path = tmp_path / "table.json"
    # listed in reverse order: profile keys, not positions, carry the meaning
    entries = [{"profile": list(k), "payoffs": list(v)} for k, v in reversed(g.table().items())]
    path.write_text(json.dumps({"radices": [2, 2, 2, 2], "table": entries}))
    _, a, _ = run(capsys, "design", path, ex("ex51_J.json"))
    _, b, _ = run(capsys, "design", ex("ex51.json"), ex("ex51_J.json"))
    assert a["result"]["weights"] == b["result"]["weights"]
