import json

from app import cli_dispatch


def test_check_accepts_p_a(invoke, fixture_path):
    result, report = invoke("check", fixture_path("p_a.json"))
    assert result.exit_code == 0
    assert report.status == "ok"
    assert report.payload["report"]["ok"] is True
    assert "total" in report.timings


def test_check_flags_antisymmetry(invoke, fixture_path):
    result, report = invoke("check", fixture_path("antisymmetry.json"))
    assert result.exit_code == 1
    assert report.witnesses[0]["clause"] == "antisymmetry"


def test_check_flags_empty_barrier(invoke, fixture_path):
    result, report = invoke("check", fixture_path("p_a_empty_barrier.json"))
    assert result.exit_code == 1
    assert report.status == "violation"


def test_unknown_command_is_an_error(invoke):
    result, report = invoke("no-such-command")
    assert result.exit_code == 2
    assert report is None


def test_malformed_file_is_an_error(invoke, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    result, report = invoke("check", str(broken))
    assert result.exit_code == 2
    assert report.status == "error"
    assert report.witnesses == []


def test_missing_key_is_an_error(invoke, tmp_path):
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"points": [[0, 0]]}), encoding="utf-8")
    result, _ = invoke("check", str(partial))
    assert result.exit_code == 2


def test_cb_reports_sequence(invoke, fixture_path):
    result, report = invoke("cb", fixture_path("p_a.json"), "--verify-levels")
    assert result.exit_code == 0
    assert report.payload["sequence"] == [2, 1]


def test_cb_on_lonely_top_fails_levels(invoke, fixture_path):
    result, _ = invoke("cb", fixture_path("lonely_top.json"), "--verify-levels")
    assert result.exit_code == 1


def test_separate_and_cover(invoke, fixture_path):
    result, report = invoke("separate", fixture_path("p_a.json"), "0,0", "0,1")
    assert result.exit_code == 0
    result, report = invoke("cover", fixture_path("p_a.json"), "0,1", "--positive", "0,1", "--negative", "0,0")
    assert result.exit_code == 0


def test_bad_point_argument(invoke, fixture_path):
    result, _ = invoke("separate", fixture_path("p_a.json"), "zero", "0,1")
    assert result.exit_code == 2


def test_export_dot(invoke, fixture_path):
    result, _ = invoke("export-dot", fixture_path("diamond.json"))
    assert result.exit_code == 0
    assert "rank=same" in result.output


def test_amalgamate_am1(invoke, fixture_path):
    result, report = invoke(
        "amalgamate", fixture_path("am1_first.json"), fixture_path("am1_second.json"), fixture_path("am1_iso.json")
    )
    assert result.exit_code == 0
    assert report.payload["order"]["universe"] == {"width": 1, "height": 3, "fanout": 1}


def test_b3_unfolds_cross_pair(invoke, fixture_path):
    result, report = invoke(
        "b3",
        fixture_path("am2_first.json"),
        fixture_path("am2_second.json"),
        fixture_path("am2_iso.json"),
        "0,1",
        "1,2",
    )
    assert result.exit_code == 0
    assert report.payload["barrier"] == [[0, 0]]
    assert report.payload["leftPairs"] == [[[0, 1], [0, 0]]]
    assert report.payload["rightPairs"] == [[[0, 0], [1, 2]]]


def test_b3_on_a_pair_and_its_image(invoke, fixture_path):
    result, report = invoke(
        "b3",
        fixture_path("am1_first.json"),
        fixture_path("am1_second.json"),
        fixture_path("am1_iso.json"),
        "0,1",
        "0,2",
    )
    assert result.exit_code == 0
    assert report.payload["barrier"] == [[0, 1]]
    assert "leftPairs" not in report.payload


def test_large_barrier_option(invoke, fixture_path):
    result, report = invoke(
        "b3",
        fixture_path("am2_first.json"),
        fixture_path("am2_second.json"),
        fixture_path("am2_iso.json"),
        "0,1",
        "1,2",
        "--barrier",
        "B3",
    )
    assert result.exit_code == 0
    assert report.payload["barrier"] == [[0, 0]]


def test_cond_amalgamate_marked_counterexample(invoke, fixture_path):
    result, report = invoke(
        "cond-amalgamate",
        fixture_path("am2_marked_first.json"),
        fixture_path("am2_marked_second.json"),
        fixture_path("am2_iso.json"),
    )
    assert result.exit_code == 1
    assert report.payload["compatible"] is False
    assert report.payload["stages"][-1]["stage"] == "marked"


def test_cond_validate(invoke, fixture_path):
    result, report = invoke("cond-validate", fixture_path("am2_marked_first.json"))
    assert result.exit_code == 0
    assert report.payload["nodes"] == 1


def test_cond_add_point_needs_one_placement(invoke, fixture_path):
    result, _ = invoke("cond-add-point", fixture_path("p_a.json"), "1,1", "--below", "0,1", "--above", "0,0")
    assert result.exit_code == 2
    result, report = invoke("cond-add-point", fixture_path("p_a.json"), "2,0", "--below", "0,1")
    assert result.exit_code == 0
    assert report.payload["extends"] is True


def test_symsys_check(invoke, fixture_path):
    result, _ = invoke("symsys-check", fixture_path("system_twin.json"))
    assert result.exit_code == 0
    result, report = invoke("symsys-check", fixture_path("system_moved.json"))
    assert result.exit_code == 1
    assert report.witnesses[0]["clause"] == "B"


def test_gap_search(invoke, fixture_path):
    result, report = invoke("gap-search", fixture_path("system_tower.json"), "--node", "9", "--ordinal", "3")
    assert result.exit_code == 0
    assert report.payload["witness"] == {"i": 3, "alpha": 2, "beta": 4}
    result, report = invoke("gap-search", fixture_path("system_tower.json"), "--node", "9", "--ordinal", "5")
    assert result.exit_code == 1
    assert report.payload["witness"] is None


def test_simulate_is_reproducible(invoke):
    args = ("simulate", "--width", "3", "--height", "2", "--fanout", "2", "--seed", "17")
    first, report = invoke(*args)
    second, _ = invoke(*args)
    assert first.exit_code == 0
    assert first.output == second.output
    assert report.payload["sequence"] == [3, 3]


def test_simulate_with_schedule(invoke, fixture_path):
    result, report = invoke(
        "simulate", "--width", "2", "--height", "2", "--seed", "1", "--schedule", fixture_path("schedule_small.json")
    )
    assert result.exit_code == 0
    assert report.payload["goals"] == 4
    assert report.payload["sequence"] == [2, 2]


def test_simulate_needs_a_seed(invoke):
    result, _ = invoke("simulate", "--width", "2", "--height", "2")
    assert result.exit_code == 2


def test_cli_dispatch(monkeypatch, fixture_path):
    monkeypatch.delenv("REDIS_HOST", raising=False)
    code, report = cli_dispatch(["cb", fixture_path("diamond.json")])
    assert code == 0
    assert report.payload["sequence"] == [2, 2]
    code, report = cli_dispatch(["check", fixture_path("antisymmetry.json")])
    assert code == 1
    assert report.command == "check"
