from pathlib import Path

import pytest

from ergolab.cli import main


def run_to_file(tmp_path: Path, name: str, argv: list[str]):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out.read_bytes()


def test_tower_output_and_determinism(tmp_path):
    argv = ["tower", "--N", "12", "--n", "5", "--eps", "1/4"]
    code1, bytes1 = run_to_file(tmp_path, "a.txt", argv)
    code2, bytes2 = run_to_file(tmp_path, "b.txt", argv)
    assert code1 == code2 == 0
    assert bytes1 == bytes2
    text = bytes1.decode()
    assert text.startswith("ergolab-tower v1\n")
    assert "error_mass 1/6" in text
    assert "level 4: 4 9" in text


def test_tower_aperiodicity_exit_code(tmp_path, capsys):
    code = main(["tower", "--N", "12", "--n", "13", "--eps", "1/2"])
    assert code == 2
    assert "cycle" in capsys.readouterr().err


def test_tower_budget_exit_code():
    code = main(["tower", "--N", "12", "--n", "5", "--eps", "1/12"])
    assert code == 2


def test_unknown_flag_exits_one(capsys):
    assert main(["tower", "--bogus", "3"]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_exits_one():
    assert main(["frobnicate"]) == 1


def test_no_subcommand_exits_one():
    assert main([]) == 1


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "tower" in capsys.readouterr().out
    assert main(["wm", "--help"]) == 0


def test_bad_eps_value_exits_one():
    assert main(["tower", "--N", "12", "--n", "4", "--eps", "zebra"]) == 1


def test_bad_scenario_exits_one():
    assert main(["approx", "--scenario", "mystery"]) == 1


def test_approx_report(tmp_path):
    code, data = run_to_file(
        tmp_path, "approx.txt", ["approx", "--N", "8", "--M", "3", "--seed", "2", "--eps", "1/3"]
    )
    assert code == 0
    text = data.decode()
    assert text.startswith("ergolab-approx v1\n")
    assert "label 0 " in text
    assert "rep " in text
    assert "distance 0/1" in text  # radius below the permutation gap recovers exactly


def test_conjugate_exact_recovery(tmp_path):
    code, data = run_to_file(
        tmp_path,
        "conj.txt",
        ["conjugate", "--scenario", "random_piecewise", "--N", "60", "--M", "4",
         "--seed", "4", "--eps", "1/4"],
    )
    assert code == 0
    text = data.decode()
    assert "distance 0/1" in text
    assert "ok true" in text


def test_conjugate_coarse_radius(tmp_path):
    code, data = run_to_file(
        tmp_path,
        "conj2.txt",
        ["conjugate", "--scenario", "conjugation_demo", "--N", "60", "--M", "4",
         "--seed", "3", "--eps", "3/4"],
    )
    assert code == 0
    assert "ok true" in data.decode()


def test_wm_csv_schema(tmp_path):
    code, data = run_to_file(
        tmp_path,
        "wm.csv",
        ["wm", "--scenario", "product_wm", "--N", "6", "--M", "5", "--steps", "8",
         "--depth", "1", "--kmax", "2"],
    )
    assert code == 0
    lines = data.decode().splitlines()
    assert lines[0] == "system_id,A_index,B_index,N_steps,DN,eps,member"
    assert all(line.startswith("product_wm-N6-M5-s1,") for line in lines[1:])
    # depth-1 family has 5 sets, 25 ordered pairs, 2 thresholds each
    assert len(lines) == 1 + 50


def test_wm_exact_mode_emits_rationals(tmp_path):
    code, data = run_to_file(
        tmp_path,
        "wm_exact.csv",
        ["wm", "--scenario", "trivial", "--N", "2", "--M", "2", "--steps", "4",
         "--depth", "0", "--kmax", "1", "--exact"],
    )
    assert code == 0
    row = data.decode().splitlines()[1].split(",")
    assert row[4] == "0/1"


def test_sample_csv_schema_and_rows(tmp_path):
    code, data = run_to_file(
        tmp_path,
        "sample.csv",
        ["sample", "--N", "12", "--M", "5", "--trials", "1", "--seed", "3",
         "--steps", "8", "--eps", "1/20"],
    )
    assert code == 0
    lines = data.decode().splitlines()
    assert lines[0] == "trial,scenario,defect,DN,eps,member"
    assert len(lines) == 5
    assert lines[1].startswith("-1,trivial,")
    assert lines[4].startswith("0,random_piecewise,")


@pytest.mark.parametrize(
    "argv",
    [
        ["tower", "--N", "12", "--n", "5", "--eps", "1/4"],
        ["approx", "--N", "8", "--M", "3", "--seed", "2", "--eps", "1/3"],
        ["conjugate", "--scenario", "conjugation_demo", "--N", "40", "--M", "4",
         "--seed", "5", "--eps", "1/2"],
        ["wm", "--scenario", "random_piecewise", "--N", "6", "--M", "3",
         "--seed", "2", "--steps", "8", "--depth", "1", "--kmax", "2"],
        ["sample", "--N", "12", "--M", "3", "--trials", "2", "--seed", "2",
         "--steps", "8", "--eps", "1/10"],
        ["roundtrip", "--scenario", "random_piecewise", "--N", "8", "--M", "3",
         "--seed", "1"],
    ],
    ids=["tower", "approx", "conjugate", "wm", "sample", "roundtrip"],
)
def test_subcommands_byte_identical_across_runs(tmp_path, argv):
    code1, bytes1 = run_to_file(tmp_path, "run1.out", argv)
    code2, bytes2 = run_to_file(tmp_path, "run2.out", argv)
    assert code1 == code2 == 0
    assert bytes1 == bytes2


@pytest.mark.parametrize(
    "argv",
    [
        ["wm", "--scenario", "random_piecewise", "--N", "6", "--M", "3",
         "--seed", "2", "--steps", "8", "--depth", "1", "--kmax", "2"],
        ["sample", "--N", "12", "--M", "3", "--trials", "3", "--seed", "2",
         "--steps", "8", "--eps", "1/10"],
    ],
    ids=["wm", "sample"],
)
def test_thread_count_does_not_change_bytes(tmp_path, argv):
    _, single = run_to_file(tmp_path, "t1.out", argv + ["--threads", "1"])
    _, quad = run_to_file(tmp_path, "t4.out", argv + ["--threads", "4"])
    assert single == quad


def test_roundtrip_ok(tmp_path):
    code, data = run_to_file(tmp_path, "rt.txt", ["roundtrip", "--N", "6", "--M", "3"])
    assert code == 0
    text = data.decode()
    assert "perm_bytes" in text and " ok" in text
    assert "FAIL" not in text


def test_config_file_defaults_and_cli_override(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(
        "# tower settings\nN = 12\nn = 5\neps = 1/4\n", encoding="utf-8"
    )
    out_a = tmp_path / "from_config.txt"
    assert main(["tower", "--config", str(config), "--out", str(out_a)]) == 0
    assert "error_mass 1/6" in out_a.read_text()

    out_b = tmp_path / "override.txt"
    assert (
        main(["tower", "--config", str(config), "--n", "4", "--out", str(out_b)]) == 0
    )
    assert "error_mass 0/1" in out_b.read_text()


def test_config_file_errors(tmp_path):
    missing = tmp_path / "nope.cfg"
    assert main(["tower", "--config", str(missing)]) == 1

    bad_key = tmp_path / "bad.cfg"
    bad_key.write_text("wibble = 3\n", encoding="utf-8")
    assert main(["tower", "--config", str(bad_key)]) == 1

    bad_line = tmp_path / "line.cfg"
    bad_line.write_text("just some words\n", encoding="utf-8")
    assert main(["tower", "--config", str(bad_line)]) == 1


def test_stdout_emission(capsys):
    assert main(["tower", "--N", "12", "--n", "6", "--eps", "1/2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("ergolab-tower v1\n")


def test_wm_summary_on_stdout_with_out_file(tmp_path, capsys):
    out = tmp_path / "wm.csv"
    assert (
        main(["wm", "--scenario", "trivial", "--N", "4", "--M", "2", "--steps", "4",
              "--depth", "0", "--kmax", "1", "--out", str(out)])
        == 0
    )
    text = capsys.readouterr().out
    assert "defect 1/2" in text
    assert "diagonal_census" in text
