import json

import pandas as pd
import pytest

from models.fock import save_state
from simulation.fock_core import coherent_state, product_state
from simulation.runner import main
from simulation.steering import noon_state

SMALL_FIG1 = ["--gamma-grid", "-2", "2", "5", "--beta-grid", "-2.5", "2.5", "11"]
SMALL_NOON = ["--alpha-grid", "0.1", "2.0", "5", "--beta-grid", "0.01", "1.0", "5"]


def read_meta(path):
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first.startswith("# meta: ")
    return json.loads(first[len("# meta: "):])


@pytest.fixture
def noon_file(tmp_path):
    return save_state(noon_state(2, 24), tmp_path / "noon_2.json")


# ── Запись без вычислений ────────────────────────────────────────────────────

def test_key_rate_maximal(capsys):
    assert main(["key-rate", "--delta", "0.25"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["rate_lower_bound"] == 1.0
    assert record["meta"]["schema_version"] == 1


def test_key_rate_from_violation(capsys):
    assert main(["key-rate", "--violation", "0.85"]) == 0
    assert json.loads(capsys.readouterr().out)["delta"] == pytest.approx(0.1)


@pytest.mark.parametrize("argv", [
    ["key-rate", "--delta", "0.3"],
    ["key-rate", "--violation", "0.7"],
    ["key-rate"],
    ["fig1", "--dim", "1"],
    ["fig1", "--tail-tol", "0"],
    ["no-such-command"],
])
def test_bad_arguments_exit_two(argv):
    assert main(argv) == 2


def test_baseline(capsys):
    assert main(["baseline"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["upper"] == pytest.approx(0.853553, abs=1e-6)
    assert record["steering_threshold_upper"] == record["upper"]


# ── fig1 ─────────────────────────────────────────────────────────────────────

def test_fig1_csv(tmp_path):
    out = tmp_path / "fig1.csv"
    assert main(["fig1", *SMALL_FIG1, "--out", str(out), "--quiet"]) == 0
    df = pd.read_csv(out, comment="#")
    assert list(df.columns) == [
        "gamma", "even_sup", "even_argmax_beta", "odd_inf", "odd_argmin_beta", "in_validity_region",
    ]
    tail = df[df["gamma"].abs() >= 1]
    assert tail["even_sup"].between(0.5, 0.75 + 1e-4).all()
    assert not df.loc[df["gamma"] == 0, "in_validity_region"].iloc[0]
    meta = read_meta(out)
    assert meta["command"] == "fig1"
    assert meta["seed"] == 42
    assert meta["config"]["truncation"] == "auto"
    assert out.with_suffix(".gp").exists()


def test_fig1_is_byte_identical(tmp_path):
    first, second = tmp_path / "a" / "fig1.csv", tmp_path / "b" / "fig1.csv"
    assert main(["fig1", *SMALL_FIG1, "--out", str(first), "--quiet"]) == 0
    assert main(["fig1", *SMALL_FIG1, "--out", str(second), "--quiet"]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_fig1_json(tmp_path):
    out = tmp_path / "fig1.json"
    assert main(["fig1", *SMALL_FIG1, "--format", "json", "--out", str(out), "--quiet"]) == 0
    record = json.loads(out.read_text(encoding="utf-8"))
    assert len(record["values"]) == 5
    assert record["meta"]["refined"] is True


def test_empty_grid_exits_four(tmp_path):
    argv = ["fig1", "--gamma-grid", "-1", "1", "0", "--out", str(tmp_path / "f.csv"), "--quiet"]
    assert main(argv) == 4


# ── noon-scan ────────────────────────────────────────────────────────────────

def test_noon_scan(tmp_path):
    out = tmp_path / "noon.json"
    assert main(["noon-scan", "--N", "2", *SMALL_NOON, "--out", str(out), "--quiet"]) == 0
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["extremum"]["value"] >= 0.95
    assert record["extremum"]["location"]["beta"] == pytest.approx(0.01)
    assert record["meta"]["dim"] == 89
    assert out.with_suffix(".csv").exists()
    assert out.with_suffix(".gp").exists()


def test_noon_scan_odd_n_violates(tmp_path):
    out = tmp_path / "noon1.json"
    argv = ["noon-scan", "--N", "1", "--b", "0", "--a", "odd", *SMALL_NOON, "--out", str(out), "--quiet"]
    assert main(argv) == 0
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["extremum"]["value"] > 0.75


def test_noon_scan_degenerate_alpha_exits_four(tmp_path):
    argv = ["noon-scan", "--N", "2", "--alpha-grid", "0", "0", "1",
            "--beta-grid", "0.01", "1.0", "5", "--out", str(tmp_path / "n.json"), "--quiet"]
    assert main(argv) == 4


@pytest.mark.parametrize("n", ["0", "-1"])
def test_noon_scan_bad_photon_number(tmp_path, n):
    argv = ["noon-scan", "--N", n, *SMALL_NOON, "--out", str(tmp_path / "n.json"), "--quiet"]
    assert main(argv) == 2


def test_noon_scan_is_byte_identical(tmp_path):
    bases = [tmp_path / "a" / "noon.json", tmp_path / "b" / "noon.json"]
    for out in bases:
        assert main(["noon-scan", "--N", "2", "--dim", "24", *SMALL_NOON, "--out", str(out), "--quiet"]) == 0
    for suffix in (".json", ".csv"):
        assert bases[0].with_suffix(suffix).read_bytes() == bases[1].with_suffix(suffix).read_bytes()


def test_noon_scan_rerun_from_embedded_config(tmp_path):
    first, second = tmp_path / "a" / "noon.json", tmp_path / "b" / "noon.json"
    argv = ["noon-scan", "--N", "2", *SMALL_NOON, "--quiet"]
    assert main([*argv, "--dim", "24", "--bound-tol", "2e-4", "--seed", "7", "--out", str(first)]) == 0
    assert main([*argv, "--config", str(first), "--out", str(second)]) == 0
    meta = json.loads(second.read_text(encoding="utf-8"))["meta"]
    assert meta["config"]["truncation"] == 24
    assert meta["seed"] == 7
    for suffix in (".json", ".csv"):
        assert first.with_suffix(suffix).read_bytes() == second.with_suffix(suffix).read_bytes()


def test_bad_config_file(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert main(["baseline", "--config", str(broken)]) == 2
    assert main(["baseline", "--config", str(tmp_path / "absent.json")]) == 3


def test_noon_scan_partial_nulls(tmp_path):
    out = tmp_path / "partial.json"
    argv = ["noon-scan", "--N", "2", "--dim", "24", "--alpha-grid", "0", "0.5", "2",
            "--beta-grid", "0.01", "0.1", "2", "--out", str(out), "--quiet"]
    assert main(argv) == 0
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["values"][:2] == [None, None]
    assert record["meta"]["missing_cells"] == 2
    csv = out.with_suffix(".csv").read_text(encoding="utf-8").splitlines()
    assert csv[1] == "alpha,beta,steering"
    assert csv[2] == "0.0,0.01,"


# ── steer-check ──────────────────────────────────────────────────────────────

def test_steer_check_noon(noon_file, capsys):
    argv = ["steer-check", "--state", str(noon_file), "--a", "1", "--b", "0",
            "--alpha", "0.5", "--beta", "0.05", "--quiet"]
    assert main(argv) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["violated"] is True
    assert record["side"] == "upper"
    assert record["settings"]["bob"][1]["displacement"] == -0.05


def test_steer_check_product_state(tmp_path, capsys):
    path = save_state(product_state([coherent_state(1.2, 48), coherent_state(-1.5, 48)]), tmp_path / "p.json")
    argv = ["steer-check", "--state", str(path), "--a", "0", "--b", "1",
            "--alpha", "0.3", "--beta", "1.0", "--quiet"]
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out)["violated"] is False


def test_steer_check_writes_out(noon_file, tmp_path, capsys):
    out = tmp_path / "report.json"
    argv = ["steer-check", "--state", str(noon_file), "--a", "1", "--b", "0",
            "--alpha", "0.5", "-0.5", "--beta", "0.05", "--out", str(out), "--quiet"]
    assert main(argv) == 0
    assert json.loads(out.read_text(encoding="utf-8")) == json.loads(capsys.readouterr().out)


def test_steer_check_corrupt_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"schema_version": 1,\n "dims": [', encoding="utf-8")
    argv = ["steer-check", "--state", str(path), "--a", "0", "--b", "0", "--alpha", "0.1", "--beta", "0.1"]
    assert main(argv) == 2


def test_steer_check_missing_file(tmp_path):
    argv = ["steer-check", "--state", str(tmp_path / "absent.json"), "--a", "0", "--b", "0",
            "--alpha", "0.1", "--beta", "0.1"]
    assert main(argv) == 3


def test_steer_check_single_mode_file(tmp_path):
    path = save_state(product_state([coherent_state(1.0, 32)]), tmp_path / "one_mode.json")
    argv = ["steer-check", "--state", str(path), "--a", "0", "--b", "0", "--alpha", "0.1", "--beta", "0.1"]
    assert main(argv) == 2


def test_steer_check_non_utf8_file(tmp_path):
    path = tmp_path / "binary.json"
    path.write_bytes(b"\xff\xfe{")
    argv = ["steer-check", "--state", str(path), "--a", "0", "--b", "0", "--alpha", "0.1", "--beta", "0.1"]
    assert main(argv) == 2


def test_steer_check_is_byte_identical(noon_file, tmp_path):
    outputs = [tmp_path / "a" / "report.json", tmp_path / "b" / "report.json"]
    for out in outputs:
        argv = ["steer-check", "--state", str(noon_file), "--a", "1", "--b", "0",
                "--alpha", "0.5", "--beta", "0.05", "--out", str(out), "--quiet"]
        assert main(argv) == 0
    assert outputs[0].read_bytes() == outputs[1].read_bytes()


def test_steer_check_degenerate(noon_file):
    argv = ["steer-check", "--state", str(noon_file), "--a", "odd", "--b", "even",
            "--alpha", "0.0", "--beta", "0.1", "--quiet"]
    assert main(argv) == 5


# ── monogamy / fur-scan ──────────────────────────────────────────────────────

def test_monogamy_is_reproducible(tmp_path):
    first, second = tmp_path / "m1.csv", tmp_path / "m2.csv"
    for out in (first, second):
        assert main(["monogamy", "--samples", "20", "--seed", "42", "--out", str(out), "--quiet"]) == 0
    assert first.read_bytes() == second.read_bytes()
    summary = json.loads((tmp_path / "m1_summary.json").read_text(encoding="utf-8"))
    assert summary["summary"]["failures"] == 0
    assert summary["summary"]["samples"] == 20
    assert len(pd.read_csv(first, comment="#")) == 20


def test_fur_scan_grid(tmp_path):
    out = tmp_path / "fur.csv"
    argv = ["fur-scan", "--outcome", "odd", "--gamma-grid", "1", "2", "3",
            "--beta-grid", "-1", "1", "5", "--out", str(out), "--quiet"]
    assert main(argv) == 0
    df = pd.read_csv(out, comment="#")
    assert list(df.columns) == ["gamma", "beta", "average_certainty", "in_validity_region", "within_bounds"]
    assert len(df) == 15
    assert df["within_bounds"].all()
    assert read_meta(out)["outcome"] == "odd"


def test_fur_scan_rerun_from_csv_meta(tmp_path):
    first, second = tmp_path / "a" / "fur.csv", tmp_path / "b" / "fur.csv"
    argv = ["fur-scan", "--gamma-grid", "-1", "1", "3", "--beta-grid", "-1", "1", "5", "--quiet"]
    assert main([*argv, "--dim", "40", "--beta-min", "0.1", "--out", str(first)]) == 0
    assert main([*argv, "--out", str(first.with_name("again.csv")), "--dim", "40", "--beta-min", "0.1"]) == 0
    assert first.read_bytes() == first.with_name("again.csv").read_bytes()

    assert main([*argv, "--config", str(first), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert read_meta(second)["dim"] == 40


def test_fur_scan_state_file(tmp_path):
    state = save_state(product_state([coherent_state(1.5, 48)]), tmp_path / "c.json")
    out = tmp_path / "fur.json"
    argv = ["fur-scan", "--state", str(state), "--beta-grid", "0.5", "1.5", "3",
            "--format", "json", "--out", str(out), "--quiet"]
    assert main(argv) == 0
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["axes"]["beta"] == [0.5, 1.0, 1.5]
    assert all(record["extras"]["within_bounds"])
