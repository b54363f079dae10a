import json

import numpy as np
import pytest

from models.config import RunConfig, ValidityRegion, auto_dim
from models.errors import ConfigError, DegenerateScan, EmptyGrid, OutOfRange, StateFileError
from models.fock import (
    DenseOperator,
    FockVector,
    MultiModeState,
    Parity,
    ProductMixture,
    load_state,
    save_state,
)
from models.scan import Extremum, ScanResult, as_grid, find_extremum
from simulation.fock_core import coherent_state, fock_state, product_state
from simulation.steering import noon_state


# ── RunConfig ────────────────────────────────────────────────────────────────

def test_default_config():
    config = RunConfig()
    assert config.explicit_dim is None
    assert config.resolve_dim(1.0, 1.0) == 64
    assert config.region == ValidityRegion(0.05, 1.0)


def test_explicit_truncation():
    config = RunConfig(truncation="48")
    assert config.truncation == 48
    assert config.resolve_dim(3.0, 3.0) == 48


@pytest.mark.parametrize("kwargs", [
    {"truncation": 1},
    {"truncation": "big"},
    {"tail_tolerance": 0.0},
    {"bound_tolerance": -1e-4},
    {"beta_min": 0.0},
    {"photon_floor": -1.0},
    {"seed": -1},
    {"seed": 2**64},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)


def test_config_from_result_meta(tmp_path):
    path = tmp_path / "result.json"
    meta = {"meta": {"config": RunConfig(truncation=40, seed=7).to_dict()}}
    path.write_text(json.dumps(meta), encoding="utf-8")
    config = RunConfig.from_json(str(path))
    assert config == RunConfig(truncation=40, seed=7)


def test_config_from_csv_meta_line(tmp_path):
    path = tmp_path / "result.csv"
    header = json.dumps({"command": "fur-scan", "config": RunConfig(truncation=50, beta_min=0.1).to_dict()})
    path.write_text(f"# meta: {header}\ngamma,beta\n0.0,0.1\n", encoding="utf-8")
    assert RunConfig.from_json(str(path)) == RunConfig(truncation=50, beta_min=0.1)


def test_config_from_plain_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"truncation": "auto", "seed": 9}), encoding="utf-8")
    assert RunConfig.from_json(str(path)) == RunConfig(seed=9)


@pytest.mark.parametrize("content", [b"{broken", b"\xff\xfe{", b"[1, 2]", b'{"meta": {"config": 3}}'])
def test_config_file_errors(tmp_path, content):
    path = tmp_path / "config.json"
    path.write_bytes(content)
    with pytest.raises(ConfigError):
        RunConfig.from_json(str(path))


def test_auto_dim():
    assert auto_dim(0.0, 0.0) == 32
    assert auto_dim(2.5, 2.0) == 111
    assert auto_dim(-3.0, 3.0) == 144


# ── Parity ───────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("value, expected", [
    ("even", Parity.EVEN), ("ODD", Parity.ODD), ("0", Parity.EVEN), (1, Parity.ODD), (Parity.EVEN, Parity.EVEN),
])
def test_parity_parse(value, expected):
    assert Parity.parse(value) is expected


@pytest.mark.parametrize("value", ["maybe", 2, -1])
def test_parity_parse_rejects(value):
    with pytest.raises(OutOfRange):
        Parity.parse(value)


# ── Вектора и операторы ──────────────────────────────────────────────────────

def test_fock_vector_is_frozen():
    v = FockVector.normalized([1.0, 1.0])
    assert v.amps[0] == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ValueError):
        v.amps[0] = 0.0


def test_dense_operator_copies_input():
    source = np.eye(3)
    op = DenseOperator(source)
    source[0, 0] = 5.0
    assert op.entries[0, 0] == 1.0
    assert op.is_hermitian()


def test_mixture_weights_are_normalized():
    mix = ProductMixture.from_terms([2.0, 6.0], [(fock_state(0, 4),), (fock_state(1, 4),)])
    np.testing.assert_allclose(mix.weights, [0.25, 0.75])
    assert mix.dims == (4,)


# ── Файлы состояний ──────────────────────────────────────────────────────────

def test_state_file_roundtrip(tmp_path):
    state = noon_state(2, 6)
    loaded = load_state(save_state(state, tmp_path / "noon.json"))
    assert loaded.dims == (6, 6)
    np.testing.assert_array_equal(loaded.data, state.data)


def test_mixture_file_roundtrip(tmp_path):
    mix = ProductMixture.from_terms(
        [0.3, 0.7],
        [(coherent_state(1.0, 20), coherent_state(-0.5, 20)), (coherent_state(0.2, 20), fock_state(3, 20))],
    )
    loaded = load_state(save_state(mix, tmp_path / "mix.json"))
    assert isinstance(loaded, ProductMixture)
    np.testing.assert_allclose(loaded.weights, mix.weights)
    np.testing.assert_array_equal(loaded.terms[1][1].amps, mix.terms[1][1].amps)


def test_density_file_roundtrip(tmp_path):
    pure = product_state([coherent_state(0.4, 6), fock_state(1, 6)])
    rho = MultiModeState(pure.dims, "density", pure.density_matrix())
    loaded = load_state(save_state(rho, tmp_path / "rho.json"))
    assert loaded.kind == "density"
    np.testing.assert_allclose(loaded.data, rho.data, atol=1e-15)


def test_broken_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "schema_version": 1,\n  "dims": [4, 4\n}', encoding="utf-8")
    with pytest.raises(StateFileError) as excinfo:
        load_state(path)
    assert excinfo.value.line == 4


def test_non_utf8_file_rejected(tmp_path):
    path = tmp_path / "binary.json"
    path.write_bytes(b"\xff\xfe{")
    with pytest.raises(StateFileError):
        load_state(path)


@pytest.mark.parametrize("record", [
    {"schema_version": 2, "modes": 1, "dims": [2], "kind": "pure", "data": [[1, 0], [0, 0]]},
    {"schema_version": 1, "modes": 2, "dims": [2], "kind": "pure", "data": [[1, 0], [0, 0]]},
    {"schema_version": 1, "modes": 1, "dims": [2], "kind": "pure", "data": [[1, 0], [1, 0]]},
    {"schema_version": 1, "modes": 1, "dims": [2], "kind": "pure"},
    {"schema_version": 1, "modes": 1, "dims": [2], "kind": "pure", "data": [1, 0]},
    {"schema_version": 1, "modes": 1, "dims": [2], "kind": "density", "data": [[[0.5, 0], [0.5, 0]], [[0, 0], [0.5, 0]]]},
    {"schema_version": 1, "modes": 1, "dims": [2], "kind": "weird", "data": [[1, 0], [0, 0]]},
])
def test_invalid_state_records(tmp_path, record):
    path = tmp_path / "state.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    with pytest.raises(StateFileError):
        load_state(path)


def test_negative_density_rejected(tmp_path):
    path = tmp_path / "neg.json"
    data = [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]
    path.write_text(json.dumps({"schema_version": 1, "modes": 1, "dims": [2], "kind": "density", "data": data}))
    with pytest.raises(StateFileError):
        load_state(path)


# ── ScanResult ───────────────────────────────────────────────────────────────

def test_as_grid():
    np.testing.assert_array_equal(as_grid([1, 2], "x"), [1.0, 2.0])
    with pytest.raises(EmptyGrid):
        as_grid([], "x")
    with pytest.raises(EmptyGrid):
        as_grid([1.0, np.inf], "x")


def test_find_extremum_prefers_first_cell():
    axes = {"x": np.array([0.0, 1.0]), "y": np.array([5.0, 6.0])}
    values = np.array([[0.2, 0.9], [0.9, np.nan]])
    best = find_extremum(axes, values, "max")
    assert best == Extremum(0.9, {"x": 0.0, "y": 6.0}, "max")
    assert find_extremum(axes, values, "min").location == {"x": 0.0, "y": 5.0}


def test_find_extremum_all_missing():
    with pytest.raises(DegenerateScan):
        find_extremum({"x": np.array([1.0])}, np.array([np.nan]), "max")


def test_scan_result_invariants():
    axes = {"x": np.array([0.0, 1.0, 2.0])}
    values = np.array([0.1, np.nan, 0.3])
    result = ScanResult(axes, values, (find_extremum(axes, values, "max"),))
    assert result.missing_cells == 1
    assert result.meta["schema_version"] == 1
    record = result.to_dict()
    assert record["values"] == [0.1, None, 0.3]
    assert record["extremum"]["location"] == {"x": 2.0}
    with pytest.raises(ValueError):
        ScanResult(axes, values[:2], ())
    with pytest.raises(ValueError):
        ScanResult(axes, values, (Extremum(0.5, {"x": 1.0}, "max"),))


def test_grid_columns_are_row_major():
    axes = {"a": np.array([1.0, 2.0]), "b": np.array([10.0, 20.0, 30.0])}
    values = np.arange(6.0).reshape(2, 3)
    result = ScanResult(axes, values, ())
    cols = result.grid_columns()
    np.testing.assert_array_equal(cols["a"], [1, 1, 1, 2, 2, 2])
    np.testing.assert_array_equal(cols["b"], [10, 20, 30, 10, 20, 30])
