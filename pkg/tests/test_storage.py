"""Tests for configuration, JSON formats and the run ledger."""

import json

import numpy as np
import pytest

from src.errors import InvalidInput
from src.moebius import u11_map
from src.phases import PhaseSet, roots_of_unity
from src.storage import (
    Config,
    Database,
    ToolkitSettings,
    load_json_argument,
    moebius_to_json,
    parse_complex,
    parse_moebius,
    parse_phase_set,
    parse_system,
    phase_set_to_json,
    system_to_json,
)
from src.experiments import random_system


def test_settings_defaults():
    """Test default settings."""
    settings = ToolkitSettings(_env_file=None)
    assert settings.rank_tol == 1e-10
    assert settings.assignment_budget == 10**7
    assert settings.threads == 1
    assert not settings.enable_ledger


def test_settings_from_environment(monkeypatch):
    """Test environment overrides."""
    monkeypatch.setenv("THETAPR_THREADS", "4")
    monkeypatch.setenv("THETAPR_SEED", "17")
    settings = ToolkitSettings(_env_file=None)
    assert settings.threads == 4
    assert settings.seed == 17


def test_config_presets(config_dir):
    """Test preset loading."""
    config = Config(str(config_dir), ToolkitSettings(_env_file=None))
    assert config.phase_preset("cube_roots") == {"roots_of_unity": 3}
    assert config.phase_preset("missing") is None
    assert "signs" in config.list_phase_presets()
    assert config.default_trials("genericity", 5) == 200
    assert config.default_trials("unknown", 5) == 5


def test_config_without_presets(tmp_path):
    """Test a configuration directory with no presets file."""
    config = Config(str(tmp_path), ToolkitSettings(_env_file=None))
    assert config.list_phase_presets() == []


def test_engine_options_overrides(config_dir):
    """Test that None overrides keep the settings."""
    config = Config(str(config_dir), ToolkitSettings(_env_file=None))
    options = config.engine_options(threads=None, assignment_budget=50)
    assert options.threads == 1
    assert options.assignment_budget == 50
    with pytest.raises(InvalidInput):
        config.engine_options(threads=0)


def test_system_round_trip():
    """Test system serialization."""
    G = random_system(2, 3, 0)
    assert parse_system(json.loads(json.dumps(system_to_json(G)))) == G


def test_system_validation():
    """Test malformed system documents."""
    with pytest.raises(InvalidInput):
        parse_system({"d": 2, "vectors": [[[1, 0]]]})
    with pytest.raises(InvalidInput):
        parse_system({"d": 2, "vectors": []})
    with pytest.raises(InvalidInput):
        parse_system({"d": 1, "vectors": [[[1, 0]]], "extra": True})


def test_phase_set_forms():
    """Test every phase-set form."""
    assert parse_phase_set({"roots_of_unity": 4}) == roots_of_unity(4)
    degrees = parse_phase_set({"angles_degrees": [0, 90]})
    assert degrees[1] == pytest.approx(1j)
    radians = parse_phase_set({"angles_radians": [0.0, np.pi]})
    assert radians[1] == pytest.approx(-1)
    explicit = parse_phase_set({"phases": [[1, 0], [0, -1]]})
    assert explicit == PhaseSet((1, -1j))
    T = roots_of_unity(3)
    assert parse_phase_set(phase_set_to_json(T)) == T


def test_phase_set_validation():
    """Test malformed phase-set documents."""
    with pytest.raises(InvalidInput):
        parse_phase_set({"roots_of_unity": 3, "angles_degrees": [0]})
    with pytest.raises(InvalidInput):
        parse_phase_set({})
    with pytest.raises(InvalidInput):
        parse_phase_set({"phases": [[2, 0]]})


def test_moebius_round_trip():
    """Test Moebius map serialization."""
    M = u11_map(1.5 + 0.5j, 0.2 - 0.7j)
    M2 = parse_moebius(moebius_to_json(M))
    assert M2.circle_preserving
    assert np.array_equal(M.matrix, M2.matrix)
    with pytest.raises(InvalidInput):
        parse_moebius({"matrix": [[1, 0], [0, 0], [0, 0]]})


def test_parse_complex():
    """Test complex number parsing."""
    assert parse_complex("[1, 2]") == 1 + 2j
    assert parse_complex("1,2") == 1 + 2j
    assert parse_complex("1+2i") == 1 + 2j
    assert parse_complex("-i") == -1j
    with pytest.raises(InvalidInput):
        parse_complex("abc")
    with pytest.raises(InvalidInput):
        parse_complex("[1]")


def test_load_json_argument(tmp_path, config_dir):
    """Test inline JSON, files and presets."""
    assert load_json_argument('{"roots_of_unity": 2}') == {"roots_of_unity": 2}
    path = tmp_path / "phases.json"
    path.write_text('{"roots_of_unity": 5}')
    assert load_json_argument(str(path)) == {"roots_of_unity": 5}
    config = Config(str(config_dir), ToolkitSettings(_env_file=None))
    assert load_json_argument("signs", config.phase_preset) == {"roots_of_unity": 2}
    with pytest.raises(InvalidInput):
        load_json_argument("no_such_thing", config.phase_preset)
    with pytest.raises(InvalidInput):
        load_json_argument("{broken")


@pytest.mark.asyncio
async def test_database_decisions(tmp_path):
    """Test logging and listing decisions."""
    db = Database(str(tmp_path / "ledger" / "runs.db"))
    await db.initialize()
    await db.log_decision("check", 2, 4, 3, True, 81, 1.5, {"total_assignments": 81})
    await db.log_decision("check", 2, 3, 3, False, 5, 0.5)
    runs = await db.get_runs("decision")
    assert len(runs) == 2
    assert runs[0]["does_pr"] == 0
    assert runs[1]["metadata"] == {"total_assignments": 81}
    assert len(await db.get_runs("decision", limit=1)) == 1


@pytest.mark.asyncio
async def test_database_experiments(tmp_path):
    """Test logging and aggregating experiments."""
    db = Database(str(tmp_path / "runs.db"))
    await db.initialize()
    for study in ("threshold", "threshold", "genericity"):
        await db.log_experiment(study, 2, 3, 3, 10, 0, 0, 10, 0, True, 12.0)
    stats = await db.get_aggregated_stats("experiment")
    assert stats[0]["study"] == "threshold"
    assert stats[0]["total_runs"] == 2
    by_d = await db.get_aggregated_stats("experiment", "d")
    assert by_d[0]["total_runs"] == 3


@pytest.mark.asyncio
async def test_database_validation(tmp_path):
    """Test unknown kinds and grouping columns."""
    db = Database(str(tmp_path / "runs.db"))
    await db.initialize()
    with pytest.raises(InvalidInput):
        await db.get_runs("unknown")
    with pytest.raises(InvalidInput):
        await db.get_aggregated_stats("decision", "timestamp; DROP TABLE decision_runs")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
