#  -*- coding: utf-8 -*-

"""
    The script 'test_tools' checks the reading of configurations, scenario lists and matrices, and runs one scenario of
    the divisibility experiment from a scenario list written in CSV.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import json

import numpy as np
import pandas as pd
import pytest

from freediv import parameters as param
from freediv.tool import tools
from freediv.tool.running_scenarios import run_one_scenario, run_multiple_scenarios


########################################################################################################################
# READING INSTRUCTIONS
########################################################################################################################

def test_nested_dictionaries_from_column_names():
    dic = tools.buildDic({"a:b:c": 1, "a:b:d": 2, "e": "x", "f": np.nan, "g:0": [1, 2]})
    assert dic == {"a": {"b": {"c": 1, "d": 2}}, "e": "x", "g": {0: [1, 2]}}


def test_reading_a_scenario_list_written_in_csv(tmp_path):
    path = tmp_path / "scenarios_list.csv"
    scenarios_df = pd.DataFrame({"Scenario": [1, 2],
                                 "p": [2, np.nan],
                                 "row_sizes": ["[4, 16]", "[8]"],
                                 "target:type": ["semicircular", "semicircular"],
                                 "target:variance": [0.5, 2.]})
    scenarios_df.to_csv(path, na_rep='NA', index=False)
    scenarios = tools.read_scenarios(str(path))
    assert sorted(scenarios) == [1, 2]
    assert scenarios[1]["p"] == 2 and isinstance(scenarios[1]["p"], int)
    assert "p" not in scenarios[2]
    assert scenarios[1]["row_sizes"] == [4, 16]
    assert scenarios[2]["target"] == {"type": "semicircular", "variance": 2.}


def test_reading_a_scenario_list_written_in_json(tmp_path):
    path = tmp_path / "scenarios_list.json"
    with open(path, "w") as f:
        json.dump([{"p": 3}, {"Scenario": 7, "p": 2}], f)
    scenarios = tools.read_scenarios(str(path))
    assert scenarios == {1: {"p": 3}, 7: {"p": 2}}
    with pytest.raises(ValueError):
        tools.read_scenarios(str(tmp_path / "scenarios_list.xlsx"))


def test_reading_matrices():
    np.testing.assert_array_equal(tools.read_matrix(2., dim=2), 2. * np.eye(2))
    np.testing.assert_array_equal(tools.read_matrix([[1., 0.], [0., -1.]]), np.diag([1., -1.]))
    np.testing.assert_array_equal(tools.read_matrix([[[0., 1.], [1., 0.]], [[1., 0.], [0., -1.]]]),
                                  np.array([[1j, 1.], [1., -1j]]))
    np.testing.assert_array_equal(tools.read_matrix({"dim": 1, "entries": [[[0.5, 2.]]]}), [[0.5 + 2j]])
    with pytest.raises(ValueError):
        tools.read_matrix(1.)
    with pytest.raises(ValueError):
        tools.read_matrix([[1., 0.]])
    with pytest.raises(ValueError):
        tools.read_matrix(np.eye(3).tolist(), dim=2)


def test_configuration_files(tmp_path):
    (tmp_path / "config.toml").write_text('dim = 2\n[target]\ntype = "semicircular"\nvariance = 0.5\n')
    assert tools.read_config(str(tmp_path / "config.toml")) == {"dim": 2, "target": {"type": "semicircular",
                                                                                      "variance": 0.5}}
    tools.write_json({"b": np.float64(1.5), "a": np.arange(2), "z": 1j}, str(tmp_path / "config.json"))
    assert tools.read_config(str(tmp_path / "config.json")) == {"a": [0, 1], "b": 1.5, "z": [0., 1.]}
    with pytest.raises(ValueError):
        tools.read_config(str(tmp_path / "config.yaml"))


def test_updated_parameters():
    updated = tools.update_parameters({"tail_order": 5, "not_a_parameter": 1})
    assert updated["tail_order"] == 5
    assert updated["fixed_point_tol"] == param.fixed_point_tol
    assert "not_a_parameter" not in updated


########################################################################################################################
# RUNNING SCENARIOS
########################################################################################################################

def test_running_one_scenario(tmp_path):
    inputs = tmp_path / "inputs"
    inputs.mkdir()
    scenarios_df = pd.DataFrame({"Scenario": [1, 2],
                                 "dim": [2, 2],
                                 "order": [4, 4],
                                 "p": [2, 2],
                                 "probe_count": [2, 2],
                                 "row_sizes": ["[4, 16]", "[4, 16]"],
                                 "target:type": ["semicircular", "point_mass"],
                                 "target:variance": [0.5, np.nan]})
    scenarios_df.to_csv(inputs / "scenarios_list.csv", na_rep='NA', index=False)
    outputs = tmp_path / "outputs"
    verdict = run_one_scenario(1, inputs_dir_path=str(inputs), outputs_dir_path=str(outputs))
    assert verdict == "PASS"
    scenario_dir = outputs / "Scenario_0001"
    summary = pd.read_csv(scenario_dir / "summary.csv")
    assert list(summary["subset_size"]) == [2, 8]
    assert (scenario_dir / "updated_parameters.json").exists()
    with open(scenario_dir / "metadata.json") as f:
        assert json.load(f)["verdict"] == "PASS"
    assert param.dim == 2 and param.tail_order == 8
    # The point mass misses its matrix 'b':
    assert run_one_scenario(2, inputs_dir_path=str(inputs), outputs_dir_path=str(outputs)) == "ERROR"


def test_running_scenarios_in_parallel(tmp_path):
    inputs = tmp_path / "inputs"
    inputs.mkdir()
    # The first scenario asks for a pool of its own, from inside a worker of the pool of scenarios:
    scenarios_df = pd.DataFrame({"Scenario": [1, 2],
                                 "dim": [2, 2],
                                 "order": [4, 4],
                                 "p": [2, 2],
                                 "jobs": [2, 1],
                                 "probe_count": [2, 2],
                                 "row_sizes": ["[4, 16]", "[8, 32]"],
                                 "target:type": ["semicircular", "semicircular"],
                                 "target:variance": [0.5, 0.5]})
    scenarios_df.to_csv(inputs / "scenarios_list.csv", na_rep='NA', index=False)
    outputs = tmp_path / "outputs"
    verdicts = run_multiple_scenarios(input_path=str(inputs), output_path=str(outputs), num_processes=2)
    assert verdicts == {1: "PASS", 2: "PASS"}
    for scenario_id in [1, 2]:
        with open(outputs / ("Scenario_%.4d" % scenario_id) / "metadata.json") as f:
            assert json.load(f)["verdict"] == "PASS"
