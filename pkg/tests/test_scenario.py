import json
import math
from pathlib import Path

import pytest

from commodeq.equilibrium import ModelKind
from commodeq.errors import ConfigError
from commodeq.scenario import DEFAULT_OUTPUTS, load_scenario, parse_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _expect_error(data: dict, field: str) -> ConfigError:
    with pytest.raises(ConfigError) as info:
        parse_scenario(data)
    assert info.value.field == field
    return info.value


class TestParse:
    def test_minimal(self, scenario_dict: dict) -> None:
        scenario = parse_scenario(scenario_dict)
        assert scenario.model_kind is ModelKind.BROWNIAN
        assert scenario.market.gamma_p == 0.04
        assert scenario.outputs == DEFAULT_OUTPUTS
        assert scenario.sweep == ()
        point = scenario.grid()
        assert len(point) == 1 and math.isnan(point[0][0]) and point[0][1] is None

    def test_range_axis(self, scenario_dict: dict) -> None:
        scenario_dict["sweep"] = [{"parameter": "rho", "from": -0.5, "to": 0.5, "steps": 3}]
        scenario = parse_scenario(scenario_dict)
        assert scenario.sweep[0].values == pytest.approx((-0.5, 0.0, 0.5))
        assert scenario.grid() == [(-0.5, None), (0.0, None), (0.5, None)]

    def test_two_axes_first_slowest(self, scenario_dict: dict) -> None:
        scenario_dict["sweep"] = [
            {"parameter": "pi_t", "values": [60, 100]},
            {"parameter": "rho", "values": [0.0, 0.5]},
        ]
        scenario = parse_scenario(scenario_dict)
        assert scenario.grid() == [(60.0, 0.0), (60.0, 0.5), (100.0, 0.0), (100.0, 0.5)]
        params, model = scenario.point(scenario.overrides((60.0, 0.5)))
        assert params.pi_t == 60.0
        assert model.covariance[0][1] == pytest.approx(0.5 * 0.2 * 10.0)

    def test_outputs_keep_column_order(self, scenario_dict: dict) -> None:
        scenario_dict["outputs"] = ["yield", "alpha", "F"]
        assert parse_scenario(scenario_dict).outputs == ("alpha", "F", "yield")

    def test_legacy_hedge(self, scenario_dict: dict) -> None:
        scenario_dict["market"]["legacy_hedge"] = {"position": -10, "strike": 80}
        market = parse_scenario(scenario_dict).market
        assert (market.legacy_position, market.legacy_strike) == (-10.0, 80.0)

    def test_legacy_sweep(self, scenario_dict: dict) -> None:
        scenario_dict["market"]["legacy_hedge"] = {"position": -10, "strike": 80}
        scenario_dict["sweep"] = [
            {"parameter": "legacy_position", "values": [0, 20]},
            {"parameter": "rho", "values": [0.5]},
        ]
        scenario = parse_scenario(scenario_dict)
        params, model = scenario.point(scenario.overrides((20.0, 0.5)))
        assert (params.legacy_position, params.legacy_strike) == (20.0, 80.0)
        assert model.covariance[0][1] == pytest.approx(0.5 * 0.2 * 10.0)

    def test_legacy_strike_sweep_without_hedge(self, scenario_dict: dict) -> None:
        scenario_dict["sweep"] = [{"parameter": "legacy_strike", "values": [60, 70]}]
        scenario = parse_scenario(scenario_dict)
        params, _ = scenario.point(scenario.overrides((70.0, None)))
        assert (params.legacy_position, params.legacy_strike) == (0.0, 70.0)

    def test_jump_diffusion(self, scenario_dict: dict) -> None:
        scenario_dict["model"] = {
            "kind": "jump_diffusion",
            "horizon": 0.25,
            "sigma1": 0.2,
            "sigma2": 10,
            "rho": 0.0,
            "drift1": 0.06,
            "eta2": -3,
            "intensity": 1,
        }
        scenario = parse_scenario(scenario_dict)
        assert scenario.model().has_active_jumps
        assert scenario.model(intensity=0.0).has_jumps is False


class TestErrors:
    def test_unknown_top_level(self, scenario_dict: dict) -> None:
        scenario_dict["colour"] = "red"
        _expect_error(scenario_dict, "colour")

    def test_missing_market_field(self, scenario_dict: dict) -> None:
        del scenario_dict["market"]["mu"]
        _expect_error(scenario_dict, "market.mu")

    def test_invalid_market(self, scenario_dict: dict) -> None:
        scenario_dict["market"]["eps"] = 1.5
        _expect_error(scenario_dict, "market")

    def test_not_a_number(self, scenario_dict: dict) -> None:
        scenario_dict["market"]["m"] = "one"
        _expect_error(scenario_dict, "market.m")
        scenario_dict["market"]["m"] = True
        _expect_error(scenario_dict, "market.m")

    def test_unknown_kind(self, scenario_dict: dict) -> None:
        scenario_dict["model"]["kind"] = "heston"
        err = _expect_error(scenario_dict, "model.kind")
        assert "brownian" in str(err)

    def test_field_of_other_kind(self, scenario_dict: dict) -> None:
        scenario_dict["model"]["eta2"] = 1.0
        _expect_error(scenario_dict, "model.eta2")

    def test_invalid_model(self, scenario_dict: dict) -> None:
        scenario_dict["model"]["rho"] = 2.0
        _expect_error(scenario_dict, "model")

    @pytest.mark.parametrize(
        "axis, field",
        [
            ({"parameter": "kappa", "values": [1]}, "sweep[0].parameter"),
            ({"parameter": "rho", "values": []}, "sweep[0].values"),
            ({"parameter": "rho", "values": [0.1], "steps": 3}, "sweep[0]"),
            ({"parameter": "rho", "from": 0, "to": 1}, "sweep[0].steps"),
            ({"parameter": "rho", "from": 0, "to": 1, "steps": 1}, "sweep[0].steps"),
            ({"parameter": "rho", "from": 0, "to": 1, "steps": 2.5}, "sweep[0].steps"),
            ({"parameter": "rho", "values": [0.1, "x"]}, "sweep[0].values[1]"),
        ],
    )
    def test_bad_axis(self, scenario_dict: dict, axis: dict, field: str) -> None:
        scenario_dict["sweep"] = [axis]
        _expect_error(scenario_dict, field)

    def test_too_many_axes(self, scenario_dict: dict) -> None:
        axis = {"parameter": "rho", "values": [0.0]}
        scenario_dict["sweep"] = [axis, dict(axis, parameter="mu"), dict(axis, parameter="m")]
        _expect_error(scenario_dict, "sweep")

    def test_same_parameter_twice(self, scenario_dict: dict) -> None:
        axis = {"parameter": "rho", "values": [0.0]}
        scenario_dict["sweep"] = [axis, axis]
        _expect_error(scenario_dict, "sweep[1].parameter")

    def test_unknown_output(self, scenario_dict: dict) -> None:
        scenario_dict["outputs"] = ["alpha", "gamma"]
        _expect_error(scenario_dict, "outputs[1]")

    def test_flag_type(self, scenario_dict: dict) -> None:
        scenario_dict["svg"] = "yes"
        _expect_error(scenario_dict, "svg")

    def test_not_an_object(self) -> None:
        with pytest.raises(ConfigError):
            parse_scenario([1, 2])


class TestLoad:
    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            load_scenario(path)
        assert "line 1" in str(info.value)

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(OSError):
            load_scenario(tmp_path / "missing.json")

    @pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
    def test_shipped_scenarios(self, path: Path) -> None:
        scenario = load_scenario(path)
        assert scenario.grid()
        for point in scenario.grid():
            scenario.point(scenario.overrides(point))

    def test_round_trip_through_file(self, tmp_path: Path, scenario_dict: dict) -> None:
        path = tmp_path / "s.json"
        path.write_text(json.dumps(scenario_dict), encoding="utf-8")
        assert load_scenario(path) == parse_scenario(scenario_dict)
