import dataclasses

import pytest

from dtasim import (
    ATTRIBUTES,
    RangeSpec,
    Scenario,
    ScenarioError,
    TraceModel,
    TrafficKind,
    ValidationError,
    default_scenario_path,
    parse_scenario,
    scenario_from_dict,
)

from conftest import make_class

# frozen: sha256 of the bundled scenario's canonical JSON serialization
DEFAULT_FINGERPRINT = "3f713b9ae78e824cbc662590253835828a94b2b1cfc739f8fe617de5d3742810"


def minimal_dict(**overrides):
    data = {
        "format_version": 1,
        "pool_total": 20.0,
        "epochs": 10,
        "seed": 7,
        "trace_model": "constant",
        "ranges": {
            "bandwidth": {"min": 5.0, "max": 15.0, "count": 3},
            "latency": {"min": 10.0, "max": 100.0, "count": 3},
            "jitter": {"min": 0.1, "max": 10.0, "count": 3},
            "packet_loss": {"min": 0.0, "max": 0.05, "count": 3},
            "demand": {"min": 5.0, "max": 15.0, "count": 3},
        },
        "classes": [
            {
                "id": 0,
                "name": "voice",
                "kind": "voip",
                "priority": 0.6,
                "demanded_bandwidth": 5.0,
                "latency_sensitivity": 3.0,
                "max_latency": 50.0,
                "max_jitter": 5.0,
                "max_packet_loss": 0.05,
            },
            {
                "id": 1,
                "name": "bulk",
                "kind": "filedownload",
                "priority": 0.4,
                "demanded_bandwidth": 5.0,
                "latency_sensitivity": 1.0,
                "max_latency": 200.0,
                "max_jitter": 20.0,
                "max_packet_loss": 0.2,
            },
        ],
        "initial_load": [0.5, 0.5],
    }
    data.update(overrides)
    return data


class TestRangeSpec:
    def test_midpoint(self):
        assert RangeSpec(10.0, 100.0, 5).midpoint == 55.0

    def test_grid_endpoints_and_spacing(self):
        grid = RangeSpec(0.0, 1.0, 5).grid()
        assert grid == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
        assert grid[0] == 0.0 and grid[-1] == 1.0

    def test_grid_single_point(self):
        assert RangeSpec(3.0, 9.0, 1).grid() == [3.0]

    def test_degenerate_interval(self):
        assert RangeSpec(2.0, 2.0, 4).grid() == [2.0] * 4

    def test_min_above_max_rejected(self):
        with pytest.raises(ValidationError, match="exceeds max"):
            RangeSpec(5.0, 1.0, 3)

    def test_zero_count_rejected(self):
        with pytest.raises(ValidationError, match="count"):
            RangeSpec(0.0, 1.0, 0)


class TestScenarioValidation:
    def base_kwargs(self):
        scn = scenario_from_dict(minimal_dict())
        return {f.name: getattr(scn, f.name) for f in dataclasses.fields(scn)}

    def test_noncontiguous_ids(self):
        kwargs = self.base_kwargs()
        kwargs["classes"] = (make_class(id=0), make_class(id=2))
        with pytest.raises(ValidationError, match="contiguous"):
            Scenario(**kwargs)

    def test_duplicate_ids(self):
        kwargs = self.base_kwargs()
        kwargs["classes"] = (make_class(id=0), make_class(id=0))
        with pytest.raises(ValidationError, match="contiguous"):
            Scenario(**kwargs)

    def test_seed_must_fit_64_bits(self):
        with pytest.raises(ValidationError, match="64-bit"):
            scenario_from_dict(minimal_dict(seed=2**64))

    def test_walk_step_fraction_bounds(self):
        for bad in (0.0, 1.5, -0.1):
            with pytest.raises(ValidationError, match="walk_step_fraction"):
                scenario_from_dict(minimal_dict(walk_step_fraction=bad))
        scn = scenario_from_dict(minimal_dict(walk_step_fraction=1.0))
        assert scn.walk_step_fraction == 1.0

    def test_missing_range_attribute(self):
        data = minimal_dict()
        del data["ranges"]["jitter"]
        with pytest.raises(ValidationError, match="jitter"):
            scenario_from_dict(data)

    def test_latency_range_must_be_positive(self):
        data = minimal_dict()
        data["ranges"]["latency"] = {"min": 0.0, "max": 10.0, "count": 3}
        with pytest.raises(ValidationError, match="latency range min"):
            scenario_from_dict(data)

    def test_packet_loss_capped_at_one(self):
        data = minimal_dict()
        data["ranges"]["packet_loss"] = {"min": 0.0, "max": 1.5, "count": 3}
        with pytest.raises(ValidationError, match="packet_loss range max"):
            scenario_from_dict(data)

    def test_bandwidth_min_zero_allowed(self):
        data = minimal_dict()
        data["ranges"]["bandwidth"] = {"min": 0.0, "max": 10.0, "count": 3}
        assert scenario_from_dict(data).ranges["bandwidth"].min == 0.0

    def test_initial_load_length(self):
        with pytest.raises(ValidationError, match="initial_load"):
            scenario_from_dict(minimal_dict(initial_load=[0.5]))

    def test_initial_load_bounds(self):
        with pytest.raises(ValidationError, match=r"initial_load\[1\]"):
            scenario_from_dict(minimal_dict(initial_load=[0.5, 1.0]))

    def test_initial_load_defaults_to_zero(self):
        data = minimal_dict()
        del data["initial_load"]
        assert scenario_from_dict(data).initial_load == (0.0, 0.0)


class TestScenarioFromDict:
    def test_roundtrip(self):
        scn = scenario_from_dict(minimal_dict())
        again = scenario_from_dict(scn.to_dict())
        assert again == scn
        assert again.fingerprint() == scn.fingerprint()

    def test_unknown_top_level_key(self):
        with pytest.raises(ScenarioError, match="unknown keys.*'pool'"):
            scenario_from_dict(minimal_dict(pool=99))

    def test_unknown_class_key(self):
        data = minimal_dict()
        data["classes"][0]["weight"] = 2.0
        with pytest.raises(ScenarioError, match=r"classes\[0\].*'weight'"):
            scenario_from_dict(data)

    def test_unknown_range_key(self):
        data = minimal_dict()
        data["ranges"]["latency"]["step"] = 1.0
        with pytest.raises(ScenarioError, match="ranges.latency"):
            scenario_from_dict(data)

    def test_wrong_format_version(self):
        with pytest.raises(ScenarioError, match="format_version"):
            scenario_from_dict(minimal_dict(format_version=2))

    def test_missing_required_key(self):
        data = minimal_dict()
        del data["pool_total"]
        with pytest.raises(ScenarioError, match="pool_total"):
            scenario_from_dict(data)

    def test_bad_trace_model(self):
        with pytest.raises(ScenarioError, match="trace_model must be one of"):
            scenario_from_dict(minimal_dict(trace_model="lognormal"))

    def test_bad_kind(self):
        data = minimal_dict()
        data["classes"][0]["kind"] = "gaming"
        with pytest.raises(ScenarioError, match="kind must be one of"):
            scenario_from_dict(data)

    def test_boolean_is_not_a_number(self):
        with pytest.raises(ScenarioError, match="pool_total"):
            scenario_from_dict(minimal_dict(pool_total=True))

    def test_float_epochs_rejected(self):
        with pytest.raises(ScenarioError, match="epochs"):
            scenario_from_dict(minimal_dict(epochs=10.0))

    def test_classes_sorted_by_id(self):
        data = minimal_dict()
        data["classes"] = [data["classes"][1], data["classes"][0]]
        scn = scenario_from_dict(data)
        assert [cls.id for cls in scn.classes] == [0, 1]
        assert scn.classes[0].name == "voice"

    def test_not_a_mapping(self):
        with pytest.raises(ScenarioError, match="mapping"):
            scenario_from_dict([1, 2, 3])


class TestParseScenario:
    def test_parse_file_roundtrip(self, tmp_path):
        import yaml

        path = tmp_path / "case.scenario"
        path.write_text(yaml.safe_dump(minimal_dict()), encoding="utf-8")
        scn = parse_scenario(path)
        assert scn.pool_total == 20.0
        assert scn.trace_model is TraceModel.CONSTANT
        assert scn.classes[1].kind is TrafficKind.FILE_DOWNLOAD

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            parse_scenario(tmp_path / "nope.scenario")

    def test_yaml_error_reports_location(self, tmp_path):
        path = tmp_path / "broken.scenario"
        path.write_text("pool_total: [unterminated\nepochs: 5\n", encoding="utf-8")
        with pytest.raises(ScenarioError, match="line"):
            parse_scenario(path)

    def test_validation_error_names_file(self, tmp_path):
        import yaml

        path = tmp_path / "bad.scenario"
        path.write_text(
            yaml.safe_dump(minimal_dict(initial_load=[0.5])), encoding="utf-8"
        )
        with pytest.raises(ScenarioError, match="bad.scenario"):
            parse_scenario(path)


class TestDefaultScenario:
    def test_fingerprint_frozen(self, default_scenario):
        assert default_scenario.fingerprint() == DEFAULT_FINGERPRINT

    def test_shape(self, default_scenario):
        scn = default_scenario
        assert scn.pool_total == 50.0
        assert scn.epochs == 200
        assert scn.seed == 42
        assert scn.n_classes == 4
        assert scn.trace_model is TraceModel.UNIFORM_SAMPLE
        assert [cls.priority for cls in scn.classes] == [0.4, 0.3, 0.2, 0.1]
        assert all(cls.demanded_bandwidth == 10.0 for cls in scn.classes)
        assert all(cls.max_latency == 50.0 for cls in scn.classes)
        assert all(cls.max_jitter == 5.0 for cls in scn.classes)
        assert all(cls.max_packet_loss == 0.05 for cls in scn.classes)
        assert scn.ranges["bandwidth"].min == 5.0
        assert scn.ranges["bandwidth"].max == 15.0
        assert scn.ranges["packet_loss"].max == 0.05
        assert scn.initial_load == (0.5,) * 4

    def test_path_exists(self):
        assert default_scenario_path().is_file()

    def test_attribute_order_is_fixed(self):
        assert ATTRIBUTES == ("bandwidth", "latency", "jitter", "packet_loss", "demand")
