import dataclasses
import hashlib
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wallsense.scenario import (
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    canonical_scenario,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)

BUNDLED = Path(__file__).resolve().parents[1] / "scenarios" / "canonical.json"


class TestCanonical:
    def test_bundled_file_matches_defaults(self):
        s = load_scenario(BUNDLED)
        assert s.placement.separation == pytest.approx(3.0, rel=1e-12)
        assert s.wall_tx_distance() == pytest.approx(0.5, rel=1e-12)
        assert s.threshold_db == 2.0
        assert s.model == "simplified"
        assert s.rf.wall_reflection == 0.3

    def test_builder_equals_bundle(self):
        assert scenario_to_dict(canonical_scenario()) == scenario_to_dict(load_scenario(BUNDLED))


class TestValidation:
    def base(self):
        return scenario_to_dict(canonical_scenario())

    def test_tx_equals_rx_names_placement(self):
        d = self.base()
        d["placement"]["rx_m"] = d["placement"]["tx_m"]
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert err.value.field_path == "placement"

    def test_unknown_top_level_field(self):
        d = self.base()
        d["frobnicate"] = 1
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert "frobnicate" in str(err.value)

    def test_unknown_nested_field(self):
        d = self.base()
        d["rf"]["bogus"] = 2.0
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert err.value.field_path == "rf.bogus"

    def test_missing_field_reports_path(self):
        d = self.base()
        del d["grid"]["resolution_m"]
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert err.value.field_path == "grid.resolution_m"

    def test_bad_number_reports_path(self):
        d = self.base()
        d["rf"]["wavelength_m"] = "sixty-millimetres"
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert err.value.field_path == "rf.wavelength_m"

    def test_device_outside_room(self):
        d = self.base()
        d["placement"]["tx_m"] = [-1.0, 3.0]
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert err.value.field_path == "placement"

    def test_wrong_schema_version(self):
        d = self.base()
        d["schema_version"] = 99
        with pytest.raises(ScenarioValidationError):
            scenario_from_dict(d)

    def test_bad_reflection_coefficient(self):
        d = self.base()
        d["rf"]["wall_reflection"] = 1.2
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert err.value.field_path == "rf"

    def test_parse_error_distinct(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioParseError):
            load_scenario(path)

    def test_self_intersecting_room(self):
        d = self.base()
        d["room"]["corners_m"] = [[0, 0], [4, 4], [4, 0], [0, 4]]
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_dict(d)
        assert err.value.field_path == "room"


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        s = canonical_scenario()
        path = tmp_path / "s.json"
        save_scenario(s, path)
        assert scenario_to_dict(load_scenario(path)) == scenario_to_dict(s)

    def test_save_is_deterministic(self, tmp_path):
        s = canonical_scenario()
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_scenario(s, p1)
        save_scenario(s, p2)
        h1 = hashlib.sha256(p1.read_bytes()).hexdigest()
        h2 = hashlib.sha256(p2.read_bytes()).hexdigest()
        assert h1 == h2

    def test_modified_field_survives_roundtrip(self, tmp_path):
        s = dataclasses.replace(canonical_scenario(), threshold_db=3.25)
        path = tmp_path / "s.json"
        save_scenario(s, path)
        back = load_scenario(path)
        assert back.threshold_db == 3.25
        assert scenario_to_dict(back) == scenario_to_dict(s)

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(min_value=0.15, max_value=3.0),
        st.floats(min_value=0.5, max_value=6.0),
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=-10, max_value=10),
        st.floats(min_value=0.02, max_value=0.3),
    )
    def test_random_scenarios_roundtrip_exactly(self, wall_d, sep, refl, thr, res):
        base = canonical_scenario()
        s = dataclasses.replace(
            base,
            placement=base.with_placement(
                dataclasses.replace(base.placement.tx, x=wall_d),
                dataclasses.replace(base.placement.rx, x=min(6.9, wall_d + sep)),
            ).placement,
            rf=dataclasses.replace(base.rf, wall_reflection=refl),
            threshold_db=thr,
            grid=dataclasses.replace(base.grid, resolution_m=res),
        )
        # exact float round-trip through shortest-repr JSON text
        text = json.dumps(scenario_to_dict(s))
        back = scenario_from_dict(json.loads(text))
        assert scenario_to_dict(back) == scenario_to_dict(s)


class TestCli:
    def test_field_and_boundary_commands(self, tmp_path):
        from wallsense.cli import main

        scen = tmp_path / "s.json"
        s = canonical_scenario()
        s = dataclasses.replace(s, grid=dataclasses.replace(s.grid, resolution_m=0.25))
        save_scenario(s, scen)
        out = tmp_path / "field.csv"
        rc = main(["field", "--scenario", str(scen), "--out", str(out)])
        assert rc == 0
        assert out.exists()
        assert out.with_suffix(".pgm").exists()
        assert (tmp_path / "field.pgm.range.txt").exists()

        bout = tmp_path / "boundary.csv"
        rc = main(["boundary", "--scenario", str(scen), "--out", str(bout)])
        assert rc == 0
        assert bout.read_text().startswith("contour_index,")

    def test_validation_error_exit_code(self, tmp_path):
        from wallsense.cli import main

        bad = tmp_path / "bad.json"
        data = scenario_to_dict(canonical_scenario())
        data["placement"]["rx_m"] = data["placement"]["tx_m"]
        bad.write_text(json.dumps(data))
        rc = main(["field", "--scenario", str(bad), "--out", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_sweep_command(self, tmp_path):
        from wallsense.cli import main

        out = tmp_path / "sweep.csv"
        rc = main(
            ["sweep", "wall", "--resolution", "0.25", "--distances", "0.5,1.5", "--out", str(out)]
        )
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 3

    def test_respire_and_fit_commands(self, tmp_path):
        import numpy as np

        from wallsense.cli import main
        from wallsense.csiproc import save_trace_csv, synthesize_breathing_trace

        trace = tmp_path / "trace.csv"
        save_trace_csv(
            synthesize_breathing_trace(40.0, 200.0, 15.0, noise_sigma=0.05,
                                       rng=np.random.default_rng(2)),
            trace,
        )
        rc = main([
            "respire", "--trace", str(trace), "--window-s", "40",
            "--sg-window", "101", "--hampel-half-window", "10",
            "--truth-bpm", "15", "--out", str(tmp_path / "est.csv"),
        ])
        assert rc == 0
        assert (tmp_path / "est.csv").read_text().startswith("window_s,")

        pairs = tmp_path / "pairs.csv"
        pairs.write_text("measured,simulated\n2.0,1.0\n4.0,2.0\n")
        rc = main(["ssnr-fit", "--pairs", str(pairs), "--out", str(tmp_path / "fit.json")])
        assert rc == 0
        fit = json.loads((tmp_path / "fit.json").read_text())
        assert fit["scale"] == pytest.approx(2.0, rel=1e-12)
