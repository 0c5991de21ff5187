import dataclasses

import numpy as np
import pytest

from wallsense.coverage import GridSpec, coverage_report, evaluate_field
from wallsense.geometry import Point2D
from wallsense.placement import (
    PlacementError,
    PlacementObjective,
    candidate_positions,
    classify_topology,
    optimize_placement,
    sweep_to_csv,
    sweep_txrx_distance,
    sweep_wall_distance,
)
from wallsense.scenario import canonical_scenario


def coarse_scenario(resolution=0.1):
    base = canonical_scenario()
    return dataclasses.replace(base, grid=dataclasses.replace(base.grid, resolution_m=resolution))


class TestWallSweep:
    def test_trends_at_coarse_resolution(self):
        s = coarse_scenario(0.1)
        result = sweep_wall_distance(s, [0.1, 0.5, 1.0, 1.5, 2.0, 2.5])
        assert result.distances_m == (0.1, 0.5, 1.0, 1.5, 2.0, 2.5)
        indoor = result.indoor_area_m2
        # coverage grows toward the wall; the far tail is flat to within
        # raster noise at this resolution
        assert indoor[0] > indoor[1] > indoor[2] > indoor[3]
        leak = result.leakage_area_m2
        assert leak[0] > leak[1] >= leak[2]
        assert all(v >= 0 for v in leak)
        # spill vanishes once the coverage can no longer reach the wall
        assert leak[3] == leak[4] == leak[5] == 0.0

    def test_permutation_invariant(self):
        s = coarse_scenario(0.2)
        a = sweep_wall_distance(s, [1.5, 0.5])
        b = sweep_wall_distance(s, [0.5, 1.5])
        assert a == b

    def test_out_of_room_skipped(self):
        s = coarse_scenario(0.2)
        with pytest.warns(UserWarning, match="skipped"):
            result = sweep_wall_distance(s, [0.5, 5.0])  # 5 m pushes the rx out
        assert result.distances_m == (0.5,)
        assert result.skipped[0][0] == 5.0

    def test_matches_no_wall_baseline_far_from_wall(self):
        s = coarse_scenario(0.1)
        result = sweep_wall_distance(s, [2.5])
        s0 = dataclasses.replace(
            s,
            rf=dataclasses.replace(s.rf, wall_reflection=0.0),
            placement=s.with_placement(Point2D(2.5, 3.0), Point2D(5.5, 3.0)).placement,
        )
        r0 = coverage_report(s0, evaluate_field(s0), s0.threshold_db)
        assert result.indoor_area_m2[0] == pytest.approx(r0.indoor_area_m2, rel=0.05)


class TestTxRxSweep:
    def test_rise_then_fall(self):
        s = coarse_scenario(0.1).with_placement(Point2D(1.0, 3.0), Point2D(4.0, 3.0))
        result = sweep_txrx_distance(s, [0.1, 1.0, 2.0, 3.0, 4.0, 5.0])
        indoor = result.indoor_area_m2
        peak = indoor.index(max(indoor))
        assert 0 < peak < len(indoor) - 1
        assert all(a < b for a, b in zip(indoor[: peak + 1], indoor[1 : peak + 1]))
        assert all(a > b for a, b in zip(indoor[peak:], indoor[peak + 1 :]))

    def test_component_transition(self):
        s = coarse_scenario(0.05).with_placement(Point2D(1.0, 3.0), Point2D(4.0, 3.0))
        result = sweep_txrx_distance(s, [3.0, 5.0])
        assert result.component_count[0] == 1
        assert result.component_count[1] >= 2

    def test_near_wall_lobe_is_larger_when_split(self):
        # at 5 m separation the region around the near-wall device covers
        # at least as much as the far device's region
        s = coarse_scenario(0.05).with_placement(Point2D(1.0, 3.0), Point2D(6.0, 3.0))
        field = evaluate_field(s)
        r = coverage_report(s, field, s.threshold_db)
        from wallsense.coverage import fill_enclosed

        filled = fill_enclosed(r.mask)
        xs = field.grid.x_centers()
        mid = (1.0 + 6.0) / 2
        near = int(np.count_nonzero(filled[:, xs < mid]))
        far = int(np.count_nonzero(filled[:, xs >= mid]))
        assert near >= far

    def test_nonpositive_distance_skipped(self):
        s = coarse_scenario(0.2)
        result = sweep_txrx_distance(s, [-1.0, 1.0])
        assert result.distances_m == (1.0,)


class TestOptimize:
    def small(self):
        base = canonical_scenario()
        return dataclasses.replace(
            base, grid=dataclasses.replace(base.grid, resolution_m=0.25)
        )

    def test_zero_penalty_prefers_wall_proximity(self):
        # fine enough grid for the bounce boost to register
        s = coarse_scenario(0.1)
        objective = PlacementObjective(leakage_penalty=0.0, min_wall_clearance_m=1.0, step_m=1.5)
        result = optimize_placement(s, objective)
        assert result.feasible
        wall_dists = [
            s.room.signed_wall_distance(result.placement.tx),
            s.room.signed_wall_distance(result.placement.rx),
        ]
        assert min(wall_dists) <= 1.5

    def test_large_penalty_forces_zero_leakage(self):
        s = coarse_scenario(0.2)
        objective = PlacementObjective(leakage_penalty=1000.0, min_wall_clearance_m=0.1, step_m=1.5)
        result = optimize_placement(s, objective)
        assert result.feasible
        assert result.report.leakage_area_m2 == 0.0
        # the wall-hugging candidate has the largest indoor area but leaks
        # beyond the wall, so the penalty must have rejected it
        leaky = s.with_placement(Point2D(0.1, 3.1), Point2D(3.1, 3.1))
        leaky_report = coverage_report(leaky, evaluate_field(leaky), s.threshold_db)
        assert leaky_report.leakage_area_m2 > 0.0
        assert leaky_report.indoor_area_m2 > result.report.indoor_area_m2

    def test_dominance_over_reenumeration(self):
        s = self.small()
        objective = PlacementObjective(leakage_penalty=0.0, min_wall_clearance_m=1.4, step_m=1.5)
        result = optimize_placement(s, objective)
        cands = candidate_positions(s, objective)
        assert len(cands) >= 2
        for i in range(len(cands)):
            for j in range(len(cands)):
                if i == j:
                    continue
                r = coverage_report(
                    s.with_placement(cands[i], cands[j]),
                    evaluate_field(s.with_placement(cands[i], cands[j])),
                    s.threshold_db,
                )
                assert result.objective >= r.indoor_area_m2 - 1e-9

    def test_deterministic(self):
        s = self.small()
        objective = PlacementObjective(leakage_penalty=1.0, min_wall_clearance_m=1.4, step_m=1.5)
        a = optimize_placement(s, objective)
        b = optimize_placement(s, objective)
        assert a.placement == b.placement
        assert a.objective == b.objective

    def test_single_pair_grid(self):
        s = self.small()
        # clearance so tight only two candidates (one pair) survive
        objective = PlacementObjective(leakage_penalty=0.0, min_wall_clearance_m=2.95, step_m=1.0)
        cands = candidate_positions(s, objective)
        assert len(cands) == 2
        result = optimize_placement(s, objective)
        assert result.feasible
        assert result.candidates_evaluated == 1
        assert {(result.placement.tx.x, result.placement.tx.y),
                (result.placement.rx.x, result.placement.rx.y)} == {(c.x, c.y) for c in cands}

    def test_infeasible(self):
        s = self.small()
        objective = PlacementObjective(leakage_penalty=0.0, min_wall_clearance_m=3.5, step_m=1.0)
        result = optimize_placement(s, objective)
        assert not result.feasible
        assert result.placement is None

    def test_step_precondition(self):
        s = self.small()
        with pytest.raises(PlacementError):
            optimize_placement(s, PlacementObjective(step_m=2.0))

    def test_progress_callback(self):
        s = self.small()
        seen = []
        objective = PlacementObjective(leakage_penalty=0.0, min_wall_clearance_m=2.0, step_m=1.5)
        optimize_placement(s, objective, progress_cb=seen.append)
        assert seen and seen[-1] == pytest.approx(1.0)


class TestClassifyTopology:
    def test_labels(self):
        s = coarse_scenario(0.1)
        field = evaluate_field(s)
        single = coverage_report(s, field, s.threshold_db)
        assert classify_topology(single) == "single-region"
        empty = coverage_report(s, field, 1e6)
        assert classify_topology(empty) == "empty"
        split = dataclasses.replace(single, component_count=3)
        assert classify_topology(split) == "split"


class TestSweepCsv:
    def test_format(self, tmp_path):
        s = coarse_scenario(0.2)
        result = sweep_wall_distance(s, [0.5, 1.0])
        out = tmp_path / "sweep.csv"
        sweep_to_csv(result, out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "distance_m,indoor_area_m2,leakage_area_m2,component_count"
        assert len(lines) == 3
        assert lines[1].startswith("0.5,")


class TestNoWallTopology:
    def test_component_counts_without_wall(self):
        import dataclasses as dc

        base = canonical_scenario()
        s = dc.replace(
            base,
            rf=dc.replace(base.rf, wall_reflection=0.0),
            grid=dc.replace(base.grid, resolution_m=0.1),
        )
        # small separation: one oval
        small = s.with_placement(Point2D(2.0, 3.0), Point2D(3.0, 3.0))
        r = coverage_report(small, evaluate_field(small), s.threshold_db)
        assert r.component_count == 1
        # large separation: the coverage splits around the devices
        large = s.with_placement(Point2D(1.5, 3.0), Point2D(6.0, 3.0))
        r = coverage_report(large, evaluate_field(large), s.threshold_db)
        assert r.component_count >= 2
