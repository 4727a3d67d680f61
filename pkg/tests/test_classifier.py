"""Dataset generation, threshold classification, metrics, and the sweep."""

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoptics import circuit, classifier, fock, shots, smo


def constant_probability_spec(p_half: bool = False):
    """Parameter-free circuit with outcome probability 1 (or 1/2)."""
    sector = fock.sector_basis(2, 2)
    if p_half:
        return circuit.CircuitSpec(
            modes=2, photons=2, elements=[circuit.Beamsplitter((0, 1))],
            input_state=fock.basis_state(sector, (1, 1)),
            outcome=(2, 0), param_count=0,
        )
    return circuit.CircuitSpec(
        modes=2, photons=2, elements=[],
        input_state=fock.basis_state(sector, (1, 1)),
        outcome=(1, 1), param_count=0,
    )


class TestCircleRule:
    def test_center_is_inside(self):
        assert classifier.CircleRule()((0.0, 0.0)) == 1

    def test_corner_is_outside(self):
        assert classifier.CircleRule()((1.0, 1.0)) == 0

    def test_boundary_counts_as_inside(self):
        rule = classifier.CircleRule()
        assert rule((rule.radius, 0.0)) == 1

    def test_custom_center(self):
        rule = classifier.CircleRule(center=(0.5, 0.5), radius=0.2)
        assert rule((0.5, 0.6)) == 1
        assert rule((0.0, 0.0)) == 0


class TestGenerateDataset:
    def test_count_and_ranges(self):
        ds = classifier.generate_dataset(classifier.CircleRule(), 300, (201, 0))
        assert len(ds) == 300
        feats = ds.features()
        assert feats.shape == (300, 2)
        assert np.all(feats >= -1) and np.all(feats <= 1)
        assert set(np.unique(ds.labels())) <= {0, 1}

    def test_labels_match_rule(self):
        rule = classifier.CircleRule()
        ds = classifier.generate_dataset(rule, 64, 5)
        for point in ds.points:
            assert point.label == rule(point.features)

    def test_deterministic_per_seed(self):
        a = classifier.generate_dataset(classifier.CircleRule(), 32, (201, 3))
        b = classifier.generate_dataset(classifier.CircleRule(), 32, (201, 3))
        assert a.points == b.points

    def test_different_seeds_differ(self):
        a = classifier.generate_dataset(classifier.CircleRule(), 32, (201, 3))
        b = classifier.generate_dataset(classifier.CircleRule(), 32, (201, 4))
        assert a.points != b.points

    def test_prefix_nesting(self):
        # the same seed with a larger count extends the smaller dataset
        small = classifier.generate_dataset(classifier.CircleRule(), 20, (201, 1))
        large = classifier.generate_dataset(classifier.CircleRule(), 50, (201, 1))
        assert large.points[:20] == small.points

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            classifier.generate_dataset(classifier.CircleRule(), 0, 0)


class TestClassify:
    def test_certain_probability_is_class_one(self):
        spec = constant_probability_spec()
        assert classifier.classify_point(spec, np.zeros(0), [0.0, 0.0], 0.9) == 1

    def test_zero_probability_is_class_zero(self):
        sector = fock.sector_basis(2, 2)
        spec = circuit.CircuitSpec(
            modes=2, photons=2, elements=[],
            input_state=fock.basis_state(sector, (2, 0)),
            outcome=(1, 1), param_count=0,
        )
        assert classifier.classify_point(spec, np.zeros(0), [0.0, 0.0], 0.1) == 0

    def test_tie_goes_to_class_one(self):
        # pin the threshold to the probability the circuit actually returns
        # (0.5 up to rounding) so the >= comparison is exercised at equality
        spec = constant_probability_spec(p_half=True)
        p = circuit.evaluate(spec, np.zeros(0), [0.0, 0.0])
        assert classifier.classify_point(spec, np.zeros(0), [0.0, 0.0], p) == 1
        above = float(np.nextafter(p, 1.0))
        assert classifier.classify_point(spec, np.zeros(0), [0.0, 0.0], above) == 0

    def test_batch_matches_scalar(self, rng):
        spec = circuit.default_reuploading_circuit()
        params = rng.uniform(-np.pi, np.pi, 6)
        xs = rng.uniform(-1, 1, (20, 2))
        batch = classifier.classify_batch(spec, params, xs, 0.4)
        singles = [classifier.classify_point(spec, params, x, 0.4) for x in xs]
        np.testing.assert_array_equal(batch, singles)

    def test_classification_is_shot_free(self, rng):
        spec = circuit.default_reuploading_circuit()
        params = rng.uniform(-np.pi, np.pi, 6)
        xs = rng.uniform(-1, 1, (10, 2))
        a = classifier.classify_batch(spec, params, xs)
        np.random.seed(99)  # global RNG state must be irrelevant
        b = classifier.classify_batch(spec, params, xs)
        np.testing.assert_array_equal(a, b)


class TestMetrics:
    def test_known_confusion_table(self):
        pred = [1] * 40 + [0] * 10 + [0] * 30 + [1] * 20
        lab = [1] * 50 + [0] * 50
        m = classifier.compute_metrics(pred, lab)
        assert (m.tp, m.fn, m.tn, m.fp) == (40, 10, 30, 20)
        assert m.tpr == pytest.approx(0.8)
        assert m.tnr == pytest.approx(0.6)
        assert m.p == pytest.approx(0.7)

    def test_perfect_predictions(self):
        m = classifier.compute_metrics([1, 0, 1, 0], [1, 0, 1, 0])
        assert m.p == 1.0

    def test_all_zero_on_balanced(self):
        m = classifier.compute_metrics([0, 0, 0, 0], [1, 1, 0, 0])
        assert m.tpr == 0.0 and m.tnr == 1.0
        assert m.p == 0.5

    def test_single_class_labels_warn_and_fall_back(self):
        with pytest.warns(UserWarning, match="undefined"):
            m = classifier.compute_metrics([1, 0, 1], [1, 1, 1])
        assert np.isnan(m.tnr)
        assert m.p == pytest.approx(m.tpr)

    def test_validation(self):
        with pytest.raises(ValueError):
            classifier.compute_metrics([1, 0], [1])
        with pytest.raises(ValueError):
            classifier.compute_metrics([2, 0], [1, 0])
        with pytest.raises(ValueError):
            classifier.compute_metrics([], [])

    @given(
        pred=st.lists(st.integers(0, 1), min_size=1, max_size=60),
        lab_bits=st.lists(st.integers(0, 1), min_size=60, max_size=60),
    )
    @settings(max_examples=60, deadline=None)
    def test_identities_hold(self, pred, lab_bits):
        lab = lab_bits[: len(pred)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = classifier.compute_metrics(pred, lab)
        assert m.tp + m.fp + m.tn + m.fn == len(pred)
        if m.tp + m.fn:
            assert m.tpr == pytest.approx(m.tp / (m.tp + m.fn))
        if m.tn + m.fp:
            assert m.tnr == pytest.approx(m.tn / (m.tn + m.fp))
        if (m.tp + m.fn) and (m.tn + m.fp):
            assert m.p == pytest.approx(0.5 * m.tpr + 0.5 * m.tnr)

    @given(
        pred=st.lists(st.integers(0, 1), min_size=2, max_size=60),
        lab_bits=st.lists(st.integers(0, 1), min_size=60, max_size=60),
    )
    @settings(max_examples=60, deadline=None)
    def test_p_invariant_under_class_swap(self, pred, lab_bits):
        lab = lab_bits[: len(pred)]
        swapped_pred = [1 - v for v in pred]
        swapped_lab = [1 - v for v in lab]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = classifier.compute_metrics(pred, lab)
            s = classifier.compute_metrics(swapped_pred, swapped_lab)
        assert (s.tp, s.fp, s.tn, s.fn) == (m.tn, m.fn, m.tp, m.fp)
        assert s.p == pytest.approx(m.p, nan_ok=True)


class TestCalibration:
    def test_perfectly_separable(self):
        # constant p = 1 circuit: only labels matter; a threshold <= 1
        # keeps every prediction at 1
        spec = constant_probability_spec()
        ds = classifier.Dataset(
            points=tuple(circuit.DataPoint((0.0, 0.0), 1) for _ in range(4)),
            seed=(0,),
        )
        t = classifier.calibrate_threshold(spec, np.zeros(0), ds)
        preds = classifier.classify_batch(spec, np.zeros(0), ds.features(), t)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = classifier.compute_metrics(preds, ds.labels())
        assert m.p == 1.0

    def test_threshold_on_grid_and_tie_to_smallest(self):
        spec = constant_probability_spec()
        ds = classifier.Dataset(
            points=tuple(circuit.DataPoint((0.0, 0.0), 1) for _ in range(3)),
            seed=(0,),
        )
        t = classifier.calibrate_threshold(spec, np.zeros(0), ds, grid=11)
        # every threshold <= 1 scores P = 1; ties resolve to the smallest
        assert t == 0.0


class TestSweep:
    def tiny_config(self, **overrides):
        defaults = dict(
            train_size=12,
            test_size=40,
            shot_counts=(None, 1),
            seeds=(0, 1),
            rounds=0,
        )
        defaults.update(overrides)
        return classifier.SweepConfig(**defaults)

    def test_validation(self):
        with pytest.raises(ValueError):
            classifier.SweepConfig(shot_counts=())
        with pytest.raises(ValueError):
            classifier.SweepConfig(seeds=())
        with pytest.raises(ValueError):
            classifier.SweepConfig(shot_counts=(0,))

    def test_zero_rounds_rows_identical_across_shot_counts(self):
        cells = classifier.run_nall_sweep(self.tiny_config())
        by_seed = {}
        for cell in cells:
            by_seed.setdefault(cell.seed, []).append(cell)
        for seed_cells in by_seed.values():
            first = seed_cells[0]
            for other in seed_cells[1:]:
                assert other.metrics == first.metrics
                np.testing.assert_array_equal(other.params, first.params)

    def test_cell_determinism(self):
        cfg = self.tiny_config(rounds=1)
        spec = circuit.default_reuploading_circuit()
        a = classifier.run_cell(cfg, spec, 1, 0)
        b = classifier.run_cell(cfg, spec, 1, 0)
        np.testing.assert_array_equal(a.params, b.params)
        assert a.metrics == b.metrics
        assert a.shots_used == b.shots_used

    def test_noisy_cell_shot_accounting(self):
        cfg = self.tiny_config(rounds=2)
        spec = circuit.default_reuploading_circuit()
        cell = classifier.run_cell(cfg, spec, 3, 0)
        assert cell.shots_used == 2 * 6 * 12 * 5 * 2 * 3
        assert cell.wall_time >= 0.0

    def test_exact_cell_consumes_nothing(self):
        cfg = self.tiny_config(rounds=1)
        spec = circuit.default_reuploading_circuit()
        cell = classifier.run_cell(cfg, spec, None, 1)
        assert cell.shots_used == 0
        assert cell.n_all is None

    def test_threads_do_not_change_results(self):
        cfg = self.tiny_config(rounds=1, seeds=(0,), shot_counts=(None, 2))
        serial = classifier.run_nall_sweep(cfg, threads=1)
        threaded = classifier.run_nall_sweep(cfg, threads=2)
        assert len(serial) == len(threaded)
        for a, b in zip(serial, threaded):
            assert (a.n_all, a.seed) == (b.n_all, b.seed)
            assert a.metrics == b.metrics
            np.testing.assert_array_equal(a.params, b.params)

    def test_table_covers_all_cells_in_order(self):
        cfg = self.tiny_config()
        cells = classifier.run_nall_sweep(cfg)
        assert [(c.n_all, c.seed) for c in cells] == [
            (n, s) for n in cfg.shot_counts for s in cfg.seeds
        ]
