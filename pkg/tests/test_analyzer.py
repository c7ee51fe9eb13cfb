"""Learning-curve analytics: gains, critical periods, cross-inference."""

import numpy as np
import pytest

import visemelab as vl
from visemelab.analyzer import (
    CriticalPeriodReport,
    DetectionParams,
    cp_vs_data_fraction,
    cross_inference_compare,
    detect_critical_period,
    gains,
)
from visemelab.errors import IncompatibleTracesError, InsufficientDataError
from visemelab.traceio import EpochRecord, TrainingTrace


def make_trace(series_by_label, phases=None, protocol=None):
    """Trace from {label: [acc per epoch]}; None marks absent cells."""
    labels = tuple(sorted(series_by_label))
    n = len(next(iter(series_by_label.values())))
    epochs = []
    for i in range(n):
        per = tuple(series_by_label[lab][i] for lab in labels)
        present = [v for v in per if v is not None]
        overall = float(np.mean(present)) if present else 0.0
        phase = phases[i] if phases else 1
        epochs.append(EpochRecord(epoch=i + 1, phase=phase, overall=overall, per_viseme=per))
    return TrainingTrace(
        protocol=protocol or {"kind": "monolingual", "language": "en", "fraction": 1.0},
        config={}, inventory=labels, epochs=epochs,
    )


class TestGains:
    def test_constant_trace_all_zero(self):
        trace = make_trace({"a": [0.4] * 5, "b": [0.2] * 5})
        assert np.all(gains(trace).values == 0.0)

    def test_first_differences(self):
        trace = make_trace({"a": [0.1, 0.3, 0.35]})
        assert np.allclose(gains(trace).values[:, 0], [0.2, 0.05])

    def test_absent_cells_propagate(self):
        trace = make_trace({"a": [0.1, None, 0.3]})
        matrix = gains(trace)
        assert np.isnan(matrix.values[0, 0]) and np.isnan(matrix.values[1, 0])

    def test_single_epoch_rejected(self):
        with pytest.raises(InsufficientDataError):
            gains(make_trace({"a": [0.5]}))

    def test_spreadsheet_recomputation(self):
        series = {"a": [0.10, 0.22, 0.31, 0.33, 0.40], "b": [0.05, 0.06, 0.30, 0.61, 0.62]}
        matrix = gains(make_trace(series))
        for j, lab in enumerate(sorted(series)):
            vals = series[lab]
            hand = [round(b - a, 10) for a, b in zip(vals, vals[1:])]
            assert np.allclose(matrix.values[:, j], hand)

    def test_linearity_in_scale(self):
        rng = np.random.default_rng(3)
        base = {f"v{k}": list(rng.uniform(0, 1, 6)) for k in range(4)}
        for c in (0.0, 0.37, 1.0):
            scaled = {k: [c * x for x in v] for k, v in base.items()}
            assert np.allclose(
                gains(make_trace(scaled)).values, c * gains(make_trace(base)).values, atol=1e-12
            )


class TestDetectCriticalPeriod:
    def test_single_unambiguous_jump(self):
        series = {f"v{k}": [0.1] * 5 + [0.8] * 5 for k in range(4)}
        report = detect_critical_period(make_trace(series))
        assert report.cp_epoch == 6
        assert report.surge_fraction == 1.0

    def test_flat_trace_has_no_cp(self):
        report = detect_critical_period(make_trace({"a": [0.5] * 6, "b": [0.2] * 6}))
        assert report.cp_epoch is None

    def test_earliest_of_equal_surges_wins(self):
        series = {
            "a": [0.1, 0.1, 0.1, 0.4, 0.4, 0.4, 0.4, 0.4, 0.7, 0.7],
            "b": [0.1, 0.1, 0.1, 0.4, 0.4, 0.4, 0.4, 0.4, 0.7, 0.7],
        }
        assert detect_critical_period(make_trace(series)).cp_epoch == 4

    def test_shift_equivariance(self):
        rng = np.random.default_rng(11)
        base = {f"v{k}": [0.1, 0.1, 0.1, 0.6, 0.65, 0.66] for k in range(3)}
        for window in (1, 3):
            params = DetectionParams(window=window)
            cp0 = detect_critical_period(make_trace(base), params).cp_epoch
            for j in (1, 3, 5):
                shifted = {k: [v[0]] * j + v for k, v in base.items()}
                cpj = detect_critical_period(make_trace(shifted), params).cp_epoch
                assert cpj == cp0 + j

    def test_threshold_monotone(self):
        rng = np.random.default_rng(5)
        series = {
            f"v{k}": list(np.clip(np.cumsum(rng.uniform(0, 0.2, 12)), 0, 1))
            for k in range(5)
        }
        trace = make_trace(series)
        cps = []
        for theta in (0.02, 0.05, 0.1, 0.2):
            rep = detect_critical_period(trace, DetectionParams(threshold=theta))
            cps.append(rep.cp_epoch if rep.cp_epoch is not None else 10**6)
        assert cps == sorted(cps)
        cps_rho = []
        for rho in (0.2, 0.5, 0.8, 1.0):
            rep = detect_critical_period(trace, DetectionParams(fraction=rho))
            cps_rho.append(rep.cp_epoch if rep.cp_epoch is not None else 10**6)
        assert cps_rho == sorted(cps_rho)

    def test_needs_three_epochs(self):
        with pytest.raises(InsufficientDataError):
            detect_critical_period(make_trace({"a": [0.1, 0.2]}))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            DetectionParams(threshold=0)
        with pytest.raises(ValueError):
            DetectionParams(fraction=1.5)
        with pytest.raises(ValueError):
            DetectionParams(window=2)


class TestCpVsFraction:
    def report(self, cp):
        return CriticalPeriodReport(cp, 0.8 if cp else None, 0.1 if cp else None, DetectionParams())

    def test_paper_pattern_monotone(self):
        items = [(0.25, self.report(15)), (0.5, self.report(10)),
                 (0.75, self.report(7)), (1.0, self.report(5))]
        summary = cp_vs_data_fraction(items)
        assert summary.monotone and not summary.partial
        assert summary.pairs == ((0.25, 15), (0.5, 10), (0.75, 7), (1.0, 5))

    def test_increasing_pair_not_monotone(self):
        summary = cp_vs_data_fraction([(0.25, self.report(5)), (1.0, self.report(9))])
        assert not summary.monotone

    def test_missing_cp_flags_partial(self):
        items = [(0.25, self.report(None)), (0.5, self.report(9)), (1.0, self.report(5))]
        summary = cp_vs_data_fraction(items)
        assert summary.partial and summary.missing_fractions == (0.25,)

    def test_fewer_than_two_detections_rejected(self):
        with pytest.raises(InsufficientDataError):
            cp_vs_data_fraction([(0.25, self.report(None)), (1.0, self.report(5))])


def sequential_trace(finals, phases=(1, 1, 2, 2), protocol_kind="sequential"):
    labels = tuple(sorted(finals))
    n = len(phases)
    series = {lab: [0.1] * (n - 1) + [finals[lab]] for lab in labels}
    return make_trace(
        series, phases=list(phases),
        protocol={"kind": protocol_kind, "first_language": "en",
                  "switch": "at_critical_period", "fraction": 1.0},
    )


class TestCrossInference:
    def merged(self, tables):
        return vl.build_inventory(tables, vl.MERGED)

    def full_finals(self, inventory, value):
        return {lab: value for lab in inventory.rendered}

    def test_identical_traces_zero_drops(self, tables):
        inventory = self.merged(tables)
        trace = sequential_trace(self.full_finals(inventory, 0.6))
        report = cross_inference_compare(trace, trace, [], inventory)
        for name in ("common", "mandarin_only", "english_only"):
            assert report.drop(name) == 0.0

    def test_hand_computed_drops(self, tables):
        inventory = self.merged(tables)
        finals_cp = self.full_finals(inventory, 0.8)
        finals_conv = dict(finals_cp)
        finals_conv["y_M"] = 0.5
        finals_conv["R_M"] = 0.7
        report = cross_inference_compare(
            sequential_trace(finals_cp), sequential_trace(finals_conv), [], inventory
        )
        assert report.drop("common") == pytest.approx(0.0)
        assert report.drop("mandarin_only") == pytest.approx(((0.8 - 0.5) + (0.8 - 0.7)) / 2)

    def test_requires_phase_two(self, tables):
        inventory = self.merged(tables)
        trace = sequential_trace(self.full_finals(inventory, 0.5), phases=(1, 1, 1, 1))
        with pytest.raises(InsufficientDataError):
            cross_inference_compare(trace, trace, [], inventory)

    def test_inventory_mismatch_names_hashes(self, tables):
        inventory = self.merged(tables)
        good = sequential_trace(self.full_finals(inventory, 0.5))
        bad = sequential_trace({"a": 0.5, "b": 0.5})
        with pytest.raises(IncompatibleTracesError):
            cross_inference_compare(bad, good, [], inventory)

    def test_mono_reference_alignment(self, tables):
        inventory = self.merged(tables)
        mono_inv = vl.build_inventory(tables, vl.Language.ENGLISH)
        mono = make_trace(
            {lab: [0.2, 0.9] for lab in mono_inv.rendered},
            protocol={"kind": "monolingual", "language": "en", "fraction": 1.0},
        )
        pair = sequential_trace(self.full_finals(inventory, 0.7))
        report = cross_inference_compare(pair, pair, [mono], inventory)
        assert report.per_viseme["t"]["mono_en"] == pytest.approx(0.9)
        assert report.per_viseme["y_M"]["mono_en"] is None
        assert report.class_means["mandarin_only"]["mono_en"] is None

    def test_text_round_trip(self, tables):
        inventory = self.merged(tables)
        report = cross_inference_compare(
            sequential_trace(self.full_finals(inventory, 0.8)),
            sequential_trace(self.full_finals(inventory, 0.6)),
            [], inventory,
        )
        parsed = type(report).from_text(report.to_text())
        for name, row in report.class_means.items():
            for key, value in row.items():
                if value is None:
                    assert parsed[name][key] is None
                else:
                    assert parsed[name][key] == pytest.approx(value)
