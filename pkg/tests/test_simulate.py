import math

import numpy as np
import pytest

from chainbell.correlations import (
    ChainConfig,
    ChainedNLBoxModel,
    DeterministicLocalModel,
    LocalStrategy,
    QuantumModel,
)
from chainbell.errors import DataError, EstimationError, InputError
from chainbell.simulate import (
    MODE_TRIAL,
    MODE_WINDOW,
    POLICY_INDEPENDENT,
    DetectionRecord,
    EventStream,
    PairedCounts,
    estimate_i,
    estimate_marginal_bias,
    generate_events,
    pair_coincidences,
    read_records_csv,
    simulate_paired_counts,
    write_records_csv,
)

CHSH_QUANTUM = 2 - math.sqrt(2)


class TestGenerateEvents:
    def test_two_records_per_trial(self):
        config = ChainConfig(2, math.pi)
        stream = generate_events(QuantumModel(1.0), config, trials=10, seed=1)
        assert len(stream) == 20
        assert len(np.unique(stream.trial_id)) == 10
        assert list(stream.party_code[:4]) == [0, 1, 0, 1]

    def test_perfect_correlation_at_zero_phase(self):
        config = ChainConfig(2, 0.0)
        stream = generate_events(QuantumModel(1.0), config, trials=400, seed=3)
        a_out = stream.outcome[0::2]
        b_out = stream.outcome[1::2]
        assert np.all(a_out == b_out)

    def test_nlbox_closing_trials_anticorrelate(self):
        config = ChainConfig(2, math.pi)
        stream = generate_events(ChainedNLBoxModel(), config, trials=500, seed=5)
        a_set = stream.setting_index[0::2]
        b_set = stream.setting_index[1::2]
        closing = (a_set == 0) & (b_set == 1)
        assert closing.any()
        assert np.all(stream.outcome[0::2][closing] != stream.outcome[1::2][closing])

    def test_deterministic_given_seed(self):
        config = ChainConfig(3, 1.0, 0.9)
        s1 = generate_events(QuantumModel(0.9), config, trials=5000, seed=42)
        s2 = generate_events(QuantumModel(0.9), config, trials=5000, seed=42)
        for col in ("trial_id", "party_code", "setting_index", "outcome", "timestamp_ns"):
            assert np.array_equal(getattr(s1, col), getattr(s2, col))
        s3 = generate_events(QuantumModel(0.9), config, trials=5000, seed=43)
        assert not np.array_equal(s1.outcome, s3.outcome)

    def test_counter_split_prefix_stability(self):
        # trials beyond one chunk extend the stream without changing its head
        config = ChainConfig(2, math.pi)
        short = generate_events(QuantumModel(1.0), config, trials=1000, seed=9)
        long = generate_events(QuantumModel(1.0), config, trials=70000, seed=9)
        assert np.array_equal(short.outcome, long.outcome[:2000])
        assert np.array_equal(short.setting_index, long.setting_index[:2000])

    def test_independent_policy_covers_cross_settings(self):
        config = ChainConfig(3, math.pi)
        stream = generate_events(QuantumModel(1.0), config, trials=2000, seed=11,
                                 settings_policy=POLICY_INDEPENDENT)
        combos = set(zip(stream.setting_index[0::2].tolist(),
                         stream.setting_index[1::2].tolist()))
        assert combos == {(a, b) for a in range(3) for b in range(3)}

    def test_trials_validation(self):
        with pytest.raises(InputError):
            generate_events(QuantumModel(1.0), ChainConfig(2, 0.0), trials=0, seed=0)
        with pytest.raises(InputError):
            generate_events(QuantumModel(1.0), ChainConfig(2, 0.0), trials=10, seed=0,
                            settings_policy="bogus")


class TestPairByTrial:
    def test_round_trip_matches_fast_path(self):
        config = ChainConfig(2, math.pi)
        stream = generate_events(QuantumModel(1.0), config, trials=4000, seed=17)
        via_records = pair_coincidences(stream, MODE_TRIAL, n=2)
        direct = simulate_paired_counts(QuantumModel(1.0), config, trials=4000, seed=17)
        assert np.array_equal(via_records.counts, direct.counts)
        assert via_records.matched_pairs == 4000
        assert via_records.orphan_count == 0

    def test_orphan_is_dropped_and_counted(self):
        records = [
            DetectionRecord(0, "A", 0, 1, 0),
            DetectionRecord(0, "B", 0, 1, 0),
            DetectionRecord(1, "A", 1, -1, 1000),  # missing partner
        ]
        counts = pair_coincidences(records, MODE_TRIAL, n=2)
        assert counts.orphan_count == 1
        assert counts.matched_pairs == 1
        assert 2 * counts.matched_pairs + counts.orphan_count == counts.total_records

    def test_duplicate_party_in_trial_is_a_data_error(self):
        records = [
            DetectionRecord(0, "A", 0, 1, 0),
            DetectionRecord(0, "A", 1, 1, 0),
        ]
        with pytest.raises(DataError):
            pair_coincidences(records, MODE_TRIAL, n=2)

    def test_nonchain_pairs_are_discarded_from_counts(self):
        records = [
            DetectionRecord(0, "A", 0, 1, 0),
            DetectionRecord(0, "B", 2, 1, 0),  # (0, 2) closes a 3-chain, cross for n=4
        ]
        counts = pair_coincidences(records, MODE_TRIAL, n=4)
        assert counts.discarded_nonchain_pairs == 1
        assert counts.counts.sum() == 0


class TestPairByWindow:
    def test_offset_pairs_within_window(self):
        records = []
        for t in range(10):
            records.append(DetectionRecord(t, "A", t % 2, 1, 10_000 * t))
            records.append(DetectionRecord(t, "B", t % 2, 1, 10_000 * t + 100))
        counts = pair_coincidences(records, MODE_WINDOW, window_ns=1000, n=2)
        assert counts.matched_pairs == 10
        assert counts.orphan_count == 0
        assert counts.ambiguous_count == 0

    def test_ambiguous_records_dropped_and_counted(self):
        records = [
            DetectionRecord(0, "A", 0, 1, 1000),
            DetectionRecord(0, "B", 0, 1, 1100),
            DetectionRecord(1, "B", 1, -1, 1200),  # second B inside A's window
        ]
        counts = pair_coincidences(records, MODE_WINDOW, window_ns=500, n=2)
        assert counts.matched_pairs == 0
        assert counts.ambiguous_count == 3
        assert counts.orphan_count == 0

    def test_orphans_outside_any_window(self):
        records = [
            DetectionRecord(0, "A", 0, 1, 0),
            DetectionRecord(1, "B", 0, 1, 50_000),
        ]
        counts = pair_coincidences(records, MODE_WINDOW, window_ns=100, n=2)
        assert counts.matched_pairs == 0
        assert counts.orphan_count == 2

    def test_conservation(self):
        rng = np.random.default_rng(23)
        records = []
        for t in range(200):
            base = int(rng.integers(0, 1_000_000))
            records.append(DetectionRecord(t, "A", int(rng.integers(0, 2)),
                                           int(rng.choice([1, -1])), base))
            if rng.random() < 0.8:
                records.append(DetectionRecord(t, "B", int(rng.integers(0, 2)),
                                               int(rng.choice([1, -1])), base + 50))
        counts = pair_coincidences(records, MODE_WINDOW, window_ns=200, n=2)
        assert (2 * counts.matched_pairs + counts.orphan_count
                + counts.ambiguous_count) == counts.total_records

    def test_window_required(self):
        with pytest.raises(InputError):
            pair_coincidences([DetectionRecord(0, "A", 0, 1, 0)], MODE_WINDOW, n=2)


class TestEstimateI:
    def test_plug_in_identity_at_scaled_quantum_counts(self):
        config = ChainConfig(2, math.pi)
        m = 1 << 20
        counts = np.zeros((4, 4), dtype=np.int64)
        p_eq = 0.5 * (1 + math.cos(3 * math.pi / 4))
        eq_hits = round(p_eq * m)
        counts[0] = (eq_hits // 2, (m - eq_hits) // 2,
                     m - eq_hits - (m - eq_hits) // 2, eq_hits - eq_hits // 2)
        p_df = 0.5 * (1 - math.cos(math.pi / 4))
        df_hits = round(p_df * m)
        for k in (1, 2, 3):
            counts[k] = ((m - df_hits) // 2, df_hits // 2,
                         df_hits - df_hits // 2, m - df_hits - (m - df_hits) // 2)
        paired = PairedCounts(2, counts, 4 * m, 0, 0, 0, 8 * m)
        result = estimate_i(paired, config)
        assert result.value == pytest.approx(CHSH_QUANTUM, abs=1e-5)
        assert result.samples_per_pair == (m,) * 4

    def test_all_equal_outcomes_give_unit_value_and_zero_error(self):
        counts = np.zeros((4, 4), dtype=np.int64)
        counts[:, 0] = 250  # every pair only (+,+)
        paired = PairedCounts(2, counts, 1000, 0, 0, 0, 2000)
        result = estimate_i(paired, ChainConfig(2, 0.0))
        assert result.value == 1.0
        assert result.std_error == 0.0

    def test_empty_pair_names_the_pair(self):
        counts = np.zeros((4, 4), dtype=np.int64)
        counts[1:, 0] = 10
        paired = PairedCounts(2, counts, 30, 0, 0, 0, 60)
        with pytest.raises(EstimationError, match="closing"):
            estimate_i(paired, ChainConfig(2, 0.0))

    def test_estimator_consistency(self):
        config = ChainConfig(2, math.pi)
        model = QuantumModel(1.0)
        errors = []
        for trials in (1000, 10_000, 100_000):
            counts = simulate_paired_counts(model, config, trials, seed=100)
            result = estimate_i(counts, config)
            assert abs(result.value - CHSH_QUANTUM) <= 5 * result.std_error
            errors.append(result.std_error)
        assert errors[0] > errors[1] > errors[2]


class TestMarginalBias:
    def test_all_plus_strategy_is_maximally_biased(self):
        model = DeterministicLocalModel(LocalStrategy((1, 1), (1, 1)))
        stream = generate_events(model, ChainConfig(2, 0.0), trials=500, seed=2)
        report = estimate_marginal_bias(stream, n=2)
        assert all(cell.distance == 0.5 for cell in report.cells)
        assert all(cell.std_error == 0.0 for cell in report.cells)
        assert report.worst.distance == 0.5

    def test_sixty_forty_synthetic_stream(self):
        records = []
        for i in range(1000):
            out = 1 if i < 600 else -1
            records.append(DetectionRecord(i, "A", 0, out, i))
            records.append(DetectionRecord(i, "B", 0, out, i))
        # one record per remaining cell so every (party, setting) is populated
        records += [DetectionRecord(1000 + j, p, 1, 1, 10_000 + j)
                    for j, p in enumerate(("A", "B"))]
        report = estimate_marginal_bias(records, n=2)
        cell = [c for c in report.cells if c.party == "A" and c.setting_index == 0][0]
        assert cell.p_plus == pytest.approx(0.6, abs=1e-12)
        assert cell.distance == pytest.approx(0.1, abs=1e-12)
        assert cell.std_error == pytest.approx(math.sqrt(0.6 * 0.4 / 1000), abs=1e-12)

    def test_quantum_stream_is_unbiased_within_noise(self):
        stream = generate_events(QuantumModel(1.0), ChainConfig(2, math.pi),
                                 trials=100_000, seed=8)
        report = estimate_marginal_bias(stream, n=2)
        for cell in report.cells:
            assert cell.distance <= 3 * cell.std_error

    def test_missing_cell_is_an_error(self):
        records = [DetectionRecord(0, "A", 0, 1, 0), DetectionRecord(0, "B", 0, 1, 0)]
        with pytest.raises(EstimationError, match="setting 1"):
            estimate_marginal_bias(records, n=2)


class TestRecordsCsv(object):
    def test_round_trip(self, tmp_path):
        config = ChainConfig(2, math.pi, 0.97)
        stream = generate_events(QuantumModel(0.97), config, trials=300, seed=4)
        path = tmp_path / "records.csv"
        write_records_csv(stream, path)
        back = read_records_csv(path)
        for col in ("trial_id", "party_code", "setting_index", "outcome", "timestamp_ns"):
            assert np.array_equal(getattr(stream, col), getattr(back, col))

    def test_counts_survive_round_trip(self, tmp_path):
        config = ChainConfig(3, 2.0)
        stream = generate_events(QuantumModel(1.0), config, trials=500, seed=6)
        path = tmp_path / "records.csv"
        write_records_csv(stream, path)
        c1 = pair_coincidences(stream, MODE_TRIAL, n=3)
        c2 = pair_coincidences(read_records_csv(path), MODE_TRIAL, n=3)
        assert np.array_equal(c1.counts, c2.counts)

    def test_malformed_rows_report_line_numbers(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("trial_id,party,setting_index,outcome,timestamp_ns\n"
                        "0,A,0,+1,0\n"
                        "1,X,0,+1,5\n")
        with pytest.raises(DataError, match="line 3"):
            read_records_csv(path)

    def test_bad_outcome_value(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("trial_id,party,setting_index,outcome,timestamp_ns\n"
                        "0,A,0,2,0\n")
        with pytest.raises(DataError, match="line 2"):
            read_records_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(DataError):
            read_records_csv(path)

    def test_header_only_file(self, tmp_path):
        path = tmp_path / "header.csv"
        path.write_text("trial_id,party,setting_index,outcome,timestamp_ns\n")
        with pytest.raises(DataError):
            read_records_csv(path)


def test_event_stream_from_records_round_trip():
    records = [
        DetectionRecord(0, "A", 1, 1, 0),
        DetectionRecord(0, "B", 0, -1, 10),
    ]
    stream = EventStream.from_records(records)
    assert list(stream) == records
