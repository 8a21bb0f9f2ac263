"""Monte Carlo detection streams, coincidence pairing and functional estimation.

Generation is deterministic given the master seed: trials are processed in
fixed-size chunks and chunk ``c`` draws from a counter-based stream obtained
by jumping the Philox generator ``c`` times, so the record stream is
bit-identical no matter how chunks are scheduled. Within a chunk the pair
choice uniforms are drawn first, then the outcome uniforms.

Estimation treats each functional term as an independent binomial: the trial
settings are chosen independently of outcomes, so the plug-in estimator's
standard error is sqrt(sum p(1-p)/m) over the per-pair frequencies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from ._backend import count_outcomes, map_outcomes
from .correlations import ChainConfig
from .errors import DataError, EstimationError, InputError

CHUNK_TRIALS = 1 << 16

POLICY_CHAIN = "chain-pairs-uniform"
POLICY_INDEPENDENT = "independent-uniform"
POLICIES = (POLICY_CHAIN, POLICY_INDEPENDENT)

MODE_TRIAL = "by-trial-id"
MODE_WINDOW = "by-timestamp-window"

RECORD_HEADER = ("trial_id", "party", "setting_index", "outcome", "timestamp_ns")


@dataclass(frozen=True)
class DetectionRecord:
    """One single-party measurement event."""

    trial_id: int
    party: str
    setting_index: int
    outcome: int
    timestamp_ns: int


class EventStream:
    """Columnar batch of detection records.

    Keeps numpy columns for speed; iteration yields DetectionRecord objects.
    Party is stored as 0 for A and 1 for B.
    """

    def __init__(self, trial_id, party_code, setting_index, outcome, timestamp_ns):
        self.trial_id = np.asarray(trial_id, dtype=np.int64)
        self.party_code = np.asarray(party_code, dtype=np.uint8)
        self.setting_index = np.asarray(setting_index, dtype=np.int64)
        self.outcome = np.asarray(outcome, dtype=np.int8)
        self.timestamp_ns = np.asarray(timestamp_ns, dtype=np.int64)
        lengths = {len(self.trial_id), len(self.party_code), len(self.setting_index),
                   len(self.outcome), len(self.timestamp_ns)}
        if len(lengths) != 1:
            raise InputError("event columns must share one length")
        if np.any(self.timestamp_ns < 0):
            raise InputError("timestamps must be non-negative")
        if not np.all(np.abs(self.outcome) == 1):
            raise InputError("outcomes must be +1 or -1")

    def __len__(self) -> int:
        return len(self.trial_id)

    def __iter__(self) -> Iterator[DetectionRecord]:
        for i in range(len(self)):
            yield DetectionRecord(
                int(self.trial_id[i]),
                "A" if self.party_code[i] == 0 else "B",
                int(self.setting_index[i]),
                int(self.outcome[i]),
                int(self.timestamp_ns[i]),
            )

    @classmethod
    def from_records(cls, records: Iterable[DetectionRecord]) -> "EventStream":
        rows = list(records)
        return cls(
            [r.trial_id for r in rows],
            [0 if r.party == "A" else 1 for r in rows],
            [r.setting_index for r in rows],
            [r.outcome for r in rows],
            [r.timestamp_ns for r in rows],
        )


def _policy_tables(model, config: ChainConfig, settings_policy: str):
    """Cumulative outcome thresholds plus setting/term lookup per sampled row."""
    if settings_policy == POLICY_CHAIN:
        a_set = np.array([p.a_index for p in config.pairs], dtype=np.int64)
        b_set = np.array([p.b_index for p in config.pairs], dtype=np.int64)
        terms = np.arange(len(config.pairs), dtype=np.int64)
    elif settings_policy == POLICY_INDEPENDENT:
        grid = [(a, b) for a in range(config.n) for b in range(config.n)]
        a_set = np.array([a for a, _ in grid], dtype=np.int64)
        b_set = np.array([b for _, b in grid], dtype=np.int64)
        terms = np.array([config.term_index_of(a, b) for a, b in grid], dtype=np.int64)
    else:
        raise InputError(f"settings policy must be one of {POLICIES}, got {settings_policy!r}")
    probs = np.empty((len(a_set), 4), dtype=np.float64)
    for k in range(len(a_set)):
        probs[k] = model.joint(config, int(a_set[k]), int(b_set[k])).as_tuple()
    cum = np.ascontiguousarray(np.cumsum(probs[:, :3], axis=1))
    return cum, a_set, b_set, terms


def _sample_trials(model, config: ChainConfig, trials: int, seed: int,
                   settings_policy: str):
    """Sampled (row index, outcome index) arrays for every trial."""
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    cum, a_set, b_set, terms = _policy_tables(model, config, settings_policy)
    n_rows = cum.shape[0]
    row_idx = np.empty(trials, dtype=np.int64)
    out_idx = np.empty(trials, dtype=np.uint8)
    for chunk, start in enumerate(range(0, trials, CHUNK_TRIALS)):
        stop = min(start + CHUNK_TRIALS, trials)
        gen = np.random.Generator(np.random.Philox(key=seed).jumped(chunk))
        # interleaved draws: trial i always consumes stream slots 2i and 2i+1,
        # so a partial chunk is a prefix of the full one
        u = gen.random(2 * (stop - start))
        u_pair = u[0::2]
        u_out = np.ascontiguousarray(u[1::2])
        rows = np.minimum((u_pair * n_rows).astype(np.int64), n_rows - 1)
        row_idx[start:stop] = rows
        out_idx[start:stop] = map_outcomes(cum, rows, u_out)
    return row_idx, out_idx, a_set, b_set, terms


def generate_events(model, config: ChainConfig, trials: int, seed: int,
                    settings_policy: str = POLICY_CHAIN,
                    interval_ns: int = 1000) -> EventStream:
    """Simulate ``trials`` rounds and return the interleaved A/B record stream.

    Each trial emits two records sharing a trial id, timestamped by a fixed
    interval clock. Fully deterministic given the seed.
    """
    row_idx, out_idx, a_set, b_set, _ = _sample_trials(
        model, config, trials, seed, settings_policy)
    a_out = np.where((out_idx == 0) | (out_idx == 1), 1, -1).astype(np.int8)
    b_out = np.where((out_idx == 0) | (out_idx == 2), 1, -1).astype(np.int8)
    trial = np.arange(trials, dtype=np.int64)

    trial_col = np.repeat(trial, 2)
    party_col = np.tile(np.array([0, 1], dtype=np.uint8), trials)
    setting_col = np.empty(2 * trials, dtype=np.int64)
    setting_col[0::2] = a_set[row_idx]
    setting_col[1::2] = b_set[row_idx]
    outcome_col = np.empty(2 * trials, dtype=np.int8)
    outcome_col[0::2] = a_out
    outcome_col[1::2] = b_out
    stamp = trial * np.int64(interval_ns)
    stamp_col = np.repeat(stamp, 2)
    return EventStream(trial_col, party_col, setting_col, outcome_col, stamp_col)


@dataclass(frozen=True)
class PairedCounts:
    """Outcome counts per evaluated setting pair plus pairing bookkeeping.

    ``counts[k, j]`` is the number of coincidences of functional term ``k``
    with outcome pair OUTCOME_PAIRS[j]. Conservation: 2 * matched_pairs +
    orphan_count + ambiguous_count equals total_records.
    """

    n: int
    counts: np.ndarray
    matched_pairs: int
    orphan_count: int
    ambiguous_count: int
    discarded_nonchain_pairs: int
    total_records: int

    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def simulate_paired_counts(model, config: ChainConfig, trials: int, seed: int,
                           settings_policy: str = POLICY_CHAIN) -> PairedCounts:
    """Fast path: identical sampling to generate_events, counted directly."""
    row_idx, out_idx, _, _, terms = _sample_trials(
        model, config, trials, seed, settings_policy)
    term_per_trial = terms[row_idx]
    chain = term_per_trial >= 0
    counts = count_outcomes(np.ascontiguousarray(term_per_trial[chain]),
                            np.ascontiguousarray(out_idx[chain]), 2 * config.n)
    discarded = int(trials - chain.sum())
    return PairedCounts(config.n, counts, trials, 0, 0, discarded, 2 * trials)


def _as_stream(records) -> EventStream:
    if isinstance(records, EventStream):
        return records
    return EventStream.from_records(records)


def _infer_n(stream: EventStream, n: int | None) -> int:
    if n is not None:
        if n < 2:
            raise InputError(f"chain order must be >= 2, got {n}")
        return n
    if len(stream) == 0:
        raise DataError("cannot infer chain order from an empty stream")
    return int(stream.setting_index.max()) + 1


def _term_lookup(n: int, a_set: np.ndarray, b_set: np.ndarray) -> np.ndarray:
    """Vectorized functional-term index; -1 for combinations outside the cycle."""
    terms = np.full(a_set.shape, -1, dtype=np.int64)
    closing = (a_set == 0) & (b_set == n - 1)
    same = b_set == a_set
    below = b_set == a_set - 1
    terms[same] = 2 * a_set[same] + 1
    terms[below] = 2 * a_set[below]
    terms[closing] = 0
    return terms


def _count_matched(n: int, a_set, b_set, a_out, b_out, orphans, ambiguous, total):
    bad = (a_set < 0) | (a_set >= n) | (b_set < 0) | (b_set >= n)
    if bad.any():
        k = int(np.argmax(bad))
        raise DataError(f"setting index out of range for chain order {n}: "
                        f"({int(a_set[k])}, {int(b_set[k])})")
    out_idx = ((a_out < 0) * 2 + (b_out < 0)).astype(np.uint8)
    terms = _term_lookup(n, a_set, b_set)
    chain = terms >= 0
    counts = count_outcomes(np.ascontiguousarray(terms[chain]),
                            np.ascontiguousarray(out_idx[chain]), 2 * n)
    return PairedCounts(n, counts, int(len(a_set)), orphans, ambiguous,
                        int(len(a_set) - chain.sum()), total)


def _pair_by_trial(stream: EventStream, n: int) -> PairedCounts:
    order = np.lexsort((stream.party_code, stream.trial_id))
    t = stream.trial_id[order]
    p = stream.party_code[order]
    if len(t) > 1:
        dup = (t[1:] == t[:-1]) & (p[1:] == p[:-1])
        if dup.any():
            k = int(np.argmax(dup))
            raise DataError(f"two records share trial_id {int(t[k + 1])} and party "
                            f"{'A' if p[k + 1] == 0 else 'B'}")
    _, starts, sizes = np.unique(t, return_index=True, return_counts=True)
    paired = starts[sizes == 2]
    orphans = int((sizes == 1).sum())
    ia = order[paired]
    ib = order[paired + 1]
    return _count_matched(
        n,
        stream.setting_index[ia], stream.setting_index[ib],
        stream.outcome[ia], stream.outcome[ib],
        orphans, 0, len(stream),
    )


def _pair_by_window(stream: EventStream, n: int, window_ns: int) -> PairedCounts:
    a_mask = stream.party_code == 0
    b_mask = ~a_mask
    a_idx = np.nonzero(a_mask)[0]
    b_idx = np.nonzero(b_mask)[0]
    a_order = a_idx[np.argsort(stream.timestamp_ns[a_idx], kind="stable")]
    b_order = b_idx[np.argsort(stream.timestamp_ns[b_idx], kind="stable")]
    ta = stream.timestamp_ns[a_order]
    tb = stream.timestamp_ns[b_order]

    lo = np.searchsorted(tb, ta - window_ns, side="left")
    hi = np.searchsorted(tb, ta + window_ns, side="right")
    a_hits = hi - lo
    lo_a = np.searchsorted(ta, tb - window_ns, side="left")
    hi_a = np.searchsorted(ta, tb + window_ns, side="right")
    b_hits = hi_a - lo_a

    a_unique = a_hits == 1
    target = np.where(a_unique, lo, -1)
    if len(tb):
        claims = np.bincount(target[a_unique], minlength=len(tb))
        matched_a = a_unique & (claims[np.maximum(target, 0)] == 1)
    else:
        matched_a = np.zeros(len(ta), dtype=bool)
    matched_b_mask = np.zeros(len(tb), dtype=bool)
    matched_b_mask[target[matched_a]] = True

    a_orphans = int((a_hits == 0).sum())
    b_orphans = int((b_hits == 0).sum())
    a_ambiguous = int(len(ta) - a_orphans - matched_a.sum())
    b_ambiguous = int(len(tb) - b_orphans - matched_b_mask.sum())

    ia = a_order[matched_a]
    ib = b_order[target[matched_a]]
    return _count_matched(
        n,
        stream.setting_index[ia], stream.setting_index[ib],
        stream.outcome[ia], stream.outcome[ib],
        a_orphans + b_orphans, a_ambiguous + b_ambiguous, len(stream),
    )


def pair_coincidences(records, mode: str = MODE_TRIAL,
                      window_ns: int | None = None,
                      n: int | None = None) -> PairedCounts:
    """Group single-party records into coincidences.

    ``by-trial-id`` pairs records sharing a trial id (duplicate trial/party is
    a data error, lone records are orphans). ``by-timestamp-window`` pairs an
    A record with the unique B record within ``window_ns``; records with no
    candidate in the window are orphans and records whose windows overlap
    ambiguously are dropped and counted.
    """
    stream = _as_stream(records)
    n = _infer_n(stream, n)
    if mode == MODE_TRIAL:
        return _pair_by_trial(stream, n)
    if mode == MODE_WINDOW:
        if window_ns is None or window_ns <= 0:
            raise InputError("timestamp pairing needs window_ns > 0")
        return _pair_by_window(stream, n, int(window_ns))
    raise InputError(f"pairing mode must be '{MODE_TRIAL}' or '{MODE_WINDOW}', got {mode!r}")


@dataclass(frozen=True)
class EstimateResult:
    """Plug-in estimate of the functional with propagated standard error."""

    value: float
    std_error: float
    samples_per_pair: tuple[int, ...]
    per_term: tuple[float, ...]


def estimate_i(counts: PairedCounts, config: ChainConfig) -> EstimateResult:
    """Empirical functional value from paired counts.

    Term 0 uses the equal-outcome frequency of the closing pair, the rest the
    unequal-outcome frequency of their adjacent pair.
    """
    if counts.n != config.n:
        raise InputError(f"counts are for chain order {counts.n}, config has {config.n}")
    totals = counts.totals()
    per_term = []
    variance = 0.0
    for pair in config.pairs:
        m = int(totals[pair.term_index])
        if m == 0:
            raise EstimationError(
                f"no coincidences for {pair.kind} pair "
                f"(A{pair.a_index}, B{pair.b_index})")
        row = counts.counts[pair.term_index]
        hits = row[0] + row[3] if pair.kind == "closing" else row[1] + row[2]
        p_hat = hits / m
        per_term.append(p_hat)
        variance += p_hat * (1.0 - p_hat) / m
    return EstimateResult(
        value=math.fsum(per_term),
        std_error=math.sqrt(variance),
        samples_per_pair=tuple(int(totals[p.term_index]) for p in config.pairs),
        per_term=tuple(per_term),
    )


@dataclass(frozen=True)
class BiasCell:
    party: str
    setting_index: int
    count: int
    p_plus: float
    distance: float
    std_error: float


@dataclass(frozen=True)
class BiasReport:
    """Per-setting marginal distances from uniform; worst cell is the aggregate."""

    cells: tuple[BiasCell, ...]
    worst: BiasCell


def estimate_marginal_bias(records, n: int | None = None) -> BiasReport:
    """Empirical |p(+1) - 1/2| per (party, setting) with binomial errors."""
    stream = _as_stream(records)
    n = _infer_n(stream, n)
    cells = []
    for code, party in ((0, "A"), (1, "B")):
        for setting in range(n):
            mask = (stream.party_code == code) & (stream.setting_index == setting)
            m = int(mask.sum())
            if m == 0:
                raise EstimationError(f"no records for party {party} setting {setting}")
            p_plus = float((stream.outcome[mask] == 1).sum() / m)
            cells.append(BiasCell(
                party=party,
                setting_index=setting,
                count=m,
                p_plus=p_plus,
                distance=abs(p_plus - 0.5),
                std_error=math.sqrt(p_plus * (1.0 - p_plus) / m),
            ))
    worst = max(cells, key=lambda c: c.distance)
    return BiasReport(tuple(cells), worst)


# --- record file format ---------------------------------------------------------


def write_records_csv(stream: EventStream, path) -> None:
    """Write the detection-record CSV (header trial_id,party,setting_index,outcome,timestamp_ns)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_HEADER)
        parties = np.where(stream.party_code == 0, "A", "B")
        outs = np.where(stream.outcome == 1, "+1", "-1")
        for i in range(len(stream)):
            writer.writerow((int(stream.trial_id[i]), parties[i],
                             int(stream.setting_index[i]), outs[i],
                             int(stream.timestamp_ns[i])))


def read_records_csv(path) -> EventStream:
    """Parse a detection-record CSV, validating each row (line numbers in errors)."""
    trial, party, setting, outcome, stamp = [], [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError("empty records file")
        if tuple(h.strip() for h in header) != RECORD_HEADER:
            raise DataError(f"line 1: expected header {','.join(RECORD_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise DataError(f"line {lineno}: expected 5 fields, got {len(row)}")
            try:
                trial.append(int(row[0]))
                p = row[1].strip()
                if p not in ("A", "B"):
                    raise ValueError(f"party must be A or B, got {p!r}")
                party.append(0 if p == "A" else 1)
                setting.append(int(row[2]))
                out = int(row[3])
                if out not in (1, -1):
                    raise ValueError(f"outcome must be +1 or -1, got {out}")
                outcome.append(out)
                ts = int(row[4])
                if ts < 0:
                    raise ValueError("timestamp must be non-negative")
                stamp.append(ts)
            except ValueError as exc:
                raise DataError(f"line {lineno}: {exc}") from exc
    if not trial:
        raise DataError("records file contains no data rows")
    return EventStream(trial, party, setting, outcome, stamp)
