import math

import numpy as np
import pytest

from chainbell import _kernels_fallback
from chainbell.correlations import ChainConfig, DeterministicLocalModel, MixtureModel
from chainbell.errors import CapacityError
from chainbell.functional import i_functional, i_quantum_closed_form
from chainbell.oracle import (
    enumerate_strategies,
    lhv_minimum,
    strategy_from_index,
    strategy_i_value,
    violation_margin,
)

try:
    from chainbell import _kernels
except ImportError:
    _kernels = None


@pytest.mark.parametrize("n,count", [(2, 16), (3, 64), (4, 256)])
def test_enumeration_counts(n, count):
    strategies = list(enumerate_strategies(n))
    assert len(strategies) == count
    assert len(set(strategies)) == count


def test_capacity_cap():
    with pytest.raises(CapacityError):
        lhv_minimum(13)
    with pytest.raises(CapacityError):
        list(enumerate_strategies(13))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_minimum_is_one_with_valid_witness(n):
    minimum, witness = lhv_minimum(n)
    assert minimum == 1.0
    assert strategy_i_value(witness, n) == minimum


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_every_strategy_scores_an_integer_of_at_least_one(n):
    # slow independent route: every term through the generic functional
    config = ChainConfig(n, 0.7)
    best = math.inf
    for strategy in enumerate_strategies(n):
        report = i_functional(DeterministicLocalModel(strategy), config)
        assert all(t in (0.0, 1.0) for t in report.per_term)
        assert report.i_value == int(report.i_value) >= 1
        best = min(best, report.i_value)
    assert best == 1.0
    assert lhv_minimum(n)[0] == best


def test_scan_matches_slow_route_witness_values():
    for n in (2, 3):
        fast_min, witness = lhv_minimum(n)
        slow = {s: strategy_i_value(s, n) for s in enumerate_strategies(n)}
        assert fast_min == min(slow.values())
        assert slow[witness] == fast_min


def test_mixtures_never_beat_the_deterministic_minimum():
    rng = np.random.default_rng(13)
    config = ChainConfig(3, math.pi)
    strategies = list(enumerate_strategies(3))
    for _ in range(50):
        picks = rng.integers(0, len(strategies), size=4)
        raw = rng.uniform(0.05, 1.0, size=4)
        weights = raw / raw.sum()
        components = [DeterministicLocalModel(strategies[int(i)]) for i in picks]
        mixture = MixtureModel(components, [float(w) for w in weights])
        value = i_functional(mixture, config).i_value
        parts = [i_functional(c, config).i_value for c in components]
        assert value == pytest.approx(math.fsum(w * p for w, p in zip(weights, parts)), abs=1e-12)
        assert value >= 1.0 - 1e-12


class TestViolationMargin:
    def test_chsh_point(self):
        assert violation_margin(2, math.pi, 1.0) == pytest.approx(math.sqrt(2) - 1, abs=1e-12)

    def test_no_violation_at_zero_phase(self):
        assert violation_margin(2, 0.0, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_order_6_imperfect(self):
        margin = violation_margin(6, math.pi, 0.97)
        assert margin == pytest.approx(1 - i_quantum_closed_form(6, math.pi, 0.97), abs=1e-12)
        assert margin == pytest.approx(0.6216882, abs=1e-6)


def test_strategy_index_round_trip():
    for n in (2, 5):
        for index in (0, 1, (1 << (2 * n)) - 1, 37 % (1 << (2 * n))):
            strat = strategy_from_index(n, index)
            a_bits = sum((1 << i) for i, o in enumerate(strat.a_outcomes) if o == -1)
            b_bits = sum((1 << i) for i, o in enumerate(strat.b_outcomes) if o == -1)
            assert (a_bits << n) | b_bits == index


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
def test_backends_agree_on_scan():
    for n in range(2, 9):
        assert _kernels.lhv_scan(n) == _kernels_fallback.lhv_scan(n)
