import math

import numpy as np
import pytest

from chainbell.errors import InputError
from chainbell.timing import (
    FrameVelocity,
    SpacetimeEvent,
    before_before_holds,
    boost_event,
    boosted_time,
    is_spacelike,
    min_speed_for_priority,
)

C = 299_792_458.0


class TestBoostedTime:
    def test_identity_boost(self):
        event = SpacetimeEvent(1.5, 2.0e8)
        assert boosted_time(event, FrameVelocity(0.0), C) == 1.5

    def test_reference_value(self):
        event = SpacetimeEvent(0.0, C * 1.0)
        t = boosted_time(event, FrameVelocity(0.5), C)
        gamma = 1.0 / math.sqrt(1 - 0.25)
        assert t == pytest.approx(gamma * (-0.5), abs=1e-12)
        assert t == pytest.approx(-0.5773503, abs=1e-7)

    def test_on_axis_event_dilates(self):
        event = SpacetimeEvent(2.0, 0.0)
        assert boosted_time(event, FrameVelocity(0.8), C) == pytest.approx(
            2.0 / math.sqrt(1 - 0.64), abs=1e-12)

    def test_speed_limit(self):
        with pytest.raises(InputError):
            FrameVelocity(1.0)
        with pytest.raises(InputError):
            FrameVelocity(-1.2)


def test_boost_round_trip():
    rng = np.random.default_rng(31)
    for _ in range(300):
        event = SpacetimeEvent(float(rng.uniform(-10, 10)),
                               float(rng.uniform(-10, 10)) * C)
        beta = float(rng.uniform(-0.95, 0.95))
        there = boost_event(event, FrameVelocity(beta), C)
        back = boost_event(there, FrameVelocity(-beta), C)
        scale = max(1.0, abs(event.t), abs(event.x) / C)
        assert back.t == pytest.approx(event.t, abs=1e-12 * scale)
        assert back.x == pytest.approx(event.x, abs=1e-12 * scale * C)


class TestSpacelike:
    def test_simultaneous_separated(self):
        assert is_spacelike(SpacetimeEvent(0.0, 0.0), SpacetimeEvent(0.0, 1.0), C)

    def test_colocated_sequential(self):
        assert not is_spacelike(SpacetimeEvent(0.0, 0.0), SpacetimeEvent(1.0, 0.0), C)

    def test_wide_separation(self):
        assert is_spacelike(SpacetimeEvent(0.0, 0.0), SpacetimeEvent(1.0, 2 * C), C)

    def test_lightlike_not_spacelike(self):
        assert not is_spacelike(SpacetimeEvent(0.0, 0.0), SpacetimeEvent(1.0, C), C)


class TestBeforeBefore:
    def test_mutually_receding_analyzers_each_see_their_event_first(self):
        # event A at the origin, event B to the right, simultaneous in the lab;
        # A's frame moves toward -x, B's toward +x
        event_a = SpacetimeEvent(0.0, 0.0)
        event_b = SpacetimeEvent(0.0, 1000.0)
        report = before_before_holds(event_a, event_b, -0.5, +0.5, C)
        assert report.spacelike
        assert report.a_first_in_a_frame
        assert report.b_first_in_b_frame
        assert report.holds
        # oracle: signs of gamma beta dx / c
        gamma = 1 / math.sqrt(0.75)
        assert report.times_in_a_frame[1] - report.times_in_a_frame[0] == pytest.approx(
            gamma * 0.5 * 1000.0 / C, rel=1e-12)

    def test_rest_frames_see_simultaneity(self):
        event_a = SpacetimeEvent(0.0, 0.0)
        event_b = SpacetimeEvent(0.0, 1000.0)
        report = before_before_holds(event_a, event_b, 0.0, 0.0, C)
        assert not report.holds  # no strict ordering in either frame

    def test_approaching_analyzers_each_see_the_other_first(self):
        event_a = SpacetimeEvent(0.0, 0.0)
        event_b = SpacetimeEvent(0.0, 1000.0)
        report = before_before_holds(event_a, event_b, +0.5, -0.5, C)
        assert not report.a_first_in_a_frame
        assert not report.b_first_in_b_frame
        assert not report.holds

    def test_timelike_pairs_are_always_false(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            t0 = float(rng.uniform(-1, 1))
            dt = float(rng.uniform(0.1, 2.0))
            dx = float(rng.uniform(-0.99, 0.99)) * C * dt
            event_a = SpacetimeEvent(t0, float(rng.uniform(-1, 1)) * C)
            event_b = SpacetimeEvent(t0 + dt, event_a.x + dx)
            beta_a = float(rng.uniform(-0.99, 0.99))
            beta_b = float(rng.uniform(-0.99, 0.99))
            report = before_before_holds(event_a, event_b, beta_a, beta_b, C)
            assert not report.holds
            assert report.reason == "invariant order"


def test_timelike_order_is_frame_invariant():
    rng = np.random.default_rng(43)
    event_a = SpacetimeEvent(0.0, 0.0)
    event_b = SpacetimeEvent(1.0, 0.4 * C)
    for _ in range(1000):
        beta = float(rng.uniform(-0.999, 0.999))
        frame = FrameVelocity(beta)
        assert boosted_time(event_a, frame, C) < boosted_time(event_b, frame, C)


class TestMinSpeed:
    def test_simultaneous_threshold_zero(self):
        result = min_speed_for_priority(0.0, 1000.0, C)
        assert result.threshold == 0.0
        assert result.direction == -1

    def test_ratio_threshold(self):
        # c dt / dx = 0.3
        result = min_speed_for_priority(0.3, C * 1.0, C)
        assert result.threshold == pytest.approx(0.3, abs=1e-12)

    def test_lightlike_limit_approaches_one(self):
        result = min_speed_for_priority(0.999999, C * 1.0, C)
        assert result.threshold == pytest.approx(1.0, abs=1e-5)
        with pytest.raises(InputError):
            min_speed_for_priority(1.0, C * 1.0, C)

    def test_threshold_side_actually_wins(self):
        rng = np.random.default_rng(47)
        for _ in range(200):
            dt = float(rng.uniform(-1, 1))
            dx = float(rng.choice([-1, 1])) * float(rng.uniform(1.1, 5.0)) * C * max(abs(dt), 0.2)
            if C * abs(dt) >= abs(dx):
                continue
            result = min_speed_for_priority(dt, dx, C)
            beta = result.example_beta()
            frame = FrameVelocity(beta)
            local = SpacetimeEvent(0.0, 0.0)
            remote = SpacetimeEvent(dt, dx)
            assert boosted_time(local, frame, C) < boosted_time(remote, frame, C)


def test_spacelike_pairs_always_admit_a_mutual_first_configuration():
    rng = np.random.default_rng(53)
    for _ in range(200):
        dt = float(rng.uniform(-1, 1))
        dx = float(rng.uniform(1.05, 6.0)) * C * max(abs(dt), 0.1) * float(rng.choice([-1, 1]))
        event_a = SpacetimeEvent(0.0, 0.0)
        event_b = SpacetimeEvent(dt, dx)
        if not is_spacelike(event_a, event_b, C):
            continue
        beta_a = min_speed_for_priority(dt, dx, C).example_beta()
        beta_b = min_speed_for_priority(-dt, -dx, C).example_beta()
        report = before_before_holds(event_a, event_b, beta_a, beta_b, C)
        assert report.holds
