"""Lorentz time ordering for measurement events in 1+1 dimensions.

Used to reason about configurations where each analyzer, judged in its own
rest frame, acts strictly before the remote one. Such a mutual ordering can
exist only for spacelike separated events; for timelike pairs the order is
the same in every frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SpacetimeEvent:
    """Lab-frame coordinates: time in seconds, position in meters."""

    t: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise InputError("event coordinates must be finite")


@dataclass(frozen=True)
class FrameVelocity:
    """Boost parameter beta = v/c of an inertial frame along the x axis."""

    beta: float

    def __post_init__(self):
        if not math.isfinite(self.beta) or abs(self.beta) >= 1.0:
            raise InputError(f"|beta| must be < 1, got {self.beta}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta * self.beta)


def boosted_time(event: SpacetimeEvent, frame: FrameVelocity,
                 c: float = SPEED_OF_LIGHT) -> float:
    """Time coordinate of the event in the boosted frame: gamma (t - beta x / c)."""
    if c <= 0:
        raise InputError("speed of light must be positive")
    return frame.gamma * (event.t - frame.beta * event.x / c)


def boost_event(event: SpacetimeEvent, frame: FrameVelocity,
                c: float = SPEED_OF_LIGHT) -> SpacetimeEvent:
    """Full coordinate transform; boosting by beta then -beta is the identity."""
    if c <= 0:
        raise InputError("speed of light must be positive")
    g, b = frame.gamma, frame.beta
    return SpacetimeEvent(
        t=g * (event.t - b * event.x / c),
        x=g * (event.x - b * c * event.t),
    )


def is_spacelike(event_a: SpacetimeEvent, event_b: SpacetimeEvent,
                 c: float = SPEED_OF_LIGHT) -> bool:
    """True when no signal at speed <= c can connect the two events."""
    if c <= 0:
        raise InputError("speed of light must be positive")
    return c * abs(event_b.t - event_a.t) < abs(event_b.x - event_a.x)


@dataclass(frozen=True)
class BeforeBeforeReport:
    holds: bool
    a_first_in_a_frame: bool
    b_first_in_b_frame: bool
    spacelike: bool
    times_in_a_frame: tuple[float, float]
    times_in_b_frame: tuple[float, float]
    reason: str = ""


def before_before_holds(event_a: SpacetimeEvent, event_b: SpacetimeEvent,
                        beta_a: float, beta_b: float,
                        c: float = SPEED_OF_LIGHT) -> BeforeBeforeReport:
    """Each event strictly first in its own analyzer's frame.

    True iff event A precedes event B in the frame moving at beta_a and event
    B precedes event A in the frame moving at beta_b. Simultaneity in a frame
    does not count. Timelike separated events keep one invariant order, so
    the answer is False for them in every pair of frames.
    """
    frame_a = FrameVelocity(beta_a)
    frame_b = FrameVelocity(beta_b)
    ta_a = boosted_time(event_a, frame_a, c)
    tb_a = boosted_time(event_b, frame_a, c)
    ta_b = boosted_time(event_a, frame_b, c)
    tb_b = boosted_time(event_b, frame_b, c)
    spacelike = is_spacelike(event_a, event_b, c)
    a_first = ta_a < tb_a
    b_first = tb_b < ta_b
    holds = a_first and b_first
    reason = ""
    if not spacelike:
        holds = False
        reason = "invariant order"
    return BeforeBeforeReport(
        holds=holds,
        a_first_in_a_frame=a_first,
        b_first_in_b_frame=b_first,
        spacelike=spacelike,
        times_in_a_frame=(ta_a, tb_a),
        times_in_b_frame=(tb_b, ta_b),
        reason=reason,
    )


@dataclass(frozen=True)
class PriorityThreshold:
    """Boundary frame velocity at which the local/remote time order flips.

    ``boundary`` is the signed beta where gamma (delta_t - beta delta_x / c)
    changes sign, ``threshold`` its magnitude. The local event precedes the
    remote one exactly in frames with direction * (beta - boundary) > 0.
    """

    threshold: float
    boundary: float
    direction: int

    def example_beta(self, margin: float | None = None) -> float:
        """A frame velocity strictly on the winning side of the boundary.

        Defaults to halfway between the boundary and the light-speed limit.
        """
        if margin is None:
            margin = 0.5 * (1.0 - self.direction * self.boundary)
        beta = self.boundary + self.direction * margin
        if abs(beta) >= 1.0:
            raise InputError("margin pushes the frame past the speed of light")
        return beta


def min_speed_for_priority(delta_t: float, delta_x: float,
                           c: float = SPEED_OF_LIGHT) -> PriorityThreshold:
    """Frame-speed boundary for the local event to precede the remote one.

    ``delta_t``/``delta_x`` are remote minus local coordinates of two
    spacelike separated events. The local event is first in a frame moving at
    beta exactly when gamma (delta_t - beta delta_x / c) > 0, so the boundary
    sits at beta = c delta_t / delta_x; for simultaneous lab events the
    threshold is 0 and any speed on the winning side suffices, while in the
    lightlike limit it approaches 1.
    """
    if c <= 0:
        raise InputError("speed of light must be positive")
    if delta_x == 0 or c * abs(delta_t) >= abs(delta_x):
        raise InputError("no such frame: events are not spacelike separated")
    signed = c * delta_t / delta_x
    direction = -1 if delta_x > 0 else 1
    return PriorityThreshold(threshold=abs(signed), boundary=signed,
                             direction=direction)
