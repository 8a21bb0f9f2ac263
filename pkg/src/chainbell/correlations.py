"""Outcome distributions and correlation models for cyclic two-party experiments.

A measurement round involves one setting on each side; its statistics are a
JointDistribution over the four outcome pairs. A ChainConfig lists the 2N
setting pairs evaluated by the cyclic functional: 2N-1 adjacent pairs that
share a rung of the setting ladder plus one closing pair. Models (quantum
with finite visibility, deterministic local strategies, the perfectly
correlated no-signaling box, convex mixtures) supply a JointDistribution for
every setting combination, which is what the no-signaling check needs.

Quantum statistics for a pair with phase ``phi`` and visibility ``v``::

    Pr(a = b)  = (1 + v cos phi) / 2
    Pr(a != b) = (1 - v cos phi) / 2

Only the equal/unequal split is physical here; each mass is divided evenly
between its two outcome pairs, which makes every marginal exactly 1/2 and the
models manifestly no-signaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import InputError

PLUS = 1
MINUS = -1
OUTCOMES = (PLUS, MINUS)

#: Fixed index order of outcome pairs in tables and count arrays.
OUTCOME_PAIRS = ((PLUS, PLUS), (PLUS, MINUS), (MINUS, PLUS), (MINUS, MINUS))

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class InterferometerArms:
    """Geometry of the two unbalanced interferometers.

    ``omega_a``/``omega_b`` are angular frequencies in rad/s, the arm lengths
    are in meters and ``c`` in m/s. Long arms must not be shorter than the
    short arms.
    """

    omega_a: float
    omega_b: float
    l_a: float
    s_a: float
    l_b: float
    s_b: float
    c: float = 299_792_458.0

    def __post_init__(self):
        if self.c <= 0:
            raise InputError("speed of light must be positive")
        if self.omega_a <= 0 or self.omega_b <= 0:
            raise InputError("angular frequencies must be positive")
        for name in ("l_a", "s_a", "l_b", "s_b"):
            if getattr(self, name) < 0:
                raise InputError(f"arm length {name} must be non-negative")
        if self.l_a < self.s_a or self.l_b < self.s_b:
            raise InputError("long arm shorter than short arm")


def phase_from_arms(arms: InterferometerArms) -> float:
    """Phase accumulated over the long-minus-short path difference of both sides."""
    return (
        arms.omega_a * (arms.l_a - arms.s_a) / arms.c
        + arms.omega_b * (arms.l_b - arms.s_b) / arms.c
    )


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over the four outcome pairs, ordered as OUTCOME_PAIRS."""

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self):
        for p in self.as_tuple():
            if not (-NORMALIZATION_TOL <= p <= 1 + NORMALIZATION_TOL):
                raise InputError(f"probability {p} outside [0, 1]")
        total = (self.p_pp + self.p_pm) + (self.p_mp + self.p_mm)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InputError(f"probabilities sum to {total}, not 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    @property
    def pr_equal(self) -> float:
        return self.p_pp + self.p_mm

    @property
    def pr_diff(self) -> float:
        return self.p_pm + self.p_mp

    @classmethod
    def from_equal_mass(cls, pr_equal: float) -> "JointDistribution":
        """Split the equal and unequal masses evenly, giving uniform marginals."""
        if not (-NORMALIZATION_TOL <= pr_equal <= 1 + NORMALIZATION_TOL):
            raise InputError(f"pr_equal {pr_equal} outside [0, 1]")
        he = 0.5 * pr_equal
        hd = 0.5 * (1.0 - pr_equal)
        return cls(he, hd, hd, he)

    @classmethod
    def point_mass(cls, a: int, b: int) -> "JointDistribution":
        if a not in OUTCOMES or b not in OUTCOMES:
            raise InputError(f"outcomes must be +1 or -1, got ({a}, {b})")
        table = [0.0, 0.0, 0.0, 0.0]
        table[OUTCOME_PAIRS.index((a, b))] = 1.0
        return cls(*table)

    @classmethod
    def uniform(cls) -> "JointDistribution":
        return cls(0.25, 0.25, 0.25, 0.25)

    @classmethod
    def mix(cls, parts: Sequence["JointDistribution"], weights: Sequence[float]) -> "JointDistribution":
        if len(parts) != len(weights) or not parts:
            raise InputError("mixture needs matching non-empty parts and weights")
        table = [0.0, 0.0, 0.0, 0.0]
        for part, w in zip(parts, weights):
            for i, p in enumerate(part.as_tuple()):
                table[i] += w * p
        return cls(*table)


def quantum_joint(phi: float, v: float) -> JointDistribution:
    """Joint distribution of one setting pair at phase ``phi`` and visibility ``v``."""
    if not 0.0 <= v <= 1.0:
        raise InputError(f"visibility {v} outside [0, 1]")
    if not math.isfinite(phi):
        raise InputError("phase must be finite")
    vc = v * math.cos(phi)
    return JointDistribution(0.25 * (1.0 + vc), 0.25 * (1.0 - vc),
                             0.25 * (1.0 - vc), 0.25 * (1.0 + vc))


def marginal(joint: JointDistribution, party: str) -> float:
    """Probability that the given party ('A' or 'B') outputs +1."""
    if party == "A":
        return joint.p_pp + joint.p_pm
    if party == "B":
        return joint.p_pp + joint.p_mp
    raise InputError(f"party must be 'A' or 'B', got {party!r}")


def statistical_distance_to_uniform(p_plus: float) -> float:
    """Total variation distance of a binary distribution from the uniform one."""
    if not 0.0 <= p_plus <= 1.0:
        raise InputError(f"probability {p_plus} outside [0, 1]")
    return abs(p_plus - 0.5)


# --- chain configuration -----------------------------------------------------

ADJACENT = "adjacent"
CLOSING = "closing"
CROSS = "cross"


@dataclass(frozen=True)
class SettingPair:
    """One evaluated setting pair: A-side index, B-side index, role in the cycle."""

    a_index: int
    b_index: int
    kind: str
    term_index: int
    phase_multiplier: int


@dataclass(frozen=True)
class ChainConfig:
    """Chain order, total phase and the 2N evaluated setting pairs.

    A-side settings sit on the even rungs of the setting ladder, B-side
    settings on the odd rungs. Under equipartition every adjacent pair gets
    phase theta/2N and the closing pair (A0, B(N-1)) gets (2N-1) theta/2N.
    """

    n: int
    theta: float
    visibility: float = 1.0
    pairs: tuple[SettingPair, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InputError(f"chain order must be an integer >= 2, got {self.n}")
        if not math.isfinite(self.theta):
            raise InputError("theta must be finite")
        if not 0.0 <= self.visibility <= 1.0:
            raise InputError(f"visibility {self.visibility} outside [0, 1]")
        pairs = [SettingPair(0, self.n - 1, CLOSING, 0, 2 * self.n - 1)]
        for rung in range(2 * self.n - 1):
            if rung % 2 == 0:
                a, b = rung // 2, rung // 2
            else:
                a, b = (rung + 1) // 2, (rung - 1) // 2
            pairs.append(SettingPair(a, b, ADJACENT, rung + 1, 1))
        object.__setattr__(self, "pairs", tuple(pairs))

    @property
    def delta(self) -> float:
        """Equipartition phase step theta / 2N."""
        return self.theta / (2 * self.n)

    def pair_phase(self, pair: SettingPair) -> float:
        return pair.phase_multiplier * self.delta

    def pair_role(self, a_index: int, b_index: int) -> str:
        self._check_indices(a_index, b_index)
        if a_index == 0 and b_index == self.n - 1:
            return CLOSING
        if b_index == a_index or b_index == a_index - 1:
            return ADJACENT
        return CROSS

    def setting_phase(self, a_index: int, b_index: int) -> float:
        """Phase of an arbitrary setting combination on the equipartition ladder."""
        self._check_indices(a_index, b_index)
        return abs(2 * b_index + 1 - 2 * a_index) * self.delta

    def term_index_of(self, a_index: int, b_index: int) -> int:
        """Functional term index of a combination, or -1 if it is not evaluated."""
        self._check_indices(a_index, b_index)
        if a_index == 0 and b_index == self.n - 1:
            return 0
        if b_index == a_index:
            return 2 * a_index + 1
        if b_index == a_index - 1:
            return 2 * a_index
        return -1

    def _check_indices(self, a_index: int, b_index: int) -> None:
        if not (0 <= a_index < self.n and 0 <= b_index < self.n):
            raise InputError(
                f"setting indices ({a_index}, {b_index}) outside 0..{self.n - 1}")


# --- models -------------------------------------------------------------------


@dataclass(frozen=True)
class LocalStrategy:
    """Deterministic outcome assignment, one per setting on each side."""

    a_outcomes: tuple[int, ...]
    b_outcomes: tuple[int, ...]

    def __post_init__(self):
        if len(self.a_outcomes) != len(self.b_outcomes):
            raise InputError("strategy sides must have equal length")
        for out in (*self.a_outcomes, *self.b_outcomes):
            if out not in OUTCOMES:
                raise InputError(f"strategy outcome {out} must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.a_outcomes)


def lhv_joint(strategy: LocalStrategy, a_index: int, b_index: int) -> JointDistribution:
    """Point mass on the strategy's outcomes for one setting combination."""
    if not (0 <= a_index < strategy.n and 0 <= b_index < strategy.n):
        raise InputError(
            f"strategy has no assignment for settings ({a_index}, {b_index})")
    return JointDistribution.point_mass(strategy.a_outcomes[a_index],
                                        strategy.b_outcomes[b_index])


class QuantumModel:
    """Visibility-v quantum statistics on the equipartition setting ladder."""

    def __init__(self, v: float = 1.0):
        if not 0.0 <= v <= 1.0:
            raise InputError(f"visibility {v} outside [0, 1]")
        self.v = v

    def joint(self, config: ChainConfig, a_index: int, b_index: int) -> JointDistribution:
        return quantum_joint(config.setting_phase(a_index, b_index), self.v)

    def __repr__(self):
        return f"QuantumModel(v={self.v})"


class DeterministicLocalModel:
    """Local hidden-variable model given by one deterministic strategy."""

    def __init__(self, strategy: LocalStrategy):
        self.strategy = strategy

    def joint(self, config: ChainConfig, a_index: int, b_index: int) -> JointDistribution:
        if self.strategy.n != config.n:
            raise InputError(
                f"strategy covers {self.strategy.n} settings, config needs {config.n}")
        return lhv_joint(self.strategy, a_index, b_index)

    def __repr__(self):
        return f"DeterministicLocalModel({self.strategy})"


class ChainedNLBoxModel:
    """Maximal cyclic no-signaling box.

    Adjacent pairs are perfectly correlated with uniform marginals, the
    closing pair perfectly anti-correlated; setting combinations outside the
    cycle are independent uniform, the minimal no-signaling completion.
    """

    def joint(self, config: ChainConfig, a_index: int, b_index: int) -> JointDistribution:
        role = config.pair_role(a_index, b_index)
        if role == ADJACENT:
            return JointDistribution(0.5, 0.0, 0.0, 0.5)
        if role == CLOSING:
            return JointDistribution(0.0, 0.5, 0.5, 0.0)
        return JointDistribution.uniform()

    def __repr__(self):
        return "ChainedNLBoxModel()"


class MixtureModel:
    """Convex combination of component models."""

    def __init__(self, components: Sequence, weights: Sequence[float]):
        if len(components) != len(weights) or not components:
            raise InputError("mixture needs matching non-empty components and weights")
        if any(w < 0 for w in weights):
            raise InputError("mixture weights must be non-negative")
        if abs(sum(weights) - 1.0) > NORMALIZATION_TOL:
            raise InputError(f"mixture weights sum to {sum(weights)}, not 1")
        self.components = tuple(components)
        self.weights = tuple(float(w) for w in weights)

    def joint(self, config: ChainConfig, a_index: int, b_index: int) -> JointDistribution:
        parts = [c.joint(config, a_index, b_index) for c in self.components]
        return JointDistribution.mix(parts, self.weights)

    def __repr__(self):
        return f"MixtureModel(weights={self.weights})"


class PairRuleModel:
    """Model defined by an explicit rule (config, a_index, b_index) -> JointDistribution.

    Plumbing for synthetic families and constructed counterexamples.
    """

    def __init__(self, rule: Callable[[ChainConfig, int, int], JointDistribution],
                 label: str = "pair-rule"):
        self.rule = rule
        self.label = label

    def joint(self, config: ChainConfig, a_index: int, b_index: int) -> JointDistribution:
        out = self.rule(config, a_index, b_index)
        if out is None:
            raise InputError(
                f"model {self.label} undefined on settings ({a_index}, {b_index})")
        return out

    def __repr__(self):
        return f"PairRuleModel({self.label})"


def chained_nlbox_joint(config: ChainConfig, a_index: int, b_index: int) -> JointDistribution:
    """Distribution of the cyclic no-signaling box for one setting combination."""
    return ChainedNLBoxModel().joint(config, a_index, b_index)


# --- no-signaling -------------------------------------------------------------


@dataclass(frozen=True)
class NoSignalingReport:
    passed: bool
    max_deviation: float
    failures: tuple[tuple[str, int, int, int, float], ...]
    """Entries (party, own_setting, other_setting_1, other_setting_2, deviation)."""


def no_signaling_check(model, config: ChainConfig, tol: float = 1e-12) -> NoSignalingReport:
    """Verify each party's marginals are independent of the remote setting.

    Scans all N x N setting combinations; a failure names the own setting and
    the two remote settings whose marginals disagree by more than ``tol``.
    """
    n = config.n
    failures = []
    worst = 0.0
    for party in ("A", "B"):
        for own in range(n):
            margs = []
            for other in range(n):
                a, b = (own, other) if party == "A" else (other, own)
                margs.append(marginal(model.joint(config, a, b), party))
            for other in range(1, n):
                dev = abs(margs[other] - margs[0])
                worst = max(worst, dev)
                if dev > tol:
                    failures.append((party, own, 0, other, dev))
    return NoSignalingReport(not failures, worst, tuple(failures))


# --- theta-parameterized families ----------------------------------------------


@dataclass(frozen=True)
class CorrelationFamily:
    """A model-valued function of the total phase theta.

    ``phase_response``, when given, is the family's single-pair equal-outcome
    probability as a function of the pair phase; families without one (the
    box, deterministic strategies) are checked pair-by-pair only.
    """

    name: str
    n: int
    model_at: Callable[[float], object]
    theta_min: float = -math.inf
    theta_max: float = math.inf
    visibility: float = 1.0
    phase_response: Callable[[float], float] | None = None

    def in_domain(self, theta: float) -> bool:
        return self.theta_min <= theta <= self.theta_max

    def config_at(self, theta: float, n: int | None = None) -> ChainConfig:
        if not self.in_domain(theta):
            raise InputError(
                f"theta {theta} outside declared domain "
                f"[{self.theta_min}, {self.theta_max}] of family {self.name}")
        return ChainConfig(n if n is not None else self.n, theta, self.visibility)


def quantum_family(n: int, v: float = 1.0) -> CorrelationFamily:
    model = QuantumModel(v)
    return CorrelationFamily(
        name=f"quantum(v={v})",
        n=n,
        model_at=lambda theta: model,
        visibility=v,
        phase_response=lambda phi: 0.5 * (1.0 + v * math.cos(phi)),
    )


def nlbox_family(n: int) -> CorrelationFamily:
    model = ChainedNLBoxModel()
    return CorrelationFamily(name="chained-nl-box", n=n, model_at=lambda theta: model)


def deterministic_family(n: int, strategy: LocalStrategy) -> CorrelationFamily:
    model = DeterministicLocalModel(strategy)
    return CorrelationFamily(name="deterministic-local", n=n, model_at=lambda theta: model)
