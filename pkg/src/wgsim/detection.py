"""Loss, detector efficiency and Poisson photon counting.

Random numbers come from numpy's Philox4x32-10 counter-based generator,
seeded directly with ``ExperimentConfig.rng_seed``. Poisson variates are
drawn one outcome at a time in the mapping's iteration order, so a given
(distribution, config) always yields the same counts. Independent streams
for scan points use :func:`point_seed`, which spawns children of
``numpy.random.SeedSequence(rng_seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Hashable, Mapping

import numpy as np

from .errors import DomainError, UndefinedVisibilityError
from .interference import DistinguishabilitySpec, coincidence_probability

NO_DETECTION = "no_detection"
DISTRIBUTION_ATOL = 1e-9


@dataclass(frozen=True)
class DetectorSpec:
    efficiency: float = 0.70

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise DomainError(f"detector efficiency must lie in (0, 1], got {self.efficiency}")


@dataclass(frozen=True)
class LossSpec:
    """Per-photon transmission through the chip and fiber coupling."""

    transmission: float = 0.60

    def __post_init__(self):
        if not 0 < self.transmission <= 1:
            raise DomainError(f"transmission must lie in (0, 1], got {self.transmission}")


@dataclass(frozen=True)
class ExperimentConfig:
    pair_rate: float = 4000.0
    integration_time: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if not (self.pair_rate > 0 and math.isfinite(self.pair_rate)):
            raise DomainError("pair rate must be positive")
        if not (self.integration_time > 0 and math.isfinite(self.integration_time)):
            raise DomainError("integration time must be positive")
        if not 0 <= self.rng_seed < 2**64:
            raise DomainError("rng_seed must be a 64-bit unsigned integer")

    @property
    def expected_pairs(self) -> float:
        return self.pair_rate * self.integration_time


def _check_distribution(probs: Mapping[Hashable, float]) -> None:
    vals = np.array(list(probs.values()), dtype=float)
    if vals.size == 0 or np.any(vals < -DISTRIBUTION_ATOL) or abs(vals.sum() - 1) > DISTRIBUTION_ATOL:
        raise DomainError(f"outcome probabilities must be non-negative and sum to 1 (sum={vals.sum()})")


def detected_pair_probability(event_probs: Mapping[Hashable, float], loss: LossSpec = LossSpec(),
                              det: DetectorSpec = DetectorSpec()) -> dict[Hashable, float]:
    """Scale two-photon outcomes by ``(transmission * efficiency)^2``.

    Uniform loss commutes with a linear network, so it is applied once at
    the outputs. The removed mass is returned under ``NO_DETECTION``.
    """
    _check_distribution(event_probs)
    keep = (loss.transmission * det.efficiency) ** 2
    out = {k: max(0.0, float(p)) * keep for k, p in event_probs.items() if k != NO_DETECTION}
    out[NO_DETECTION] = max(0.0, 1.0 - sum(out.values()))
    return out


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def point_seed(seed: int, index: int) -> int:
    """Seed for scan point ``index``, derived from the run seed."""
    child = np.random.SeedSequence(seed).spawn(index + 1)[index]
    return int(child.generate_state(1, np.uint64)[0])


def sample_counts(outcome_probs: Mapping[Hashable, float], cfg: ExperimentConfig) -> dict[Hashable, int]:
    """Independent Poisson counts with mean ``pair_rate * integration_time * p``."""
    _check_distribution(outcome_probs)
    rng = make_rng(cfg.rng_seed)
    counts = {}
    for outcome, p in outcome_probs.items():
        mean = cfg.expected_pairs * max(0.0, float(p))
        counts[outcome] = int(rng.poisson(mean)) if mean > 0 else 0
    return counts


def estimate_visibility(counts_dip: int, counts_baseline: int) -> tuple[float, float]:
    """``V = (baseline - dip) / baseline`` with its Poisson standard error."""
    if counts_baseline <= 0:
        raise UndefinedVisibilityError("baseline has no counts")
    if counts_dip < 0:
        raise DomainError("counts cannot be negative")
    b, d = float(counts_baseline), float(counts_dip)
    v = (b - d) / b
    err = math.sqrt(d / b**2 + d**2 * b / b**4)
    return v, err


def sample_hom_visibility(eta: float, d: DistinguishabilitySpec, cfg: ExperimentConfig,
                          loss: LossSpec = LossSpec(), det: DetectorSpec = DetectorSpec()
                          ) -> tuple[int, int, float, float]:
    """Count coincidences at zero delay and far from the dip.

    Each point runs for the full integration time on its own stream from
    :func:`point_seed`. Returns ``(dip counts, baseline counts, V, error)``.
    """
    dip_p = coincidence_probability(eta, d)
    base_p = coincidence_probability(eta, replace(d, gamma=0.0))
    counts = []
    for i, p in enumerate((dip_p, base_p)):
        probs = detected_pair_probability({"coincidence": p, "other": 1.0 - p}, loss, det)
        point = replace(cfg, rng_seed=point_seed(cfg.rng_seed, i))
        counts.append(sample_counts(probs, point)["coincidence"])
    v, err = estimate_visibility(*counts)
    return counts[0], counts[1], v, err
