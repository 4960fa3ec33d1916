"""
Pair-by-pair coincidence sampling.

Random numbers come from numpy's PCG64DXSM bit generator. Every block of
``SHARD_SIZE`` consecutive pairs gets its own stream, seeded through
``SeedSequence(seed, spawn_key=(purpose, stream, shard))``, so results do not
depend on how many threads process the shards: the per-shard integer counts
are simply summed.

Noise model (all off by default):

* depolarization ``d`` replaces rho by (1-d) rho + d I/4 before sampling;
* each photon is detected with probability ``detector_efficiency``;
* a side whose photon was lost registers a dark count with probability
  ``dark_count_probability``, on a uniformly random detector;
* only pairs with a click on both sides count as coincidences.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .polarization import MeasurementSetting, TwoPhotonState, depolarize, outcome_probabilities
from .security import CoincidenceCounts, WignerSettings

SHARD_SIZE = 1 << 16

# spawn-key purposes; keep stable, they define the reproducible streams
STREAM_COUNTS = 0
STREAM_SETTINGS = 1
STREAM_OUTCOMES = 2
STREAM_SACRIFICE = 3


@dataclass(frozen=True)
class NoiseModel:
    detector_efficiency: float = 1.0
    dark_count_probability: float = 0.0
    depolarization: float = 0.0

    def __post_init__(self):
        for name in ("detector_efficiency", "dark_count_probability", "depolarization"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")

    @property
    def ideal(self) -> bool:
        return self.detector_efficiency == 1.0 and self.dark_count_probability == 0.0 and self.depolarization == 0.0

    @property
    def lossy(self) -> bool:
        return self.detector_efficiency < 1.0 or self.dark_count_probability > 0.0


@dataclass(frozen=True)
class SamplerConfig:
    n_pairs: int
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        if int(self.n_pairs) != self.n_pairs or self.n_pairs < 1:
            raise ValueError(f"n_pairs must be a positive integer, got {self.n_pairs!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for one named substream of ``seed``."""
    return np.random.Generator(np.random.PCG64DXSM(np.random.SeedSequence(seed, spawn_key=key)))


def shard_bounds(n_pairs: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + SHARD_SIZE, n_pairs)) for lo in range(0, n_pairs, SHARD_SIZE)]


def map_shards(fn, n_pairs: int, threads: int = 1) -> list:
    """Apply ``fn(shard_index, lo, hi)`` to every shard, in shard order."""
    jobs = [(i, lo, hi) for i, (lo, hi) in enumerate(shard_bounds(n_pairs))]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda j: fn(*j), jobs))
    return [fn(*j) for j in jobs]


def draw_outcomes(rng: np.random.Generator, probs: np.ndarray, size: int) -> np.ndarray:
    """Outcome indices 0..3 (++, +-, -+, --) drawn i.i.d. from ``probs``."""
    p = np.asarray(probs, dtype=float)
    return rng.choice(4, size=size, p=p / p.sum()).astype(np.int8)


def apply_detection(rng: np.random.Generator, outcomes: np.ndarray, noise: NoiseModel):
    """Detector loss and dark counts.

    Returns ``(outcomes, valid)``: possibly relabelled outcome indices and a
    mask of pairs that still give a coincidence.
    """
    n = outcomes.shape[0]
    if not noise.lossy:
        return outcomes, np.ones(n, dtype=bool)
    bits = [(outcomes >> 1) & 1, outcomes & 1]  # Alice, Bob; 0 is "+"
    clicked = []
    for side in range(2):
        detected = rng.random(n) < noise.detector_efficiency
        dark = ~detected & (rng.random(n) < noise.dark_count_probability)
        dark_bit = rng.integers(0, 2, size=n, dtype=np.int8)
        bits[side] = np.where(dark, dark_bit, bits[side])
        clicked.append(detected | dark)
    return (2 * bits[0] + bits[1]).astype(np.int8), clicked[0] & clicked[1]


def effective_probabilities(state: TwoPhotonState, setting: MeasurementSetting, noise: NoiseModel) -> np.ndarray:
    return outcome_probabilities(depolarize(state, noise.depolarization).rho, setting)


def sample_counts(state: TwoPhotonState, setting: MeasurementSetting, config: SamplerConfig,
                  stream: int = 0, threads: int = 1) -> CoincidenceCounts:
    """Simulate ``config.n_pairs`` pairs at one setting and count coincidences.

    ``stream`` selects an independent substream of ``config.seed``.
    """
    probs = effective_probabilities(state, setting, config.noise)

    def shard(i, lo, hi):
        rng = make_rng(config.seed, STREAM_COUNTS, stream, i)
        outcomes = draw_outcomes(rng, probs, hi - lo)
        outcomes, valid = apply_detection(rng, outcomes, config.noise)
        return np.bincount(outcomes[valid], minlength=4).astype(np.int64)

    total = sum(map_shards(shard, config.n_pairs, threads), np.zeros(4, dtype=np.int64))
    return CoincidenceCounts.from_array(total)


def run_wigner_experiment(state: TwoPhotonState, settings: WignerSettings | None, config: SamplerConfig,
                          threads: int = 1) -> dict[MeasurementSetting, CoincidenceCounts]:
    """Measure every setting pair W and W~ need, ``n_pairs`` each, on separate substreams."""
    settings = settings or WignerSettings()
    out = {}
    for k, setting in enumerate(settings.term_settings()):
        out[setting] = sample_counts(state, setting, config, stream=k, threads=threads)
    return out
