"""
Ekert key distribution with the Wigner test.

A session runs pair by pair: Alice and Bob each pick an analyzer angle at
random, the (possibly attacked) source emits a pair, and the joint outcome
is drawn from the Born rule. Afterwards

* pairs where both used the key setting (0 deg, 0 deg) form the sifted key.
  Alice's bit is her outcome (+ -> 0, - -> 1); Bob's bit is the complement
  of his, because the singlet is perfectly anticorrelated;
* a random fraction of those key pairs is sacrificed: it is removed from
  the key and used to estimate both the QBER and the p(0,0)(-,-) term of W~;
* the other three setting combinations give the terms of W.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .attacks import AttackStrategy, realize_attack
from .montecarlo import (
    STREAM_OUTCOMES,
    STREAM_SACRIFICE,
    STREAM_SETTINGS,
    SamplerConfig,
    apply_detection,
    draw_outcomes,
    effective_probabilities,
    make_rng,
    map_shards,
)
from .polarization import MeasurementSetting, PolarizationAngle, deg
from .security import CoincidenceCounts, MissingSetting, WignerResult, WignerSettings, estimate_wigner

DEFAULT_SACRIFICE_FRACTION = 0.1


class InsufficientStatistics(RuntimeError):
    """A setting combination needed for the security test was never observed."""


class Verdict(str, enum.Enum):
    SECURE = "Secure"
    COMPROMISED = "Compromised"
    INCONCLUSIVE = "Inconclusive"


def _uniform(n):
    return tuple([1.0 / n] * n)


@dataclass(frozen=True)
class PartySettingsPolicy:
    """Analyzer angles each party chooses from, and with what probabilities."""

    alice_choices: tuple[PolarizationAngle, ...] = field(default_factory=lambda: (deg(-30), deg(0)))
    bob_choices: tuple[PolarizationAngle, ...] = field(default_factory=lambda: (deg(0), deg(30)))
    alice_probabilities: tuple[float, ...] | None = None
    bob_probabilities: tuple[float, ...] | None = None

    def __post_init__(self):
        for side in ("alice", "bob"):
            choices = tuple(PolarizationAngle(c) if not isinstance(c, PolarizationAngle) else c
                            for c in getattr(self, f"{side}_choices"))
            if not choices:
                raise ValueError(f"{side}_choices must not be empty")
            object.__setattr__(self, f"{side}_choices", choices)
            probs = getattr(self, f"{side}_probabilities")
            probs = _uniform(len(choices)) if probs is None else tuple(float(p) for p in probs)
            if len(probs) != len(choices) or any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
                raise ValueError(f"{side}_probabilities must be {len(choices)} non-negative numbers summing to 1")
            object.__setattr__(self, f"{side}_probabilities", probs)

    @classmethod
    def from_degrees(cls, alice=(-30.0, 0.0), bob=(0.0, 30.0), alice_probabilities=None, bob_probabilities=None):
        return cls(tuple(deg(a) for a in alice), tuple(deg(b) for b in bob),
                   alice_probabilities, bob_probabilities)

    def to_dict(self):
        return {
            "alice_choices_deg": [a.degrees for a in self.alice_choices],
            "bob_choices_deg": [b.degrees for b in self.bob_choices],
            "alice_probabilities": list(self.alice_probabilities),
            "bob_probabilities": list(self.bob_probabilities),
        }


def _index_of(choices, angle: PolarizationAngle) -> int:
    for i, c in enumerate(choices):
        if MeasurementSetting(c, c).close_to(MeasurementSetting(angle, angle)):
            return i
    return -1


@dataclass(frozen=True, eq=False)
class SessionRecord:
    """Everything a session produced.

    The per-pair log is three arrays: the index into the policy's choices
    for each party and the joint outcome index (0..3 as ++, +-, -+, --, or
    -1 when no coincidence was registered).
    """

    policy: PartySettingsPolicy
    settings: WignerSettings
    strategy: AttackStrategy
    n_pairs: int
    alice_setting: np.ndarray
    bob_setting: np.ndarray
    outcome: np.ndarray
    sifted_key_alice: np.ndarray
    sifted_key_bob: np.ndarray
    test_mask: np.ndarray
    counts: dict
    wigner: WignerResult
    qber_estimate: float
    key_fraction: float
    sacrifice_fraction: float

    @property
    def final_key_alice(self) -> np.ndarray:
        return self.sifted_key_alice[~self.test_mask]

    @property
    def final_key_bob(self) -> np.ndarray:
        return self.sifted_key_bob[~self.test_mask]

    def to_dict(self, include_keys: bool = False, include_log: bool = False) -> dict:
        d = {
            "strategy": self.strategy.to_dict(),
            "policy": self.policy.to_dict(),
            "wigner_settings_deg": self.settings.as_degrees(),
            "n_pairs": self.n_pairs,
            "coincidences": int(np.count_nonzero(self.outcome >= 0)),
            "counts": [
                {"alice_deg": s.alpha_a.degrees, "bob_deg": s.alpha_b.degrees, **c.to_dict()}
                for s, c in self.counts.items()
            ],
            "wigner": self.wigner.to_dict(),
            "qber_estimate": self.qber_estimate,
            "sifted_key_length": int(self.sifted_key_alice.size),
            "sacrificed_bits": int(self.test_mask.sum()),
            "final_key_length": int(self.final_key_alice.size),
            "final_key_mismatches": int(np.count_nonzero(self.final_key_alice != self.final_key_bob)),
            "key_fraction": self.key_fraction,
            "sacrifice_fraction": self.sacrifice_fraction,
        }
        if include_keys:
            d["sifted_key_alice"] = "".join(map(str, self.sifted_key_alice.tolist()))
            d["sifted_key_bob"] = "".join(map(str, self.sifted_key_bob.tolist()))
            d["test_positions"] = np.flatnonzero(self.test_mask).tolist()
        if include_log:
            a = [c.degrees for c in self.policy.alice_choices]
            b = [c.degrees for c in self.policy.bob_choices]
            labels = ("++", "+-", "-+", "--")
            d["pairs"] = [
                {"alice_deg": a[i], "bob_deg": b[j], "outcome": labels[o] if o >= 0 else None}
                for i, j, o in zip(self.alice_setting.tolist(), self.bob_setting.tolist(), self.outcome.tolist())
            ]
        return d


def run_session(strategy: AttackStrategy, policy: PartySettingsPolicy | None = None,
                config: SamplerConfig | None = None, settings: WignerSettings | None = None,
                sacrifice_fraction: float = DEFAULT_SACRIFICE_FRACTION, threads: int = 1) -> SessionRecord:
    """Run one key-distribution session under ``strategy``."""
    policy = policy or PartySettingsPolicy()
    config = config or SamplerConfig(n_pairs=100_000)
    settings = settings or WignerSettings()
    if not 0.0 < sacrifice_fraction < 1.0:
        raise ValueError("sacrifice_fraction must lie in (0, 1)")

    state = realize_attack(strategy)
    na, nb = len(policy.alice_choices), len(policy.bob_choices)
    probs = np.array([
        [effective_probabilities(state, MeasurementSetting(a, b), config.noise) for b in policy.bob_choices]
        for a in policy.alice_choices
    ])
    pa, pb = np.array(policy.alice_probabilities), np.array(policy.bob_probabilities)

    def shard(i, lo, hi):
        n = hi - lo
        rng_s = make_rng(config.seed, STREAM_SETTINGS, 0, i)
        ia = rng_s.choice(na, size=n, p=pa).astype(np.int16)
        ib = rng_s.choice(nb, size=n, p=pb).astype(np.int16)
        rng_o = make_rng(config.seed, STREAM_OUTCOMES, 0, i)
        out = np.full(n, -1, dtype=np.int8)
        for a in range(na):
            for b in range(nb):
                sel = np.flatnonzero((ia == a) & (ib == b))
                if sel.size == 0:
                    continue
                o = draw_outcomes(rng_o, probs[a, b], sel.size)
                o, valid = apply_detection(rng_o, o, config.noise)
                out[sel] = np.where(valid, o, -1)
        return ia, ib, out

    parts = map_shards(shard, config.n_pairs, threads)
    ia = np.concatenate([p[0] for p in parts])
    ib = np.concatenate([p[1] for p in parts])
    out = np.concatenate([p[2] for p in parts])

    counts = {}
    for a in range(na):
        for b in range(nb):
            sel = (ia == a) & (ib == b) & (out >= 0)
            counts[MeasurementSetting(policy.alice_choices[a], policy.bob_choices[b])] = \
                CoincidenceCounts.from_array(np.bincount(out[sel], minlength=4))

    key = settings.key_setting
    ka, kb = _index_of(policy.alice_choices, key.alpha_a), _index_of(policy.bob_choices, key.alpha_b)
    if ka < 0 or kb < 0:
        raise InsufficientStatistics(f"policy never selects the key setting {key}")
    key_pairs = np.flatnonzero((ia == ka) & (ib == kb) & (out >= 0))
    key_out = out[key_pairs]
    alice_bits = ((key_out >> 1) & 1).astype(np.uint8)
    bob_bits = (1 - (key_out & 1)).astype(np.uint8)

    if key_pairs.size == 0:
        raise InsufficientStatistics("no coincidences at the key setting")
    n_test = max(1, int(round(sacrifice_fraction * key_pairs.size)))
    rng_t = make_rng(config.seed, STREAM_SACRIFICE, 0, 0)
    test_mask = np.zeros(key_pairs.size, dtype=bool)
    test_mask[rng_t.permutation(key_pairs.size)[:n_test]] = True

    # W~'s extra term and the QBER come from the sacrificed key pairs only
    estimation_counts = {s: c for s, c in counts.items() if not s.close_to(key)}
    estimation_counts[key] = CoincidenceCounts.from_array(np.bincount(key_out[test_mask], minlength=4))
    try:
        wigner = estimate_wigner(estimation_counts, settings)
    except MissingSetting as exc:
        raise InsufficientStatistics(str(exc)) from None
    qber_est = float(np.mean(alice_bits[test_mask] != bob_bits[test_mask]))

    for arr in (ia, ib, out, alice_bits, bob_bits, test_mask):
        arr.setflags(write=False)
    return SessionRecord(
        policy=policy,
        settings=settings,
        strategy=strategy,
        n_pairs=config.n_pairs,
        alice_setting=ia,
        bob_setting=ib,
        outcome=out,
        sifted_key_alice=alice_bits,
        sifted_key_bob=bob_bits,
        test_mask=test_mask,
        counts=counts,
        wigner=wigner,
        qber_estimate=qber_est,
        key_fraction=key_pairs.size / config.n_pairs,
        sacrifice_fraction=sacrifice_fraction,
    )


def security_verdict(record: SessionRecord, test: str = "w", threshold: float = 0.0,
                     sigma_margin: float = 3.0) -> Verdict:
    """Classify a session by the chosen Wigner parameter.

    Secure needs the estimate significantly below ``threshold`` (the
    quantum side); Compromised needs it significantly at or above.
    """
    if test not in ("w", "w_tilde"):
        raise ValueError("test must be 'w' or 'w_tilde'")
    value = record.wigner.value(test)
    sigma = record.wigner.sigma(test)
    if not np.isfinite(value):
        raise ValueError("session has no finite Wigner estimate")
    if value + sigma_margin * sigma < threshold:
        return Verdict.SECURE
    if value - sigma_margin * sigma >= threshold:
        return Verdict.COMPROMISED
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class KeyRateComparison:
    """Share of exchanged qubits that go into the key, CHSH vs three-setting Wigner protocol."""

    chsh_key_fraction: Fraction = Fraction(2, 9)
    chsh_discard_fraction: Fraction = Fraction(1, 3)
    wigner3_key_fraction_max: Fraction = Fraction(1, 3)
    wigner3_discard_fraction: Fraction = Fraction(0)
    realized_key_fraction: float | None = None

    def to_dict(self):
        d = {
            k: {"fraction": str(v), "numerator": v.numerator, "denominator": v.denominator, "value": float(v)}
            for k, v in (
                ("chsh_key_fraction", self.chsh_key_fraction),
                ("chsh_discard_fraction", self.chsh_discard_fraction),
                ("wigner3_key_fraction_max", self.wigner3_key_fraction_max),
                ("wigner3_discard_fraction", self.wigner3_discard_fraction),
            )
        }
        d["realized_key_fraction"] = self.realized_key_fraction
        return d


def key_rate_comparison(record: SessionRecord | None = None) -> KeyRateComparison:
    return KeyRateComparison(realized_key_fraction=None if record is None else record.key_fraction)
