"""Wigner security parameters, their count-based estimates and the QBER."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .polarization import (
    OUTCOMES,
    MeasurementSetting,
    PolarizationAngle,
    TwoPhotonState,
    deg,
    outcome_probabilities,
    product_outcome_probabilities,
)


class ZeroTotalCounts(ValueError):
    """A setting pair has no coincidences, so no probability can be formed."""


class MissingSetting(KeyError):
    """A setting pair needed for W is absent or was never measured."""


@dataclass(frozen=True)
class WignerSettings:
    """Analyzer angles entering W and W~ (defaults -30, 0 for Alice; 0, 30 for Bob)."""

    a1: PolarizationAngle = field(default_factory=lambda: deg(-30))
    a2: PolarizationAngle = field(default_factory=lambda: deg(0))
    b1: PolarizationAngle = field(default_factory=lambda: deg(0))
    b2: PolarizationAngle = field(default_factory=lambda: deg(30))

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            v = getattr(self, name)
            if not isinstance(v, PolarizationAngle):
                object.__setattr__(self, name, PolarizationAngle(v))

    @classmethod
    def from_degrees(cls, a1=-30.0, a2=0.0, b1=0.0, b2=30.0) -> "WignerSettings":
        return cls(deg(a1), deg(a2), deg(b1), deg(b2))

    def term_settings(self) -> tuple[MeasurementSetting, ...]:
        """The four setting pairs, in the order of :attr:`WignerResult.terms`."""
        return (
            MeasurementSetting(self.a1, self.b1),
            MeasurementSetting(self.a2, self.b2),
            MeasurementSetting(self.a1, self.b2),
            MeasurementSetting(self.a2, self.b1),
        )

    @property
    def key_setting(self) -> MeasurementSetting:
        return MeasurementSetting(self.a2, self.b1)

    def as_degrees(self) -> dict[str, float]:
        return {k: getattr(self, k).degrees for k in ("a1", "a2", "b1", "b2")}


# outcome index used by each of the four terms
_TERM_OUTCOMES = (0, 0, 0, 3)


@dataclass(frozen=True)
class WignerResult:
    """W, W~ and their four constituent probabilities.

    ``terms`` holds p(a1,b1)(+,+), p(a2,b2)(+,+), p(a1,b2)(+,+) and
    p(a2,b1)(-,-). ``sigma_w`` and ``sigma_w_tilde`` are binomial standard
    errors when the result was estimated from counts, else 0.
    """

    w: float
    w_tilde: float
    terms: tuple[float, float, float, float]
    sigma_w: float = 0.0
    sigma_w_tilde: float = 0.0

    @classmethod
    def from_terms(cls, terms, sigmas=(0.0, 0.0, 0.0, 0.0)) -> "WignerResult":
        t = tuple(float(x) for x in terms)
        w = t[0] + t[1] - t[2]
        var_w = sum(s * s for s in sigmas[:3])
        return cls(
            w=w,
            w_tilde=w + t[3],
            terms=t,
            sigma_w=math.sqrt(var_w),
            sigma_w_tilde=math.sqrt(var_w + sigmas[3] ** 2),
        )

    def value(self, parameter: str) -> float:
        return {"w": self.w, "w_tilde": self.w_tilde}[parameter]

    def sigma(self, parameter: str) -> float:
        return {"w": self.sigma_w, "w_tilde": self.sigma_w_tilde}[parameter]

    def to_dict(self) -> dict:
        return {
            "w": self.w,
            "w_tilde": self.w_tilde,
            "sigma_w": self.sigma_w,
            "sigma_w_tilde": self.sigma_w_tilde,
            "terms": {
                "p_a1_b1_pp": self.terms[0],
                "p_a2_b2_pp": self.terms[1],
                "p_a1_b2_pp": self.terms[2],
                "p_a2_b1_mm": self.terms[3],
            },
        }


@dataclass(frozen=True)
class CoincidenceCounts:
    n_pp: int = 0
    n_pm: int = 0
    n_mp: int = 0
    n_mm: int = 0

    def __post_init__(self):
        for name in ("n_pp", "n_pm", "n_mp", "n_mm"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @classmethod
    def from_array(cls, arr) -> "CoincidenceCounts":
        return cls(*(int(x) for x in arr))

    def as_array(self) -> np.ndarray:
        return np.array([self.n_pp, self.n_pm, self.n_mp, self.n_mm], dtype=np.int64)

    @property
    def total(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def __add__(self, other: "CoincidenceCounts") -> "CoincidenceCounts":
        return CoincidenceCounts.from_array(self.as_array() + other.as_array())

    def to_dict(self) -> dict:
        return dict(zip(OUTCOMES, map(int, self.as_array())))


def wigner_w(state: TwoPhotonState, settings: WignerSettings | None = None) -> WignerResult:
    """Exact W and W~ of ``state`` via the Born rule."""
    settings = settings or WignerSettings()
    terms = [
        outcome_probabilities(state.rho, s)[k]
        for s, k in zip(settings.term_settings(), _TERM_OUTCOMES)
    ]
    return WignerResult.from_terms(terms)


def batch_wigner(rho: np.ndarray, settings: WignerSettings | None = None) -> tuple[np.ndarray, np.ndarray]:
    """W and W~ for a stack of density matrices of shape (..., 4, 4)."""
    settings = settings or WignerSettings()
    t = [
        outcome_probabilities(rho, s)[..., k]
        for s, k in zip(settings.term_settings(), _TERM_OUTCOMES)
    ]
    w = t[0] + t[1] - t[2]
    return w, w + t[3]


def product_wigner(phi_a, phi_b, settings: WignerSettings | None = None) -> tuple[np.ndarray, np.ndarray]:
    """W and W~ for product states |phi_a>|phi_b>, broadcasting over arrays of angles (radians)."""
    settings = settings or WignerSettings()
    t = [
        product_outcome_probabilities(phi_a, phi_b, s.alpha_a, s.alpha_b)[..., k]
        for s, k in zip(settings.term_settings(), _TERM_OUTCOMES)
    ]
    w = t[0] + t[1] - t[2]
    return w, w + t[3]


def estimate_probability(counts: CoincidenceCounts, outcome: str) -> float:
    """Relative frequency of ``outcome`` among the coincidences of one setting pair."""
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be one of {OUTCOMES}, got {outcome!r}")
    total = counts.total
    if total == 0:
        raise ZeroTotalCounts("setting pair has zero coincidences")
    return counts.as_array()[OUTCOMES.index(outcome)] / total


def lookup_counts(counts_by_setting: Mapping[MeasurementSetting, CoincidenceCounts],
                  setting: MeasurementSetting) -> CoincidenceCounts:
    if setting in counts_by_setting:
        return counts_by_setting[setting]
    for key, value in counts_by_setting.items():
        if key.close_to(setting):
            return value
    raise MissingSetting(f"no counts for setting {setting}")


def estimate_wigner(counts_by_setting: Mapping[MeasurementSetting, CoincidenceCounts],
                    settings: WignerSettings | None = None) -> WignerResult:
    """W and W~ from coincidence counts, with propagated binomial errors.

    Each term is estimated only from the counts of its own setting pair;
    its variance is p(1-p)/N and the variances add.
    """
    settings = settings or WignerSettings()
    terms, sigmas = [], []
    for s, k in zip(settings.term_settings(), _TERM_OUTCOMES):
        c = lookup_counts(counts_by_setting, s)
        if c.total == 0:
            raise MissingSetting(f"setting {s} has zero coincidences")
        p = estimate_probability(c, OUTCOMES[k])
        terms.append(p)
        sigmas.append(math.sqrt(p * (1.0 - p) / c.total))
    return WignerResult.from_terms(terms, sigmas)


def qber(state: TwoPhotonState, key_setting: MeasurementSetting | None = None) -> float:
    """Probability of correlated outcomes at the key setting.

    The key relies on the singlet's perfect anticorrelation, so (+,+) and
    (-,-) at the key setting are the bit errors.
    """
    key_setting = key_setting or WignerSettings().key_setting
    p = outcome_probabilities(state.rho, key_setting)
    return float(p[0] + p[3])
