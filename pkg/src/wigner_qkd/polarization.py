"""
Two-photon polarization states and analyzer measurements.

Angles are radians internally and are folded into [0, pi), since a linear
polarization direction and its opposite are the same physical state. Use
:meth:`PolarizationAngle.from_degrees` at any boundary that speaks degrees.

The joint state is always a 4x4 density matrix in the ordered basis
(HH, HV, VH, VV), so pure states, product states and classical mixtures
share a single Born-rule path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TOL = 1e-12
EIG_TOL = 1e-10

# Outcome order used everywhere: (+,+), (+,-), (-,+), (-,-)
OUTCOMES = ("++", "+-", "-+", "--")


class PolarizationAngle(float):
    """A linear polarization direction in radians, normalized to [0, pi)."""

    def __new__(cls, value: float = 0.0):
        v = math.fmod(float(value), math.pi)
        if v < 0.0:
            v += math.pi
        if v >= math.pi:
            v = 0.0
        return super().__new__(cls, v)

    @classmethod
    def from_degrees(cls, deg: float) -> "PolarizationAngle":
        # fold in degrees first so that -30 and 150 map to the same float
        d = math.fmod(float(deg), 180.0)
        if d < 0.0:
            d += 180.0
        if d >= 180.0:
            d = 0.0
        return cls(math.radians(d))

    @property
    def degrees(self) -> float:
        return math.degrees(self)

    def __repr__(self) -> str:
        return f"PolarizationAngle({self.degrees:.12g} deg)"


def deg(value: float) -> PolarizationAngle:
    """Shorthand for ``PolarizationAngle.from_degrees``."""
    return PolarizationAngle.from_degrees(value)


def polarization_ket(angle: float) -> np.ndarray:
    """Jones vector cos(a)|H> + sin(a)|V>."""
    return np.array([math.cos(angle), math.sin(angle)], dtype=complex)


@dataclass(frozen=True)
class AnalyzerBasis:
    """Two-outcome analyzer at a given angle.

    The "+" port projects on cos(a)|H> + sin(a)|V>, the "-" port on
    sin(a)|H> - cos(a)|V>.
    """

    angle: PolarizationAngle

    def __post_init__(self):
        if not isinstance(self.angle, PolarizationAngle):
            object.__setattr__(self, "angle", PolarizationAngle(self.angle))

    @property
    def plus(self) -> np.ndarray:
        return polarization_ket(self.angle)

    @property
    def minus(self) -> np.ndarray:
        a = self.angle
        return np.array([math.sin(a), -math.cos(a)], dtype=complex)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        p, m = self.plus, self.minus
        return np.outer(p, p.conj()), np.outer(m, m.conj())


@dataclass(frozen=True)
class MeasurementSetting:
    """Analyzer angles for Alice and Bob."""

    alpha_a: PolarizationAngle
    alpha_b: PolarizationAngle

    def __post_init__(self):
        for name in ("alpha_a", "alpha_b"):
            v = getattr(self, name)
            if not isinstance(v, PolarizationAngle):
                object.__setattr__(self, name, PolarizationAngle(v))

    @classmethod
    def from_degrees(cls, a: float, b: float) -> "MeasurementSetting":
        return cls(deg(a), deg(b))

    @property
    def degrees(self) -> tuple[float, float]:
        return (self.alpha_a.degrees, self.alpha_b.degrees)

    def close_to(self, other: "MeasurementSetting", tol: float = 1e-9) -> bool:
        return all(
            _angle_distance(x, y) <= tol
            for x, y in ((self.alpha_a, other.alpha_a), (self.alpha_b, other.alpha_b))
        )

    def __str__(self) -> str:
        a, b = self.degrees
        return f"({a:g}deg, {b:g}deg)"


def _angle_distance(x: float, y: float) -> float:
    d = abs(x - y) % math.pi
    return min(d, math.pi - d)


@dataclass(frozen=True)
class OutcomeDistribution:
    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self):
        probs = self.as_array()
        if np.any(probs < -TOL) or np.any(probs > 1 + TOL):
            raise ValueError(f"probabilities out of range: {probs}")
        if abs(probs.sum() - 1.0) > TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_pp, self.p_pm, self.p_mp, self.p_mm])

    def __getitem__(self, outcome: str) -> float:
        return float(self.as_array()[OUTCOMES.index(outcome)])


class TwoPhotonState:
    """Immutable two-photon polarization density matrix.

    Parameters
    ----------
    rho : array_like, shape (4, 4)
        Density matrix in the (HH, HV, VH, VV) basis. It is validated
        (Hermitian, unit trace, positive semidefinite) and stored read-only.
    """

    __slots__ = ("_rho",)

    def __init__(self, rho):
        rho = np.array(rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=TOL, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TOL:
            raise ValueError(f"density matrix has trace {tr!r}")
        if np.linalg.eigvalsh(rho).min() < -EIG_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        self._rho = rho

    @property
    def rho(self) -> np.ndarray:
        return self._rho

    def purity(self) -> float:
        return float(np.trace(self._rho @ self._rho).real)

    def __eq__(self, other):
        if not isinstance(other, TwoPhotonState):
            return NotImplemented
        return np.allclose(self._rho, other._rho, atol=TOL, rtol=0)

    __hash__ = None

    def __repr__(self):
        return f"TwoPhotonState(purity={self.purity():.6g})"


def make_product_state(phi_a: float, phi_b: float) -> TwoPhotonState:
    """|phi_a> (x) |phi_b>, the state Eve sends when she owns the source."""
    v = np.kron(polarization_ket(phi_a), polarization_ket(phi_b))
    return TwoPhotonState(np.outer(v, v.conj()))


def singlet_vector() -> np.ndarray:
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)


def make_singlet_state() -> TwoPhotonState:
    v = singlet_vector()
    return TwoPhotonState(np.outer(v, v.conj()))


def maximally_mixed_state() -> TwoPhotonState:
    return TwoPhotonState(np.eye(4) / 4.0)


def setting_projectors(setting: MeasurementSetting) -> np.ndarray:
    """Joint projectors for the four outcomes, shape (4, 4, 4)."""
    pa = AnalyzerBasis(setting.alpha_a).projectors()
    pb = AnalyzerBasis(setting.alpha_b).projectors()
    return np.stack([np.kron(x, y) for x in pa for y in pb])


def outcome_probabilities(rho: np.ndarray, setting: MeasurementSetting) -> np.ndarray:
    """Born-rule probabilities for one or many density matrices.

    ``rho`` may have shape (4, 4) or (..., 4, 4); the result has shape
    (4,) or (..., 4) in :data:`OUTCOMES` order. Roundoff below zero is
    clipped.
    """
    proj = setting_projectors(setting)
    p = np.einsum("...ij,kji->...k", rho, proj).real
    return np.clip(p, 0.0, 1.0)


def outcome_distribution(state: TwoPhotonState, setting: MeasurementSetting) -> OutcomeDistribution:
    p = outcome_probabilities(state.rho, setting)
    return OutcomeDistribution(*map(float, p))


def product_outcome_probabilities(phi_a, phi_b, alpha_a, alpha_b) -> np.ndarray:
    """Outcome probabilities for product states, vectorized over angle arrays.

    Evaluates the squared single-photon amplitudes <phi|s_alpha> and
    <phi|s_alpha_perp> and multiplies them, which is what the Born rule
    reduces to when the source emits |phi_a>|phi_b>. All arguments
    broadcast; the trailing axis of the result holds the four outcomes.
    """
    phi_a, phi_b = np.asarray(phi_a, dtype=float), np.asarray(phi_b, dtype=float)
    ca, sa = math.cos(alpha_a), math.sin(alpha_a)
    cb, sb = math.cos(alpha_b), math.sin(alpha_b)
    a_plus = (np.cos(phi_a) * ca + np.sin(phi_a) * sa) ** 2
    a_minus = (np.cos(phi_a) * sa - np.sin(phi_a) * ca) ** 2
    b_plus = (np.cos(phi_b) * cb + np.sin(phi_b) * sb) ** 2
    b_minus = (np.cos(phi_b) * sb - np.sin(phi_b) * cb) ** 2
    return np.stack(
        np.broadcast_arrays(a_plus * b_plus, a_plus * b_minus, a_minus * b_plus, a_minus * b_minus),
        axis=-1,
    )


def depolarize(state: TwoPhotonState, amount: float) -> TwoPhotonState:
    """Mix ``state`` with the maximally mixed state: (1-d) rho + d I/4."""
    if not 0.0 <= amount <= 1.0:
        raise ValueError("depolarization must lie in [0, 1]")
    if amount == 0.0:
        return state
    return TwoPhotonState((1.0 - amount) * state.rho + amount * np.eye(4) / 4.0)
