"""
Eavesdropping strategies and the search for their extremal W / W~.

Each strategy turns into a :class:`TwoPhotonState` via :func:`realize_attack`.
The intercept-resend strategies start from the singlet, let Eve make
projective measurements, and resend the eigenstates she found; the photon
she did not touch keeps whatever state the first measurement collapsed it
to.

Angles of strategies are radians (:class:`PolarizationAngle`); the search
works in degrees on one polarization period [0, 180).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .polarization import (
    PolarizationAngle,
    TwoPhotonState,
    deg,
    make_product_state,
    make_singlet_state,
    singlet_vector,
)
from .security import WignerSettings, batch_wigner, product_wigner, wigner_w


@dataclass(frozen=True)
class NoAttack:
    """Honest entangled source: Alice and Bob receive singlets."""

    def to_dict(self):
        return {"kind": "none"}


@dataclass(frozen=True)
class SourceControlProduct:
    """Eve owns the source and emits |phi_a>|phi_b>."""

    phi_a: PolarizationAngle
    phi_b: PolarizationAngle

    def __post_init__(self):
        _coerce(self, "phi_a", "phi_b")

    def to_dict(self):
        return {"kind": "product", "phi_a_deg": self.phi_a.degrees, "phi_b_deg": self.phi_b.degrees}


@dataclass(frozen=True)
class InterceptResendOne:
    """Eve measures the photon of one channel in basis ``eve_basis`` and resends it."""

    eve_basis: PolarizationAngle
    channel: str = "A"

    def __post_init__(self):
        _coerce(self, "eve_basis")
        if self.channel not in ("A", "B"):
            raise ValueError(f"channel must be 'A' or 'B', got {self.channel!r}")

    def to_dict(self):
        return {"kind": "intercept-one", "eve_basis_deg": self.eve_basis.degrees, "channel": self.channel}


@dataclass(frozen=True)
class InterceptResendBoth:
    """Eve measures Alice's photon, then Bob's, and resends both eigenstates."""

    eve_basis_a: PolarizationAngle
    eve_basis_b: PolarizationAngle

    def __post_init__(self):
        _coerce(self, "eve_basis_a", "eve_basis_b")

    def to_dict(self):
        return {
            "kind": "intercept-both",
            "eve_basis_a_deg": self.eve_basis_a.degrees,
            "eve_basis_b_deg": self.eve_basis_b.degrees,
        }


AttackStrategy = Union[NoAttack, SourceControlProduct, InterceptResendOne, InterceptResendBoth]


def _coerce(obj, *names):
    for name in names:
        v = getattr(obj, name)
        if not isinstance(v, PolarizationAngle):
            object.__setattr__(obj, name, PolarizationAngle(v))


def strategy_from_dict(d: dict) -> AttackStrategy:
    """Inverse of ``to_dict``; angles in degrees."""
    kind = d.get("kind", "none")
    if kind == "none":
        return NoAttack()
    if kind == "product":
        return SourceControlProduct(deg(d["phi_a_deg"]), deg(d["phi_b_deg"]))
    if kind == "intercept-one":
        return InterceptResendOne(deg(d["eve_basis_deg"]), d.get("channel", "A"))
    if kind == "intercept-both":
        return InterceptResendBoth(deg(d["eve_basis_a_deg"]), deg(d["eve_basis_b_deg"]))
    raise ValueError(f"unknown attack kind {kind!r}")


# -- state construction ------------------------------------------------------
# Single-qubit eigenvectors are real for linear polarization, so everything
# below is done with real arrays and broadcast over leading angle axes.

def _plus(angle):
    angle = np.asarray(angle, dtype=float)
    return np.stack([np.cos(angle), np.sin(angle)], axis=-1)


def _minus(angle):
    angle = np.asarray(angle, dtype=float)
    return np.stack([np.sin(angle), -np.cos(angle)], axis=-1)


def _singlet_amplitudes() -> np.ndarray:
    # M[i, j] = <i_A j_B | psi->
    return singlet_vector().real.reshape(2, 2)


def _outer4(u, v):
    """(..., 2), (..., 2) -> projector on u (x) v, shape (..., 4, 4), unnormalized."""
    k = np.einsum("...i,...j->...ij", u, v).reshape(u.shape[:-1] + (4,))
    return np.einsum("...i,...j->...ij", k, k)


def intercept_one_density(eve_basis, channel: str = "A") -> np.ndarray:
    """Density matrices after one-channel intercept-resend, shape (..., 4, 4)."""
    m = _singlet_amplitudes()
    rho = 0.0
    for eig in (_plus(eve_basis), _minus(eve_basis)):
        if channel == "A":
            other = eig @ m  # unnormalized collapsed state of B, norm^2 = outcome prob
            rho = rho + _outer4(eig, other)
        else:
            other = eig @ m.T
            rho = rho + _outer4(other, eig)
    return rho


def intercept_both_density(eve_basis_a, eve_basis_b) -> np.ndarray:
    """Density matrices after Eve measures both photons in sequence, shape (..., 4, 4)."""
    m = _singlet_amplitudes()
    eve_basis_a, eve_basis_b = np.broadcast_arrays(
        np.asarray(eve_basis_a, dtype=float), np.asarray(eve_basis_b, dtype=float)
    )
    rho = 0.0
    for ea in (_plus(eve_basis_a), _minus(eve_basis_a)):
        collapsed_b = ea @ m
        for eb in (_plus(eve_basis_b), _minus(eve_basis_b)):
            weight = np.einsum("...i,...i->...", eb, collapsed_b) ** 2
            rho = rho + weight[..., None, None] * _outer4(ea, eb)
    return rho


def realize_attack(strategy: AttackStrategy) -> TwoPhotonState:
    """The two-photon state Alice and Bob receive under ``strategy``."""
    if isinstance(strategy, NoAttack):
        return make_singlet_state()
    if isinstance(strategy, SourceControlProduct):
        return make_product_state(strategy.phi_a, strategy.phi_b)
    if isinstance(strategy, InterceptResendOne):
        return TwoPhotonState(intercept_one_density(float(strategy.eve_basis), strategy.channel))
    if isinstance(strategy, InterceptResendBoth):
        return TwoPhotonState(intercept_both_density(float(strategy.eve_basis_a), float(strategy.eve_basis_b)))
    raise TypeError(f"not an attack strategy: {strategy!r}")


# -- optimization --------------------------------------------------------------

OBJECTIVES = ("min_w", "min_w_tilde", "max_w", "max_w_tilde")


@dataclass(frozen=True)
class _Family:
    name: str
    n_params: int
    evaluate: Callable  # (degree arrays...) -> (w, w_tilde)
    build: Callable  # (degrees...) -> AttackStrategy


def _families(settings: WignerSettings, channel: str) -> dict[str, _Family]:
    r = np.deg2rad
    return {
        "product": _Family(
            "product", 2,
            lambda a, b: product_wigner(r(a), r(b), settings),
            lambda a, b: SourceControlProduct(deg(a), deg(b)),
        ),
        "intercept-one": _Family(
            "intercept-one", 1,
            lambda e: batch_wigner(intercept_one_density(r(e), channel), settings),
            lambda e: InterceptResendOne(deg(e), channel),
        ),
        "intercept-both": _Family(
            "intercept-both", 2,
            lambda a, b: batch_wigner(intercept_both_density(r(a), r(b)), settings),
            lambda a, b: InterceptResendBoth(deg(a), deg(b)),
        ),
    }


STRATEGY_FAMILIES = ("product", "intercept-one", "intercept-both")


@dataclass(frozen=True)
class OptimizationReport:
    objective: str
    family: str
    best_value: float
    best_params: tuple[float, ...]  # degrees, in [0, 180)
    grid_resolution: float
    refinement_iterations: int
    strategy: AttackStrategy

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "family": self.family,
            "best_value": self.best_value,
            "best_params_deg": list(self.best_params),
            "grid_resolution_deg": self.grid_resolution,
            "refinement_iterations": self.refinement_iterations,
            "strategy": self.strategy.to_dict(),
        }


def _signed_objective(objective: str, w, w_tilde):
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    val = w_tilde if objective.endswith("w_tilde") else w
    # everything is minimized internally
    return val if objective.startswith("min") else -val


def _grid_scan(fam: _Family, objective: str, grid: np.ndarray, threads: int):
    """Best grid point; exact ties go to the lexicographically smallest parameters."""
    if fam.n_params == 1:
        vals = _signed_objective(objective, *fam.evaluate(grid))
        i = int(np.argmin(vals))
        return (float(grid[i]),)

    def row_block(rows):
        a, b = np.meshgrid(grid[rows], grid, indexing="ij")
        vals = _signed_objective(objective, *fam.evaluate(a, b))
        flat = int(np.argmin(vals))
        i, j = divmod(flat, len(grid))
        return float(vals.flat[flat]), rows.start + i, j

    n = len(grid)
    n_blocks = max(1, threads)
    bounds = np.linspace(0, n, n_blocks + 1).astype(int)
    blocks = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(row_block, blocks))
    else:
        results = [row_block(b) for b in blocks]
    _, i, j = min(results)
    return float(grid[i]), float(grid[j])


def _coordinate_descent(fam: _Family, objective: str, x0, step: float, tol: float = 1e-4):
    def f(x):
        v = _signed_objective(objective, *fam.evaluate(*(np.asarray(c) for c in x)))
        return float(v)

    x = list(x0)
    fx = f(x)
    iterations = 0
    while step >= tol:
        improved = False
        for k in range(len(x)):
            for direction in (-1.0, 1.0):
                trial = list(x)
                trial[k] += direction * step
                ft = f(trial)
                iterations += 1
                if ft < fx:
                    x, fx, improved = trial, ft, True
                    break
        if not improved:
            step /= 2.0
    return tuple(v % 180.0 for v in x), iterations


def optimize_attack(objective: str, strategy_family: str = "product", grid_step: float = 0.5,
                    refine: bool = True, settings: WignerSettings | None = None,
                    channel: str = "A", threads: int = 1) -> OptimizationReport:
    """Extremize W or W~ over the angles of one attack family.

    An exhaustive scan of [0, 180) per parameter at ``grid_step`` degrees is
    followed, when ``refine`` is set, by coordinate descent with a halving
    step until the step drops below 1e-4 degrees. The reported value is
    recomputed from the density matrix of the final strategy.
    """
    settings = settings or WignerSettings()
    fams = _families(settings, channel)
    if strategy_family not in fams:
        raise ValueError(f"strategy_family must be one of {STRATEGY_FAMILIES}, got {strategy_family!r}")
    if not 0 < grid_step <= 2.0:
        raise ValueError("grid_step must be in (0, 2] degrees (at least 90 cells per axis)")
    _signed_objective(objective, 0.0, 0.0)
    fam = fams[strategy_family]

    n = int(math.ceil(180.0 / grid_step - 1e-9))
    grid = np.arange(n) * grid_step
    best = _grid_scan(fam, objective, grid, threads)
    iterations = 0
    if refine:
        best, iterations = _coordinate_descent(fam, objective, best, grid_step / 2.0)

    strategy = fam.build(*best)
    result = wigner_w(realize_attack(strategy), settings)
    value = result.w_tilde if objective.endswith("w_tilde") else result.w
    return OptimizationReport(
        objective=objective,
        family=strategy_family,
        best_value=value,
        best_params=tuple(best),
        grid_resolution=grid_step,
        refinement_iterations=iterations,
        strategy=strategy,
    )
