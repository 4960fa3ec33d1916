"""
Datasets behind the W / W~ contour maps and their fixed-phi_b sections.

Both are analytic: Eve sends |phi_a>|phi_b> and W, W~ are evaluated
exactly. Rows come out phi_a-major. CSV output uses the header
``phi_a_deg,phi_b_deg,w,w_tilde,band``, 9 significant digits and LF
line endings.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .security import WignerSettings, product_wigner

QUANTUM_LIMIT = -0.125
LOCAL_LIMIT = 0.0
INTERCEPT_ONE_LIMIT = 0.0625

BANDS = ("w<-0.125", "-0.125<=w<0", "0<=w<0.0625", "w>=0.0625")
CSV_HEADER = ("phi_a_deg", "phi_b_deg", "w", "w_tilde", "band")


def classify_band(w) -> np.ndarray:
    """Index into :data:`BANDS` for each value of W."""
    return np.digitize(np.asarray(w, dtype=float), [QUANTUM_LIMIT, LOCAL_LIMIT, INTERCEPT_ONE_LIMIT])


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    if not hi > lo:
        raise ValueError("range must be non-empty")
    n = int(np.ceil((hi - lo) / step - 1e-9))
    return lo + np.arange(n) * step


@dataclass(frozen=True)
class GridSpec:
    phi_a_range: tuple[float, float] = (0.0, 180.0)
    phi_b_range: tuple[float, float] = (0.0, 180.0)
    step: float = 0.5

    def axes(self):
        return _axis(*self.phi_a_range, self.step), _axis(*self.phi_b_range, self.step)


@dataclass(frozen=True)
class SectionSpec:
    phi_b_fixed: float = 98.0
    phi_a_range: tuple[float, float] = (0.0, 180.0)
    step: float = 0.1

    def axis(self):
        return _axis(*self.phi_a_range, self.step)


@dataclass(frozen=True)
class Dataset:
    """Columns of a figure dataset; angles in degrees."""

    phi_a: np.ndarray
    phi_b: np.ndarray
    w: np.ndarray
    w_tilde: np.ndarray

    @property
    def band(self) -> np.ndarray:
        return classify_band(self.w)

    def __len__(self):
        return self.w.size

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            write_csv(self, fh)


def write_csv(data: Dataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    fmt = "{:.9g}".format
    for a, b, w, wt, band in zip(data.phi_a.tolist(), data.phi_b.tolist(), data.w.tolist(),
                                 data.w_tilde.tolist(), data.band.tolist()):
        writer.writerow((fmt(a), fmt(b), fmt(w), fmt(wt), BANDS[band]))


def contour_grid(spec: GridSpec | None = None, settings: WignerSettings | None = None) -> Dataset:
    spec = spec or GridSpec()
    a_axis, b_axis = spec.axes()
    a, b = np.meshgrid(a_axis, b_axis, indexing="ij")
    w, wt = product_wigner(np.deg2rad(a), np.deg2rad(b), settings)
    return Dataset(a.ravel(), b.ravel(), w.ravel(), wt.ravel())


def section_curve(spec: SectionSpec | None = None, settings: WignerSettings | None = None) -> Dataset:
    spec = spec or SectionSpec()
    a = spec.axis()
    b = np.full_like(a, spec.phi_b_fixed)
    w, wt = product_wigner(np.deg2rad(a), np.deg2rad(b), settings)
    return Dataset(a, b, w, wt)
