import csv
import io
import math

import numpy as np
import pytest

from conftest import malus
from wigner_qkd.figures import (
    BANDS,
    CSV_HEADER,
    GridSpec,
    SectionSpec,
    classify_band,
    contour_grid,
    section_curve,
    write_csv,
)


@pytest.fixture(scope="module")
def grid():
    return contour_grid(GridSpec(step=0.5))


class TestContourGrid:
    def test_shape_and_order(self, grid):
        assert len(grid) == 360 * 360
        # phi_a-major
        assert grid.phi_a[:3].tolist() == [0.0, 0.0, 0.0]
        assert grid.phi_b[:3].tolist() == [0.0, 0.5, 1.0]
        assert grid.phi_a[360] == 0.5

    def test_extrema(self, grid):
        assert grid.w.min() == pytest.approx(-0.2121, abs=5e-4)
        assert grid.w_tilde.min() == pytest.approx(0.0443, abs=5e-4)
        assert grid.w.max() == pytest.approx(0.9557, abs=5e-4)
        assert grid.w_tilde.max() == pytest.approx(0.9557, abs=5e-4)

    def test_values_against_malus(self, grid):
        r = math.radians
        for k in np.random.default_rng(1).integers(0, len(grid), size=50):
            a, b = r(grid.phi_a[k]), r(grid.phi_b[k])
            w = (malus(a, r(-30)) * malus(b, 0) + malus(a, 0) * malus(b, r(30))
                 - malus(a, r(-30)) * malus(b, r(30)))
            assert grid.w[k] == pytest.approx(w, abs=1e-12)

    def test_bands_exhaustive_and_exclusive(self, grid):
        band = grid.band
        masks = [grid.w < -0.125, (grid.w >= -0.125) & (grid.w < 0), (grid.w >= 0) & (grid.w < 0.0625),
                 grid.w >= 0.0625]
        assert np.all(sum(m.astype(int) for m in masks) == 1)
        for k, m in enumerate(masks):
            assert np.all(band[m] == k)

    @pytest.mark.parametrize("w, label", [(-0.2, "w<-0.125"), (-0.125, "-0.125<=w<0"), (0.0, "0<=w<0.0625"),
                                          (0.0625, "w>=0.0625"), (0.9, "w>=0.0625")])
    def test_band_edges(self, w, label):
        assert BANDS[int(classify_band(w))] == label

    def test_resolution_convergence(self, grid):
        fine = contour_grid(GridSpec(step=0.1))
        for col in ("w", "w_tilde"):
            assert abs(getattr(fine, col).min() - getattr(grid, col).min()) < 2e-4
            assert abs(getattr(fine, col).max() - getattr(grid, col).max()) < 2e-4

    @pytest.mark.parametrize("spec", [GridSpec(step=0), GridSpec(phi_a_range=(10, 10))])
    def test_invalid(self, spec):
        with pytest.raises(ValueError):
            contour_grid(spec)


class TestSectionCurve:
    def test_phi_b_62_crosses_quantum_limit(self):
        s = section_curve(SectionSpec(62))
        assert s.w.min() < -0.125
        assert np.all(s.phi_b == 62)

    def test_phi_b_98_minimum_of_w_tilde(self):
        s = section_curve(SectionSpec(98))
        assert s.w_tilde.min() == pytest.approx(0.0466, abs=5e-4)
        # W still violates the local bound on this section
        assert s.w.min() < 0

    def test_phi_b_0_degenerate(self):
        s = section_curve(SectionSpec(0))
        assert np.max(np.abs(s.w - s.w_tilde)) <= 1e-12

    def test_phi_a_180_degenerate(self):
        s = section_curve(SectionSpec(37.0, phi_a_range=(180.0, 180.5), step=0.5))
        assert np.max(np.abs(s.w - s.w_tilde)) <= 1e-12


class TestCsv:
    def test_format(self):
        buf = io.StringIO()
        write_csv(section_curve(SectionSpec(98, step=30.0)), buf)
        text = buf.getvalue()
        assert "\r" not in text
        rows = list(csv.reader(io.StringIO(text)))
        assert tuple(rows[0]) == CSV_HEADER
        assert len(rows) == 7
        assert rows[1][:2] == ["0", "98"]
        assert rows[1][2] == f"{float(rows[1][2]):.9g}"
        assert rows[1][4] in BANDS

    def test_round_trip(self, tmp_path):
        data = contour_grid(GridSpec(step=2.0))
        path = tmp_path / "grid.csv"
        data.write_csv(path)
        rows = list(csv.DictReader(path.open()))
        assert len(rows) == len(data)
        w = np.array([float(r["w"]) for r in rows])
        assert np.allclose(w, data.w, rtol=1e-8, atol=1e-9)
