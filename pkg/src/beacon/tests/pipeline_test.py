"""End-to-end run of the perturbation ladder: geometry, FDTD, far field and Purcell."""

import math

import numpy as np
import pytest

from beacon.cli import load_scenario, run_pipeline
from beacon.farfield import MEASURED_Q_RATIO

LADDER = ["unperturbed", "L2", "L2-L3", "L2-L3-L4"]


@pytest.fixture(scope="module")
def ladder(tmp_path_factory):
    scenario = load_scenario("figures/fig2a")
    return run_pipeline(scenario, tmp_path_factory.mktemp("fig2a"))


def lattice_energy_fraction(mode, lattice):
    rows, cols = np.indices(mode.shape)
    y = (rows - mode.origin[0]) * mode.dx_nm
    x = (cols - mode.origin[1]) * mode.dx_nm
    inside = (np.abs(x) <= (lattice.nx // 2) * lattice.a_nm) & (
        np.abs(y) <= (lattice.ny // 2) * lattice.a_nm * math.sqrt(3) / 2
    )
    intensity = np.abs(mode.mode_field) ** 2
    return intensity[inside].sum() / intensity.sum()


class TestLadder:
    def test_designs(self, ladder):
        assert list(ladder.designs) == LADDER
        assert ladder.primary == "L2-L3-L4"

    def test_mode_is_confined_by_the_band_gap(self, ladder):
        mode = ladder.bare_mode
        lattice = ladder.config.geometry.lattice
        low, high = ladder.config.fdtd.search_window_nm
        assert low < mode.lambda_cav_nm < high
        assert mode.q_inplane > 1000
        assert lattice_energy_fraction(mode, lattice) > 0.9

    def test_q_falls_at_every_step(self, ladder):
        designs = ladder.results["farfield"]["designs"]
        q = [designs[name]["q_factor"] for name in LADDER]
        assert all(a > b for a, b in zip(q, q[1:])), q

    def test_q_ratio_matches_measurement(self, ladder):
        designs = ladder.results["farfield"]["designs"]
        ratio = designs["L2-L3-L4"]["q_factor"] / designs["unperturbed"]["q_factor"]
        assert ratio == pytest.approx(MEASURED_Q_RATIO, rel=1e-6)

    def test_perturbed_mode_has_lower_q(self, ladder):
        assert ladder.modes["L2-L3-L4"].q_factor < ladder.modes["unperturbed"].q_factor
        assert ladder.summary["q_factor"] == pytest.approx(ladder.modes["L2-L3-L4"].q_factor)

    def test_collection_improves(self, ladder):
        designs = ladder.results["farfield"]["designs"]
        bare, perturbed = designs["unperturbed"], designs["L2-L3-L4"]
        assert perturbed["eta_lens"] > bare["eta_lens"]
        assert perturbed["eta_smf"] >= 2 * bare["eta_smf"]

    def test_coupling_is_calibrated(self, ladder):
        assert ladder.results["farfield"]["coupling_magnitude"] > 0

    def test_one_simulation_shared_by_the_ladder(self, ladder):
        assert list(ladder.results["fdtd"]) == ["unperturbed"]
        assert ladder.results["fdtd"]["unperturbed"]["designs"] == LADDER
        assert (ladder.out_dir / "mode_unperturbed.csv").is_file()
        assert not (ladder.out_dir / "mode_L2-L3-L4.csv").exists()

    def test_spectra_compare_against_the_bare_cavity(self, ladder):
        spectrum = ladder.results["purcell"]["spectrum"]
        assert spectrum["efficiency_ratio"] > 1
