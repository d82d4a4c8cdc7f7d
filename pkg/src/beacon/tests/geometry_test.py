"""Tests of the cavity design, hole table and permittivity raster."""

import json
import math

import numpy as np
import pytest
from pydantic import ValidationError

from beacon.geometry import (
    CavityDesign,
    DefectSpec,
    DuplicateHostError,
    GeometricOverlapError,
    Hole,
    LatticeSpec,
    LayerLabel,
    ResolutionError,
    UnknownHostHoleError,
    build_cavity_design,
    check_design,
    default_host_holes,
    dump_design,
    lattice_holes,
    load_design,
    paint_holes,
    rasterize_epsilon,
)

from . import SMALL_LATTICE, small_design


def air_area(pmap):
    slab = pmap.n_eff**2
    return float(((slab - pmap.epsilon) / (slab - 1.0)).sum() * pmap.dx_nm**2)


class TestLattice:
    def test_defect_removes_centre_holes(self):
        keys = {(h.i, h.j) for h in lattice_holes(small_design())}
        for i in (-1, 0, 1):
            assert (i, 0) not in keys
        assert (2, 0) in keys and (-2, 0) in keys

    def test_end_holes_are_shifted_outward(self):
        holes = {(h.i, h.j): h for h in lattice_holes(small_design())}
        a = SMALL_LATTICE.a_nm
        assert holes[2, 0].x_nm == pytest.approx(2.15 * a)
        assert holes[-2, 0].x_nm == pytest.approx(-2.15 * a)
        assert holes[3, 0].x_nm == pytest.approx(3 * a)

    def test_reduced_radius_next_to_defect(self):
        holes = {(h.i, h.j): h for h in lattice_holes(small_design())}
        a = SMALL_LATTICE.a_nm
        assert holes[0, 1].radius_nm == pytest.approx(0.25 * a)
        assert holes[0, 2].radius_nm == pytest.approx(0.3 * a)

    def test_odd_rows_are_offset(self):
        holes = {(h.i, h.j): h for h in lattice_holes(small_design())}
        a = SMALL_LATTICE.a_nm
        assert holes[0, 1].x_nm == pytest.approx(0.5 * a)
        assert holes[0, 1].y_nm == pytest.approx(a * math.sqrt(3) / 2)

    def test_unperturbed_has_no_annuli(self):
        assert all(h.annulus_nm == 0 and h.layer is None for h in lattice_holes(small_design()))

    def test_layers_widen_their_hosts(self):
        design = small_design(["L2", "L3", "L4"])
        widened = [h for h in lattice_holes(design) if h.layer is not None]
        by_label = {label: [h for h in widened if h.layer is label] for label in LayerLabel}
        assert len(by_label[LayerLabel.L2]) == 6
        assert all(h.annulus_nm == 5.0 for h in by_label[LayerLabel.L2])
        assert all(h.annulus_nm == 10.0 for h in by_label[LayerLabel.L3])
        assert all(h.annulus_nm == 20.0 for h in by_label[LayerLabel.L4])

    def test_perturbation_keeps_hole_count(self):
        assert len(lattice_holes(small_design(["L2", "L3", "L4"]))) == len(
            lattice_holes(small_design()),
        )

    def test_design_labels_are_sorted(self):
        assert small_design(["L4", "L2"]).labels == (LayerLabel.L2, LayerLabel.L4)

    def test_custom_width(self):
        design = small_design(["L3"], annulus_widths_nm={"L3": 12.5})
        assert design.perturbation_layers[0].annulus_width_nm == 12.5

    def test_default_hosts_are_mirror_symmetric(self):
        for label in LayerLabel:
            holes = {
                (h.i, h.j): h for h in lattice_holes(small_design([label]))
            }
            xs = sorted(
                round(holes[host].x_nm, 6)
                for host in default_host_holes(label, SMALL_LATTICE, DefectSpec())
            )
            assert xs == sorted(-x for x in xs)


class TestDesignErrors:
    def test_overlapping_annuli(self):
        with pytest.raises(GeometricOverlapError):
            small_design(["L3"], annulus_widths_nm={"L3": 50.0})

    def test_overlap_reported_by_check_design(self):
        design = CavityDesign(
            lattice=SMALL_LATTICE,
            defect=DefectSpec(side_shift_norm=0.45),
        )
        # End hole shifted into its outer neighbour.
        with pytest.raises(GeometricOverlapError):
            check_design(design)

    def test_host_in_the_defect(self):
        with pytest.raises(UnknownHostHoleError):
            small_design(["L2"], host_holes={"L2": [(0, 0)]})

    def test_lattice_too_small_for_layer(self):
        with pytest.raises(UnknownHostHoleError, match="enlarge"):
            build_cavity_design(LatticeSpec(nx=9, ny=5), DefectSpec(), ["L4"])

    def test_host_claimed_twice(self):
        with pytest.raises(DuplicateHostError):
            small_design(["L2", "L3"], host_holes={"L3": [(2, 0)]})

    def test_even_defect_rejected(self):
        with pytest.raises(ValidationError):
            DefectSpec(removed_holes=4)

    def test_reduced_radius_above_lattice_radius(self):
        with pytest.raises(ValidationError):
            CavityDesign(lattice=SMALL_LATTICE, defect=DefectSpec(reduced_radius_norm=0.35))

    def test_effective_index_above_slab(self):
        with pytest.raises(ValidationError):
            LatticeSpec(n_eff=3.6)

    def test_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            small_design(["L2"], host_holes={"L2": [(0, 0)]})


class TestRaster:
    def test_odd_shape_centred_origin(self):
        pmap = rasterize_epsilon(small_design(), dx_nm=20.0, pml_cells=10)
        ny, nx = pmap.shape
        assert ny % 2 == 1 and nx % 2 == 1
        assert pmap.origin == (ny // 2, nx // 2)
        assert pmap.x_nm[pmap.origin[1]] == 0.0

    def test_map_covers_lattice_and_pml(self):
        pmap = rasterize_epsilon(small_design(), dx_nm=20.0, pml_cells=10, margin_periods=1.0)
        holes = lattice_holes(small_design())
        assert pmap.x_nm.max() >= max(h.x_nm for h in holes) + SMALL_LATTICE.a_nm
        # The outermost ring, PML included, is bare slab.
        slab = SMALL_LATTICE.n_eff**2
        assert np.all(pmap.epsilon[:, :10] == slab)
        assert np.all(pmap.epsilon[-10:] == slab)

    def test_mirror_symmetric(self):
        pmap = rasterize_epsilon(small_design(["L2", "L3", "L4"]), dx_nm=20.0)
        eps = pmap.epsilon
        np.testing.assert_allclose(eps, eps[:, ::-1], atol=1e-12)
        np.testing.assert_allclose(eps, eps[::-1, :], atol=1e-12)

    def test_epsilon_bounds(self):
        pmap = rasterize_epsilon(small_design(), dx_nm=20.0)
        assert pmap.epsilon.min() >= 1.0 - 1e-12
        assert pmap.epsilon.max() == pytest.approx(SMALL_LATTICE.n_eff**2)

    def test_defect_centre_is_slab(self):
        pmap = rasterize_epsilon(small_design(), dx_nm=20.0)
        assert pmap.epsilon[pmap.origin] == pytest.approx(SMALL_LATTICE.n_eff**2)

    def test_annuli_add_air(self):
        bare = rasterize_epsilon(small_design(), dx_nm=10.0)
        perturbed = rasterize_epsilon(small_design(["L2", "L3", "L4"]), dx_nm=10.0)
        assert 0 < bare.air_fraction() < perturbed.air_fraction() < 1

    def test_air_area_matches_holes(self):
        design = small_design()
        pmap = rasterize_epsilon(design, dx_nm=20.0)
        holes = math.pi * sum(h.radius_nm**2 for h in lattice_holes(design))
        assert air_area(pmap) == pytest.approx(holes, rel=0.02)
        map_area = pmap.shape[0] * pmap.shape[1] * pmap.dx_nm**2
        assert pmap.air_fraction() == pytest.approx(holes / map_area, rel=0.02)

    def test_annuli_resolved_at_coarsest_pitch(self):
        design = small_design(["L2", "L3", "L4"])
        added = math.pi * sum(
            h.outer_radius_nm**2 - h.radius_nm**2 for h in lattice_holes(design) if h.layer is not None
        )
        bare = rasterize_epsilon(small_design(), dx_nm=20.0)
        perturbed = rasterize_epsilon(design, dx_nm=20.0)
        assert air_area(perturbed) - air_area(bare) == pytest.approx(added, rel=0.02)

    def test_halving_pitch_converges(self):
        # Sub-cell centres sit on half-integer multiples of dx/2 around the hole,
        # so the painted areas are exact lattice-point counts: 4, 32, 112, 448 points.
        hole = Hole(i=0, j=0, x_nm=0.0, y_nm=0.0, radius_nm=30.0)
        areas = []
        for dx in (40.0, 20.0, 10.0, 5.0):
            eps = paint_holes([hole], (41, 41), dx, (20, 20), n_eff=2.0, supersample=2)
            areas.append((4.0 - eps).sum() / 3.0 * dx**2)
        np.testing.assert_allclose(areas, [1600.0, 3200.0, 2800.0, 2800.0])
        changes = np.abs(np.diff(areas))
        assert changes[1] < changes[0]
        assert changes[2] < changes[1]
        assert areas[-1] == pytest.approx(math.pi * 30.0**2, rel=0.02)

    def test_deterministic(self, tmp_path):
        design = small_design(["L2", "L3", "L4"])
        first = rasterize_epsilon(design, dx_nm=20.0)
        second = rasterize_epsilon(design, dx_nm=20.0)
        assert first.epsilon.tobytes() == second.epsilon.tobytes()
        first.to_csv(tmp_path / "a.csv")
        second.to_csv(tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_too_coarse(self):
        with pytest.raises(ResolutionError):
            rasterize_epsilon(small_design(), dx_nm=25.0)

    def test_partial_cells_weight_area(self):
        hole = Hole(i=0, j=0, x_nm=0.0, y_nm=0.0, radius_nm=100.0)
        eps = paint_holes([hole], (61, 61), 5.0, (30, 30), n_eff=2.0)
        air = (4.0 - eps).sum() / 3.0
        assert air * 25.0 == pytest.approx(math.pi * 100.0**2, rel=0.01)

    def test_csv_header(self, tmp_path):
        pmap = rasterize_epsilon(small_design(), dx_nm=20.0)
        path = tmp_path / "epsilon.csv"
        pmap.to_csv(path)
        assert "dx_nm=20.0" in path.read_text().splitlines()[0]
        assert np.loadtxt(path, delimiter=",").shape == pmap.shape


class TestDesignDocuments:
    def test_keys_carry_units(self, tmp_path):
        path = tmp_path / "design.json"
        dump_design(small_design(["L2"]), path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        assert doc["lattice"]["a_nm"] == 240.0
        assert doc["perturbation_layers"][0]["annulus_width_nm"] == 5.0
        assert doc["perturbation_layers"][0]["label"] == "L2"

    def test_load_checks_overlap(self, tmp_path):
        path = tmp_path / "design.json"
        doc = json.loads(small_design(["L3"]).model_dump_json())
        doc["perturbation_layers"][0]["annulus_width_nm"] = 50.0
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(GeometricOverlapError):
            load_design(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "design.json"
        doc = json.loads(small_design().model_dump_json())
        doc["lattice"]["a"] = 240
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ValidationError):
            load_design(path)

    def test_reload_gives_same_design(self, tmp_path):
        path = tmp_path / "design.json"
        design = small_design(["L2", "L3", "L4"])
        dump_design(design, path)
        assert load_design(path) == design
