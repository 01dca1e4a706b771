"""
Tests for the energy app
"""

import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from energy.domain import GeometricError, MaterialParams, PowerLog
from energy.exceptions import EnergyModelError, PowerLogError
from energy.io import dump_material, dump_power_log, load_material, load_power_log
from energy.services import (
    analytic_energy,
    geometric_error,
    integrate_power,
    layer_energies_from_log,
    melting_energy,
    print_time,
    stack_deviation,
    thermal_deviation,
    window_energy,
)
from energy.validators import validate_infill_rate, validate_material, validate_velocity
from meshes.primitives import square_tube, unit_cube
from slicer.services import slice_mesh

MATERIAL = {
    "specific_heat": 2.0,
    "density": 1200.0,
    "melt_temperature": 498.15,
    "ambient_temperature": 298.15,
    "latent_heat": 100.0,
    "filament_area": 1.0,
}


class AnalyticEnergyTests(SimpleTestCase):
    def setUp(self):
        self.material = MaterialParams.from_dict(MATERIAL)

    def test_melting_energy(self):
        # 1e-5 m^3 of filament
        self.assertAlmostEqual(melting_energy(self.material, 1e4), 6.0, places=12)
        self.assertEqual(melting_energy(self.material, 0.0), 0.0)
        with self.assertRaises(EnergyModelError):
            melting_energy(self.material, -1.0)

    def test_print_time(self):
        self.assertAlmostEqual(print_time(1000.0, 1.0, 0.2, 50.0), 100.0, places=12)
        for args in ((1000.0, 0.0, 0.2, 50.0), (1000.0, 1.0, 0.2, 0.0)):
            with self.assertRaises(EnergyModelError):
                print_time(*args)

    def test_path_length_gives_motion_energy(self):
        report = analytic_energy(
            self.material,
            1000.0,
            infill_rate=0.5,
            velocity=50.0,
            working_power=100.0,
            length=500.0,
        )
        self.assertAlmostEqual(report.print_time, 10.0, places=12)
        self.assertAlmostEqual(report.motion, 1.0, places=12)
        self.assertAlmostEqual(
            report.melting, melting_energy(self.material, 500.0), places=12
        )
        self.assertAlmostEqual(report.total, report.melting + 1.0, places=12)
        self.assertIsNone(report.to_dict()["E_total"])

    def test_thicker_layers_print_faster(self):
        options = {"infill_rate": 0.2, "velocity": 30.0, "line_width": 0.4}
        thin = analytic_energy(self.material, 5000.0, layer_thickness=0.2, **options)
        thick = analytic_energy(self.material, 5000.0, layer_thickness=0.4, **options)
        self.assertAlmostEqual(thin.print_time, 2 * thick.print_time, places=9)
        self.assertLess(thick.total, thin.total)
        self.assertEqual(thin.melting, thick.melting)


class MaterialTests(SimpleTestCase):
    def test_unknown_and_missing_fields(self):
        with self.assertRaisesMessage(EnergyModelError, "viscosity"):
            MaterialParams.from_dict({**MATERIAL, "viscosity": 1.0})
        partial = dict(MATERIAL)
        del partial["density"]
        with self.assertRaisesMessage(EnergyModelError, "density"):
            MaterialParams.from_dict(partial)

    def test_values_must_be_physical(self):
        with self.assertRaises(EnergyModelError):
            MaterialParams.from_dict({**MATERIAL, "density": 0.0})
        with self.assertRaises(EnergyModelError):
            MaterialParams.from_dict({**MATERIAL, "melt_temperature": 290.0})

    def test_default_material_is_valid(self):
        self.assertGreater(MaterialParams.default().filament_area, 0.0)

    def test_validators(self):
        validate_material(MATERIAL)
        with self.assertRaises(ValidationError):
            validate_material({**MATERIAL, "latent_heat": -5.0})
        with self.assertRaises(ValidationError):
            validate_material(["not", "a", "dict"])
        validate_infill_rate(1.0)
        with self.assertRaises(ValidationError):
            validate_infill_rate(1.5)
        with self.assertRaises(ValidationError):
            validate_velocity(0.0)


class PowerLogTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def test_constant_power(self):
        self.assertAlmostEqual(integrate_power(([0.0, 60.0], [100.0, 100.0])), 6.0)
        log = PowerLog(np.linspace(0.0, 60.0, 61), np.full(61, 100.0))
        self.assertAlmostEqual(integrate_power(log), 6.0, places=12)

    def test_linear_ramp(self):
        log = PowerLog(np.linspace(0.0, 60.0, 7), np.linspace(0.0, 100.0, 7))
        self.assertAlmostEqual(integrate_power(log), 3.0, places=12)

    def test_split_windows_add_up(self):
        times = np.linspace(0.0, 90.0, 10)
        powers = 100.0 + 40.0 * np.sin(times / 15.0)
        whole = integrate_power(PowerLog(times, powers))
        for cut in (3, 5, 8):
            with self.subTest(cut=cut):
                head = integrate_power(PowerLog(times[: cut + 1], powers[: cut + 1]))
                tail = integrate_power(PowerLog(times[cut:], powers[cut:]))
                self.assertAlmostEqual(head + tail, whole, places=12)
        single = integrate_power(PowerLog([0.0, 60.0], [0.0, 100.0]))
        halves = integrate_power(PowerLog([0.0, 30.0, 60.0], [0.0, 50.0, 100.0]))
        self.assertAlmostEqual(single, halves, places=12)

    def test_single_sample(self):
        with self.assertRaises(EnergyModelError):
            integrate_power(PowerLog([0.0], [10.0]))

    def test_bad_samples_are_located(self):
        with self.assertRaises(PowerLogError) as caught:
            PowerLog([0.0, 1.0, 1.0], [5.0, 5.0, 5.0])
        self.assertEqual(caught.exception.index, 2)
        with self.assertRaises(PowerLogError) as caught:
            PowerLog([0.0, 1.0, 2.0], [5.0, -1.0, 5.0])
        self.assertEqual(caught.exception.index, 1)
        with self.assertRaises(PowerLogError):
            PowerLog([0.0, 1.0], [5.0])

    def test_window_energy_interpolates(self):
        log = PowerLog([0.0, 60.0], [0.0, 100.0])
        self.assertAlmostEqual(window_energy(log, 30.0, 60.0), 2.25, places=12)

    def test_split_across_layers(self):
        log = PowerLog([0.0, 60.0], [100.0, 100.0])
        energies = layer_energies_from_log(log, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(energies, [1.0, 2.0, 3.0], atol=1e-12)
        self.assertAlmostEqual(energies.sum(), integrate_power(log), places=12)
        with self.assertRaises(EnergyModelError):
            layer_energies_from_log(log, [0.0, 0.0])

    def test_csv_files(self):
        log = PowerLog([0.0, 0.5, 1.5], [90.0, 110.0, 100.0])
        loaded = load_power_log(dump_power_log(log, self.root / "log.csv"))
        np.testing.assert_array_equal(loaded.times, log.times)
        np.testing.assert_array_equal(loaded.powers, log.powers)

    def test_csv_errors(self):
        path = self.root / "bad.csv"
        path.write_text("time,power\n0,1\n")
        with self.assertRaisesMessage(PowerLogError, "t_seconds"):
            load_power_log(path)
        path.write_text("t_seconds,watts\n0,100\n1,lots\n")
        with self.assertRaises(PowerLogError) as caught:
            load_power_log(path)
        self.assertEqual(caught.exception.index, 1)

    def test_material_file(self):
        material = MaterialParams.from_dict(MATERIAL)
        path = dump_material(material, self.root / "material.json")
        self.assertEqual(load_material(path), material)


class GeometricErrorTests(SimpleTestCase):
    def test_largest_deviation_wins(self):
        error = geometric_error([[1.0, 0.0], [3.0, 4.0], [0.0, -2.0]])
        self.assertEqual(error.value, 5.0)
        self.assertEqual(error.facet, 1)
        np.testing.assert_allclose(error.norms, [1.0, 5.0, 2.0])

    def test_needs_a_facet(self):
        with self.assertRaises(EnergyModelError):
            geometric_error(np.zeros((0, 2)))

    def test_tolerance_classes(self):
        error = geometric_error([[1.0, 0.0], [3.0, 4.0], [0.0, -2.0]], [2, 1])
        self.assertEqual(error.isolated["line"], 5.0)
        self.assertEqual(error.isolated["round"], 4.0)
        self.assertAlmostEqual(error.associated["loc"], np.hypot(4.0, 2.0) / 3.0)
        self.assertEqual(error.associated["para"], 3.0)
        payload = error.to_dict()
        self.assertEqual(set(payload["isolated"]), {"line", "round"})
        self.assertEqual(set(payload["associated"]), {"loc", "para"})
        self.assertNotIn("para", geometric_error([[1.0, 0.0]]).associated)
        with self.assertRaises(EnergyModelError):
            geometric_error([[1.0, 0.0], [0.0, 1.0]], [1, 2])

    def test_tolerance_class_keys_are_checked(self):
        with self.assertRaises(ValueError):
            GeometricError(0.1, 0, [[0.1, 0.0]], associated={"wobble": 0.1})
        with self.assertRaises(EnergyModelError):
            GeometricError(0.1, 0, [[0.1, 0.0]], isolated={"round": -1.0})

    def test_uniform_offset_of_a_square_has_no_shift(self):
        layer = slice_mesh(unit_cube(), 0.5)[0]
        deviations = thermal_deviation(layer, 5.0, 0.2, coefficient=0.01)
        error = geometric_error(deviations)
        self.assertAlmostEqual(error.value, 0.01, places=12)
        self.assertAlmostEqual(error.isolated["round"], 0.0, places=12)
        self.assertAlmostEqual(error.associated["loc"], 0.0, places=12)

    def test_linear_surrogate_example(self):
        layer = slice_mesh(unit_cube(), 0.5)[0]
        deviations = thermal_deviation(layer, 5.0, 0.2, coefficient=0.01)
        np.testing.assert_allclose(np.hypot(*deviations.T), 0.01, atol=1e-15)
        doubled = thermal_deviation(layer, 5.0, 0.2, coefficient=0.02)
        np.testing.assert_allclose(doubled, 2.0 * deviations, atol=1e-15)
        flat = thermal_deviation(layer, 0.0, 0.2, coefficient=0.01)
        np.testing.assert_array_equal(flat, 0.0)

    def test_deviation_points_out_of_the_solid(self):
        stack = slice_mesh(unit_cube(), 0.5)
        layer = stack[0]
        deviations = thermal_deviation(layer, 10.0, 0.5, coefficient=0.01)
        self.assertEqual(len(deviations), len(layer.polygons[0]))
        np.testing.assert_allclose(np.hypot(*deviations.T), 0.05)
        starts = layer.polygons[0]
        ends = np.roll(starts, -1, axis=0)
        midpoints = (starts + ends) / 2.0
        pushed = midpoints + deviations
        centre = np.array([0.5, 0.5])
        self.assertTrue(
            np.all(
                np.abs(pushed - centre).max(axis=1)
                > np.abs(midpoints - centre).max(axis=1)
            )
        )

    def test_hole_boundary_moves_into_the_hole(self):
        layer = slice_mesh(square_tube(), 0.5)[0]
        hole = int(np.argmin(layer.signed_areas))
        others = sum(len(p) for p in layer.polygons[:hole])
        deviations = thermal_deviation(layer, 10.0, 0.5, coefficient=0.01)
        loop = layer.polygons[hole]
        midpoints = (loop + np.roll(loop, -1, axis=0)) / 2.0
        pushed = midpoints + deviations[others : others + len(loop)]
        centre = np.array([1.0, 1.0])
        self.assertTrue(
            np.all(
                np.abs(pushed - centre).max(axis=1)
                < np.abs(midpoints - centre).max(axis=1)
            )
        )

    def test_stack_deviation_covers_every_segment(self):
        stack = slice_mesh(unit_cube(), 0.25)
        deviations = stack_deviation(stack, 5.0, 0.25, coefficient=0.02)
        segments = sum(len(p) for layer in stack for p in layer.polygons)
        self.assertEqual(deviations.shape, (segments, 2))
        self.assertAlmostEqual(geometric_error(deviations).value, 0.025)

    def test_negative_coefficient(self):
        layer = slice_mesh(unit_cube(), 0.5)[0]
        with self.assertRaises(EnergyModelError):
            thermal_deviation(layer, 10.0, 0.5, coefficient=-1.0)
