import math

import numpy as np
import pytest

from phasekit.cost import builtin_cost, min_cost, CostModel
from phasekit.errors import GridTooCoarse
from phasekit.pom import (conditional_density, discrete_average_cost, discrete_completeness_residual,
                          discrete_pom_zq, e_vector, orthogonality_check_two_mode,
                          pom_completeness_residual)
from phasekit.spectrum import Generator, ReducedState, Spectrum, project_to_reduced

from conftest import random_state

R2 = 1 / math.sqrt(2)


class TestEVector:
    def test_zero_phase(self):
        np.testing.assert_array_equal(e_vector(Spectrum.integers(-3, 3), 0.0).amplitudes, np.ones(7))

    def test_pi(self):
        np.testing.assert_allclose(e_vector(Spectrum.naturals(0, 2), math.pi).amplitudes, [1, -1, 1], atol=1e-15)

    def test_quarter_turn(self):
        np.testing.assert_allclose(e_vector(Spectrum.integers(-1, 1), math.pi / 2).amplitudes,
                                   [-1j, 1, 1j], atol=1e-15)

    def test_unit_modulus_and_norm(self):
        v = e_vector(Spectrum.integers(-5, 7), 1.234)
        np.testing.assert_allclose(np.abs(v.amplitudes), 1.0)
        assert np.vdot(v.amplitudes, v.amplitudes).real == pytest.approx(13)

    def test_two_mode_realization(self):
        v = e_vector(Spectrum.integers(-2, 2), 0.3).occupation_map()
        assert v[(2, 0)] == pytest.approx(np.exp(0.6j))
        assert v[(0, 2)] == pytest.approx(np.exp(-0.6j))
        assert v[(0, 0)] == 1


class TestDensity:
    def test_two_level(self):
        st_ = ReducedState.from_weights(Spectrum.naturals(0, 1), [1, 1])
        d = np.linspace(-4, 4, 33)
        np.testing.assert_allclose(conditional_density(st_, d, 0.0), (1 + np.cos(d)) / (2 * math.pi), atol=1e-15)

    def test_point_state_flat(self):
        st_ = ReducedState(Spectrum.naturals(0, 3), [0, 0, 1, 0])
        np.testing.assert_allclose(conditional_density(st_, np.linspace(0, 6, 13), 0.4), 1 / (2 * math.pi))

    def test_two_mode_gap_two(self):
        red = project_to_reduced({(1, 0): R2, (0, 1): R2}, Generator.two_mode())
        d = np.linspace(-3, 3, 25)
        np.testing.assert_allclose(conditional_density(red, d, 0.0), (1 + np.cos(2 * d)) / (2 * math.pi), atol=1e-15)

    def test_covariance(self):
        rng = np.random.default_rng(1)
        st_ = random_state(rng, Spectrum.integers(-4, 6))
        for _ in range(100):
            a, b, shift = rng.uniform(-7, 7, 3)
            assert conditional_density(st_, a + shift, b + shift) == pytest.approx(
                conditional_density(st_, a, b), abs=1e-14)

    def test_normalized(self):
        rng = np.random.default_rng(2)
        for size in (2, 5, 17, 64):
            st_ = random_state(rng, Spectrum.naturals(0, size - 1), sparse=True)
            grid = 2 * math.pi * np.arange(4 * size) / (4 * size)
            assert np.mean(conditional_density(st_, grid, 0.0)) * 2 * math.pi == pytest.approx(1.0, abs=1e-10)

    def test_rephased_inputs_same_density(self):
        rng = np.random.default_rng(3)
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        amps /= np.linalg.norm(amps)
        twist = np.exp(1j * rng.uniform(0, 2 * math.pi, 4))
        base = project_to_reduced({(n, 0): a for n, a in enumerate(amps)}, Generator.two_mode())
        rot = project_to_reduced({(n, 0): a * t for n, a, t in zip(range(4), amps, twist)}, Generator.two_mode())
        assert not np.allclose(base.phases, rot.phases)
        d = np.linspace(0, 6, 20)
        np.testing.assert_allclose(conditional_density(base, d, 0), conditional_density(rot, d, 0), atol=1e-15)

    def test_density_with_xi_matches_default(self):
        st_ = random_state(np.random.default_rng(4), Spectrum.naturals(0, 5))
        d = np.linspace(0, 6, 9)
        np.testing.assert_allclose(conditional_density(st_, d, 0.0, xi=np.ones((6, 6))),
                                   conditional_density(st_, d, 0.0), atol=1e-15)


class TestDiscrete:
    def test_q2(self):
        p0, p1 = discrete_pom_zq(2)
        np.testing.assert_allclose(p0, np.outer([1, 1], [1, 1]) / 2, atol=1e-15)
        np.testing.assert_allclose(p1, np.outer([1, -1], [1, -1]) / 2, atol=1e-15)

    def test_q3_complete(self):
        assert discrete_completeness_residual(3) < 1e-14

    def test_q4_orthogonal(self):
        spec = Spectrum.zq(4)
        e1 = e_vector(spec, 2 * math.pi / 4).amplitudes
        e3 = e_vector(spec, 2 * math.pi * 3 / 4).amplitudes
        assert abs(np.vdot(e1, e3)) < 1e-14

    def test_projectors_orthogonal(self):
        ps = discrete_pom_zq(6)
        for i, a in enumerate(ps):
            np.testing.assert_allclose(a @ a, a, atol=1e-14)
            for j, b in enumerate(ps):
                if i != j:
                    assert np.max(np.abs(a @ b)) < 1e-14

    def test_same_average_cost(self):
        rng = np.random.default_rng(8)
        for q in (2, 3, 5, 8):
            st_ = random_state(rng, Spectrum.zq(q))
            models = [builtin_cost("variance"), builtin_cost("likelihood", q - 1),
                      builtin_cost("fidelity", 1, st_), CostModel((0.2, 0.5, 0.1))]
            for m in models:
                assert discrete_average_cost(st_, m) == pytest.approx(min_cost(m, st_), abs=1e-10)


class TestCompleteness:
    def test_examples(self):
        assert pom_completeness_residual(Spectrum.naturals(0, 5), 64) < 1e-13
        assert pom_completeness_residual(Spectrum.integers(-3, 3), 32) < 1e-13

    def test_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            pom_completeness_residual(Spectrum.naturals(0, 5), 4)


class TestDirichlet:
    def test_peak(self):
        assert orthogonality_check_two_mode(10, 0.7, 0.7) == pytest.approx(21)

    def test_zero(self):
        assert abs(orthogonality_check_two_mode(10, 2 * math.pi / 21, 0.0)) < 1e-12

    def test_half_turn(self):
        assert orthogonality_check_two_mode(10, math.pi, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_sharpens(self):
        # mass away from the peak averages out while the peak grows linearly
        off = [abs(orthogonality_check_two_mode(d, 1.0, 0.0)) for d in (10, 100, 1000)]
        peaks = [orthogonality_check_two_mode(d, 0.0, 0.0) for d in (10, 100, 1000)]
        assert peaks == [21, 201, 2001]
        assert max(off) < 1 / math.sin(0.5) + 1e-9
