import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasekit.errors import CutoffTooSmall, EmptyState, InvalidSpectrum, NotNormalized
from phasekit.spectrum import (Generator, ReducedState, Spectrum, multipath_degeneracy_set,
                               occupation_map_from_json, occupation_map_to_json, partition_count,
                               project_to_reduced, symmetrized_vector, two_mode_lambda_basis)


def brute_occupations(M, n):
    """Every occupation tuple (k_1..k_M) with sum l*k_l == n."""
    ranges = [range(n // l + 1) for l in range(1, M + 1)]
    return sorted(o for o in itertools.product(*ranges)
                  if sum(l * k for l, k in enumerate(o, start=1)) == n)


def brute_partitions(n, largest):
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in brute_partitions(n - part, part):
            yield (part,) + rest


class TestSpectrum:
    def test_parse_forms(self):
        assert Spectrum.parse("zq:10") == Spectrum.zq(10)
        assert Spectrum.parse("naturals:0:63").size == 64
        assert Spectrum.parse("integers:-3:3").lo == -3

    @pytest.mark.parametrize("text", ["zq:1", "naturals:-1:4", "integers:3:2", "naturals:2:2", "foo:1"])
    def test_invalid(self, text):
        with pytest.raises(InvalidSpectrum):
            Spectrum.parse(text)

    def test_modq_window_fixed(self):
        with pytest.raises(InvalidSpectrum):
            Spectrum("ModQ", 0, 4, 3)

    def test_json_roundtrip(self):
        s = Spectrum.zq(5)
        assert s.to_dict() == {"kind": "ModQ", "q": 5, "window": [0, 4]}
        assert Spectrum.from_dict(s.to_dict()) == s


class TestDegeneracy:
    def test_m3_n3(self):
        got = multipath_degeneracy_set(3, 3)
        assert {ix.nu for ix in got} == {(0, 0), (1, 0), (0, 1)}
        assert {ix.occupations for ix in got} == {(3, 0, 0), (1, 1, 0), (0, 0, 1)}

    @pytest.mark.parametrize("M", [1, 2, 5])
    def test_vacuum(self, M):
        got = multipath_degeneracy_set(M, 0)
        assert len(got) == 1 and got[0].occupations == (0,) * M

    def test_m2_n4(self):
        assert sorted(ix.nu for ix in multipath_degeneracy_set(2, 4)) == [(0,), (1,), (2,)]

    def test_m1_trivial(self):
        got = multipath_degeneracy_set(1, 5)
        assert len(got) == 1 and got[0].nu == () and got[0].occupations == (5,)

    @pytest.mark.parametrize("M,n,expected", [(2, 4, 3), (1, 7, 1), (3, 4, 4)])
    def test_partition_examples(self, M, n, expected):
        assert partition_count(M, n) == expected

    def test_matches_brute_force(self):
        for M in range(1, 5):
            for n in range(0, 13):
                got = sorted(ix.occupations for ix in multipath_degeneracy_set(M, n))
                assert got == brute_occupations(M, n)
                assert len(got) == partition_count(M, n)

    def test_monotone_in_modes(self):
        for n in range(0, 25):
            counts = [partition_count(M, n) for M in range(1, 30)]
            assert counts == sorted(counts)
            assert partition_count(n + 3, n) == sum(1 for _ in brute_partitions(n, n))

    @given(st.integers(1, 6), st.integers(0, 20))
    def test_constraint_holds(self, M, n):
        for ix in multipath_degeneracy_set(M, n):
            assert ix.nu1 >= 0
            assert sum(l * k for l, k in enumerate(ix.occupations, start=1)) == n


class TestSymmetrized:
    def test_m2_n2(self):
        vec = symmetrized_vector(2, 2)
        assert set(vec) == {(2, 0), (0, 1)}
        assert all(v == pytest.approx(1 / math.sqrt(2), abs=1e-15) for v in vec.values())

    def test_vacuum(self):
        assert symmetrized_vector(2, 0) == {(0, 0): 1.0}

    def test_m3_n3(self):
        vec = symmetrized_vector(3, 3)
        assert len(vec) == 3
        assert sum(v * v for v in vec.values()) == pytest.approx(1.0, abs=1e-15)

    def test_cutoff(self):
        with pytest.raises(CutoffTooSmall):
            symmetrized_vector(2, 5, fock_cutoff=3)
        symmetrized_vector(2, 5, fock_cutoff=5)


@pytest.mark.parametrize("n,expected", [(3, (3, 0)), (0, (0, 0)), (-2, (0, 2))])
def test_lambda_basis(n, expected):
    assert two_mode_lambda_basis(n) == expected


@given(st.integers(-1000, 1000))
def test_lambda_basis_difference(n):
    a, b = two_mode_lambda_basis(n)
    assert a - b == n and min(a, b) == 0


class TestProjection:
    def test_two_mode_split(self):
        r = 1 / math.sqrt(2)
        red = project_to_reduced({(1, 0): r, (0, 1): r}, Generator.two_mode())
        assert red.weight(1) == pytest.approx(r) and red.weight(-1) == pytest.approx(r)
        assert red.weight(0) == 0.0
        assert red.null_indices == [0]

    def test_multipath_single(self):
        red = project_to_reduced({(2, 0): 1.0}, Generator.multipath(2))
        assert red.weight(2) == 1.0
        assert red.weight(0) == 0.0 and red.weight(1) == 0.0

    def test_two_mode_same_eigenspace(self):
        r = 1 / math.sqrt(2)
        red = project_to_reduced({(1, 0): r, (2, 1): r}, Generator.two_mode())
        assert red.weight(1) == pytest.approx(1.0)
        vec = red.basis[1]
        assert vec[(1, 0)] == pytest.approx(r) and vec[(2, 1)] == pytest.approx(r)

    def test_phases_recorded(self):
        r = 1 / math.sqrt(2)
        red = project_to_reduced({(1, 0): 1j * r, (0, 1): -r}, Generator.two_mode())
        assert red.phases[red.spectrum.position(1)] == pytest.approx(1j)
        assert red.phases[red.spectrum.position(-1)] == pytest.approx(-1)
        assert np.all(red.weights >= 0)

    def test_null_uses_default_basis(self):
        red = project_to_reduced({(2, 0): 1.0}, Generator.multipath(2))
        assert red.basis[1] == {(1, 0): 1.0}

    def test_errors(self):
        with pytest.raises(NotNormalized):
            project_to_reduced({(1, 0): 0.5}, Generator.two_mode())
        with pytest.raises(EmptyState):
            project_to_reduced({}, Generator.two_mode())
        with pytest.raises(CutoffTooSmall):
            project_to_reduced({(4, 0): 1.0}, Generator.two_mode(), cutoff=3)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4),
                              st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=12))
    def test_norm_preserved(self, terms):
        state = {}
        for a, b, re, im in terms:
            state[(a, b)] = complex(re, im)
        norm = math.sqrt(sum(abs(v) ** 2 for v in state.values()))
        if norm < 1e-3:
            return
        state = {k: v / norm for k, v in state.items()}
        for gen in (Generator.two_mode(), Generator.multipath(2)):
            red = project_to_reduced(state, gen)
            assert float(red.weights @ red.weights) == pytest.approx(1.0, abs=1e-12)
            # eigenspace norms straight from the definition
            for n in red.spectrum.indices:
                direct = math.sqrt(sum(abs(v) ** 2 for k, v in state.items() if gen.eigenvalue(k) == n))
                assert red.weight(int(n)) == pytest.approx(direct, abs=1e-12)


class TestReducedState:
    def test_rejects_unnormalized(self):
        with pytest.raises(NotNormalized):
            ReducedState(Spectrum.naturals(0, 1), [1.0, 1.0])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ReducedState(Spectrum.naturals(0, 1), [-1.0, 0.0])

    def test_json(self):
        st_ = ReducedState.from_weights(Spectrum.integers(-1, 1), [1, 0, 1])
        d = st_.to_dict()
        assert d["null_indices"] == [0]
        assert d["spectrum"]["kind"] == "AllIntegers"
        back = ReducedState.from_dict(d)
        np.testing.assert_allclose(back.weights, st_.weights)

    def test_occupation_json(self):
        m = {(1, 0): 0.5 + 0.5j, (0, 2): -0.5}
        items = occupation_map_to_json(m)
        assert items[0] == {"occ": [0, 2], "re": -0.5, "im": 0.0}
        assert occupation_map_from_json(items) == m
