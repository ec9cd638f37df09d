import math

import numpy as np
import pytest

from coorbit.discrete_ps import heisenberg_finite_system
from coorbit.frame_core import (
    IndexGrid,
    RegularizerSpec,
    SampleVector,
    TomographicSystem,
    admissibility_constant,
    analyze,
    check_vacuum_invariance,
    coorbit_norm,
    frame_bounds,
    grid_from_json,
    grid_to_json,
    roundtrip,
    sample_from_json,
    sample_to_json,
    synthesize,
)
from coorbit.opalg import Operator, hs_inner
from coorbit.spin_moyal import SpinParams, kernel_direct, moyal_system, sphere_grid


def random_state(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return Operator(rho / np.trace(rho).real)


class TestIndexGrid:
    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            IndexGrid(((0.0,), (1.0,)), np.array([1.0, 0.0]))

    def test_rejects_misaligned_weights(self):
        with pytest.raises(ValueError):
            IndexGrid(((0.0,),), np.array([1.0, 1.0]))

    def test_grid_id_depends_on_content(self):
        g1 = IndexGrid(((0.0,), (1.0,)), np.array([1.0, 2.0]))
        g2 = IndexGrid(((0.0,), (1.0,)), np.array([1.0, 2.5]))
        assert g1.grid_id != g2.grid_id
        assert g1.grid_id == IndexGrid(g1.nodes, g1.weights).grid_id


class TestSerialization:
    def test_grid_round_trip_bit_exact(self):
        rng = np.random.default_rng(0)
        nodes = tuple((rng.normal(), rng.normal()) for _ in range(17))
        grid = IndexGrid(nodes, rng.random(17) + 0.1)
        text = grid_to_json(grid)
        back = grid_from_json(text)
        assert grid_to_json(back) == text
        assert back.nodes == grid.nodes
        assert np.array_equal(back.weights, grid.weights)

    def test_sample_round_trip_bit_exact(self):
        rng = np.random.default_rng(1)
        s = SampleVector(rng.normal(size=9) + 1j * rng.normal(size=9), "abc123")
        text = sample_to_json(s)
        back = sample_from_json(text)
        assert sample_to_json(back) == text
        assert np.array_equal(back.values, s.values)


class TestAnalyzeSynthesize:
    def test_analyze_identity_on_lattice(self):
        # Tr U(q,p)^dag vanishes except at the origin node
        sys = heisenberg_finite_system(2)
        s = analyze(sys, Operator(np.eye(2)))
        assert s.values[0] == pytest.approx(2)
        assert np.abs(s.values[1:]).max() < 1e-14

    def test_analyze_zero_operator(self):
        sys = heisenberg_finite_system(2)
        s = analyze(sys, Operator(np.zeros((2, 2))))
        assert np.abs(s.values).max() == 0

    def test_analyze_spin_north_pole(self):
        p = SpinParams(1)
        sys = moyal_system(p, sphere_grid(p))
        s = analyze(sys, kernel_direct(p, 0.0, 0.0))
        # the node closest to the pole pairs the direct and dual kernels
        thetas = np.array([n[0] for n in sys.grid.nodes])
        values = np.array([(1 + 3 * math.cos(t)) / 2 for t in thetas])
        assert np.abs(s.values - values).max() < 1e-10

    def test_analyze_linearity(self):
        rng = np.random.default_rng(2)
        sys = heisenberg_finite_system(3)
        a = Operator(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        b = Operator(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        al, be = 0.3 - 1j, 2.5 + 0.25j
        combo = analyze(sys, Operator(al * a.entries + be * b.entries))
        direct = al * analyze(sys, a).values + be * analyze(sys, b).values
        assert np.abs(combo.values - direct).max() < 1e-12

    def test_synthesize_zero_samples(self):
        sys = heisenberg_finite_system(2)
        s = SampleVector(np.zeros(4, dtype=complex), sys.grid.grid_id)
        assert np.abs(synthesize(sys, s).entries).max() == 0

    def test_synthesize_single_node(self):
        sys = heisenberg_finite_system(2)
        values = np.zeros(4, dtype=complex)
        values[2] = 1.5j
        s = SampleVector(values, sys.grid.grid_id)
        node = sys.grid.nodes[2]
        expect = sys.grid.weights[2] * 1.5j * sys.synthesis(node).entries
        assert np.abs(synthesize(sys, s).entries - expect).max() < 1e-15

    def test_synthesize_rejects_misaligned(self):
        sys = heisenberg_finite_system(2)
        with pytest.raises(ValueError):
            synthesize(sys, SampleVector(np.zeros(4, dtype=complex), "wrong"))

    def test_adjoint_consistency(self):
        # <synthesize(s), o> = sum_i w_i s_i conj(analyze(o)_i) for a
        # self-paired family
        rng = np.random.default_rng(3)
        sys = heisenberg_finite_system(3)
        o = Operator(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        s = SampleVector(rng.normal(size=9) + 1j * rng.normal(size=9), sys.grid.grid_id)
        lhs = hs_inner(synthesize(sys, s), o)
        rhs = np.sum(sys.grid.weights * np.conj(s.values) * analyze(sys, o).values)
        assert abs(lhs - rhs) < 1e-10


class TestRoundtrip:
    def test_lattice_parseval_exact(self):
        rng = np.random.default_rng(4)
        sys = heisenberg_finite_system(2)
        rho = random_state(rng, 2)
        _, err = roundtrip(sys, rho)
        assert err < 1e-12

    def test_spin_exact_grid(self):
        rng = np.random.default_rng(5)
        p = SpinParams(2)
        sys = moyal_system(p, sphere_grid(p))
        _, err = roundtrip(sys, random_state(rng, 3))
        assert err < 1e-10


class TestAdmissibility:
    def test_spin_constant_and_projection(self):
        p = SpinParams(1)
        sys = moyal_system(p, sphere_grid(p))
        res = admissibility_constant(sys, sys.vacuum, sys.test_functional)
        assert res.constant == pytest.approx(2, abs=1e-10)
        assert res.projection == pytest.approx(1, abs=1e-10)

    def test_zero_vacuum_gives_zero(self):
        p = SpinParams(1)
        sys = moyal_system(p, sphere_grid(p))
        res = admissibility_constant(sys, Operator(np.zeros((2, 2))), sys.test_functional)
        assert abs(res.constant) < 1e-14


class TestVacuumInvariance:
    def test_stabilizer_rotations_fix_spin_vacuum(self):
        from coorbit.opalg import matrix_exp

        p = SpinParams(1)
        sys = moyal_system(p, sphere_grid(p))
        jz = np.diag([0.5, -0.5])
        samples = [matrix_exp(Operator(-1j * a * jz)) for a in (0.3, 1.1, 2.0)]
        for entry in check_vacuum_invariance(sys, samples):
            assert entry["residual"] < 1e-12
            assert entry["chi"] == pytest.approx(1, abs=1e-12)

    def test_identity_vacuum_fixed_by_anything(self):
        sys = heisenberg_finite_system(2)
        report = check_vacuum_invariance(sys, [sys.analysis(n) for n in sys.grid.nodes])
        assert max(e["residual"] for e in report) < 1e-12

    def test_wrong_vacuum_detected(self):
        p = SpinParams(1)
        sys = moyal_system(p, sphere_grid(p))
        bad = TomographicSystem(
            dim=sys.dim,
            grid=sys.grid,
            analysis=sys.analysis,
            synthesis=sys.synthesis,
            vacuum=Operator(np.array([[0, 1], [1, 0]], dtype=complex)),
            test_functional=sys.test_functional,
            normalization=sys.normalization,
        )
        from coorbit.opalg import matrix_exp

        jz = np.diag([0.5, -0.5])
        report = check_vacuum_invariance(bad, [matrix_exp(Operator(-1j * 1.0 * jz))])
        assert report[0]["residual"] > 0.1


class TestCoorbitNorm:
    def test_zero_samples(self):
        grid = IndexGrid(((0.0,),), np.array([2.0]))
        assert coorbit_norm(SampleVector(np.zeros(1, dtype=complex), grid.grid_id), grid, 2) == 0

    def test_parseval_matches_hs_norm(self):
        sys = heisenberg_finite_system(2)
        rho = Operator(np.diag([1.0, 0.0]))
        s = analyze(sys, rho)
        assert coorbit_norm(s, sys.grid, 2) == pytest.approx(1, abs=1e-12)

    def test_single_sample_weight_scaling(self):
        grid = IndexGrid(((0.0,),), np.array([0.7]))
        s = SampleVector(np.array([1.0 + 0j]), grid.grid_id)
        assert coorbit_norm(s, grid, 3) == pytest.approx(0.7 ** (1 / 3), abs=1e-14)

    def test_sup_norm(self):
        grid = IndexGrid(((0.0,), (1.0,)), np.array([0.5, 0.5]))
        s = SampleVector(np.array([1.0, -3.0j]), grid.grid_id)
        assert coorbit_norm(s, grid, math.inf) == 3

    def test_rejects_exponent_below_one(self):
        grid = IndexGrid(((0.0,),), np.array([1.0]))
        with pytest.raises(ValueError):
            coorbit_norm(SampleVector(np.array([1.0 + 0j]), grid.grid_id), grid, 0.5)


class TestFrameBounds:
    def test_lattice_parseval_bounds(self):
        for n in (2, 3, 4):
            report = frame_bounds(heisenberg_finite_system(n))
            assert abs(report.A - 1) < 1e-12
            assert abs(report.B - 1) < 1e-12

    def test_spin_bounds(self):
        p = SpinParams(1)
        report = frame_bounds(moyal_system(p, sphere_grid(p)))
        assert abs(report.A - 1) < 1e-10
        assert abs(report.B - 1) < 1e-10

    def test_weight_doubling_scales_bounds(self):
        sys = heisenberg_finite_system(2)
        doubled = TomographicSystem(
            dim=sys.dim,
            grid=IndexGrid(sys.grid.nodes, 2 * np.asarray(sys.grid.weights)),
            analysis=sys.analysis,
            synthesis=sys.synthesis,
            vacuum=sys.vacuum,
            test_functional=sys.test_functional,
            normalization=sys.normalization,
        )
        report = frame_bounds(doubled)
        assert report.A == pytest.approx(math.sqrt(2), abs=1e-12)
        assert report.B == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_empirical_bounds_for_other_exponents(self):
        report = frame_bounds(heisenberg_finite_system(2), d=4, sample_count=32)
        assert 0 < report.A <= report.B


class TestRegularizer:
    def test_unit_at_zero(self):
        assert RegularizerSpec(2.0)(0.0) == 1.0

    def test_width(self):
        r = RegularizerSpec(3.0)
        assert r(3.0) == pytest.approx(math.exp(-0.5), abs=1e-15)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            RegularizerSpec(-1.0)
        with pytest.raises(ValueError):
            RegularizerSpec(1.0, kind="boxcar")
