"""Simulator layer: controlled channels, evolution, dephasing, measurement."""

import numpy as np
import pytest

from paritygames import games, quantum, strategies
from paritygames.numkit import DitString, dagger
from paritygames.quantum import (
    BoxProgram,
    DensityState,
    DimensionCapError,
    PathedHilbert,
    Povm,
    average_state_collapse_check,
    classical_dephase,
    controlled_channel,
    definite_path_state,
    evolve,
    identity_program,
    mark_program,
    measure,
    modulo_average_state,
    path_superposition_state,
    phase_program,
    pure_state,
    random_box_program,
    random_density_state,
    random_joint_program,
    run_experiment,
    slit_program,
)

from oracles import born_probability_loop

UNIT2 = DitString(2, (1, 1))


def plus_minus_povm():
    plus = np.full((2, 2), 0.5, dtype=complex)
    return Povm((plus, np.eye(2) - plus))


def random_projective_povm(dim, outcomes, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    _, vecs = np.linalg.eigh((g + dagger(g)) / 2)
    splits = np.array_split(np.arange(dim), outcomes)
    effects = []
    for chunk in splits:
        block = vecs[:, chunk]
        effects.append(block @ dagger(block))
    return Povm(tuple(effects))


class TestHilbertAndStates:
    def test_dimension_cap_enforced(self):
        with pytest.raises(DimensionCapError):
            PathedHilbert(1, 65, (64,))
        # 4096 exactly is allowed
        assert PathedHilbert(1, 64, (64,)).dim == 4096

    def test_state_validation(self):
        h = PathedHilbert(1, 2, (1,))
        with pytest.raises(ValueError):
            DensityState(h, np.array([[0.5, 0.5], [0.4, 0.5]]))  # not Hermitian
        with pytest.raises(ValueError):
            DensityState(h, np.eye(2))  # trace 2
        with pytest.raises(ValueError):
            DensityState(h, np.diag([1.5, -0.5]))  # not PSD

    def test_povm_validation(self):
        with pytest.raises(ValueError):
            Povm((np.eye(2) * 0.5,))  # does not sum to identity
        with pytest.raises(ValueError):
            Povm((np.diag([1.5, 0.0]), np.diag([-0.5, 1.0])))  # not PSD


class TestControlledChannel:
    def test_slit_boxes_project_out_closed_paths(self):
        h = PathedHilbert(1, 3, (1,))
        program = slit_program(3, 2)
        ops = controlled_channel(program, (0, 1, 0), h)
        assert len(ops) == 1
        assert np.allclose(ops[0], np.diag([1.0, 0.0, 1.0]), atol=1e-14)

    def test_phase_boxes_compile_to_phase_diagonal(self):
        h = PathedHilbert(1, 2, (1,))
        program = phase_program(2, 2, [[0, 1], [0, 1]])
        ops = controlled_channel(program, (1, 0), h)
        assert len(ops) == 1
        assert np.allclose(ops[0], np.diag([-1.0, 1.0]), atol=1e-14)

    def test_random_programs_stay_cp_contractions(self):
        # operator-sum check over 100 seeded programs
        rng = np.random.default_rng(40)
        for trial in range(100):
            m = int(rng.integers(2, 4))
            d = int(rng.choice([2, 3]))
            idim = int(rng.integers(1, 4))
            h = PathedHilbert(1, m, (idim,))
            program = random_box_program(m, d, idim, rng)
            x = tuple(int(v) for v in rng.integers(0, d, size=m))
            ops = controlled_channel(program, x, h)
            total = sum(dagger(op) @ op for op in ops)
            top = np.linalg.eigvalsh((total + dagger(total)) / 2).max()
            assert top <= 1 + 1e-9, trial

    def test_joint_program_matches_tensor_of_local_programs(self):
        # a correlated program assembled from per-system factors must act
        # exactly like the per-box compilation path
        rng = np.random.default_rng(41)
        m, d, idim = 2, 2, 2
        h = PathedHilbert(2, m, (idim, idim))
        local = random_box_program(m, d, idim, rng)
        joint = {}
        for i1 in range(m):
            for i2 in range(m):
                for x1 in range(d):
                    for x2 in range(d):
                        ops = []
                        for b1 in local.box_kraus[i1][x1]:
                            for b2 in local.box_kraus[i2][x2]:
                                ops.append(np.kron(b1, b2))
                        joint[((i1, i2), (x1, x2))] = tuple(ops)
        program_joint = BoxProgram(m, d, k=2, internal_dims=(idim, idim),
                                   joint_kraus=joint)
        state = random_density_state(h, rng)
        for x in games.all_inputs(m, d):
            via_local = evolve(state, local, x).rho
            via_joint = evolve(state, program_joint, x).rho
            assert np.max(np.abs(via_local - via_joint)) < 1e-12

    def test_program_validation_rejects_expanding_maps(self):
        bad = (np.eye(1) * 2.0,)
        with pytest.raises(ValueError):
            BoxProgram(1, 2, 1, ((bad, bad),))


class TestEvolve:
    def test_phase_boxes_produce_minus_superposition(self):
        state = path_superposition_state(2)
        program = phase_program(2, 2, [[0, 1], [0, 1]])
        out = evolve(state, program, (0, 1))
        minus = np.array([1, -1]) / np.sqrt(2)
        assert np.max(np.abs(out.rho - np.outer(minus, minus))) < 1e-14

    def test_all_slits_closed_gives_zero_state(self):
        state = path_superposition_state(3)
        out = evolve(state, slit_program(3, 2), (1, 1, 1))
        assert out.trace == pytest.approx(0.0, abs=1e-14)

    def test_unitary_program_preserves_trace(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            m, d, idim = 3, 2, 2
            h = PathedHilbert(1, m, (idim,))
            state = random_density_state(h, rng)
            program = random_box_program(m, d, idim, rng, lossy=False)
            x = tuple(int(v) for v in rng.integers(0, d, size=m))
            out = evolve(state, program, x)
            assert out.trace == pytest.approx(state.trace, abs=1e-10)


class TestClassicalDephase:
    def test_uniform_superposition_becomes_maximal_path_mixture(self):
        out = classical_dephase(path_superposition_state(2))
        assert np.allclose(out.rho, np.diag([0.5, 0.5]), atol=1e-14)

    def test_idempotent(self):
        rng = np.random.default_rng(43)
        h = PathedHilbert(2, 2, (2, 1))
        state = random_density_state(h, rng)
        once = classical_dephase(state)
        twice = classical_dephase(once)
        assert np.max(np.abs(once.rho - twice.rho)) < 1e-14

    def test_dephased_single_particle_has_order_at_most_one(self):
        rng = np.random.default_rng(44)
        for _ in range(5):
            h = PathedHilbert(1, 3, (2,))
            prep = classical_dephase(random_density_state(h, rng))
            program = random_box_program(3, 2, 2, rng)
            povm = random_projective_povm(h.dim, 2, rng)
            dist = run_experiment(prep, program, povm, 2, 3)
            assert games.algebraic_order(dist, tol=1e-8) <= 1


class TestMeasure:
    def test_path_projectors_on_even_superposition(self):
        state = path_superposition_state(2)
        which_path = Povm((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
        probs = measure(state, which_path, no_detection_outcome=None)
        assert probs == pytest.approx([0.5, 0.5], abs=1e-14)

    def test_born_rule_against_contraction_oracle(self):
        rng = np.random.default_rng(45)
        for _ in range(10):
            dim_paths = int(rng.integers(2, 5))
            idim = int(rng.integers(1, 4))
            h = PathedHilbert(1, dim_paths, (idim,))
            state = random_density_state(h, rng)
            povm = random_projective_povm(h.dim, 2, rng)
            probs = measure(state, povm, no_detection_outcome=None)
            for effect, p in zip(povm.effects, probs):
                want = born_probability_loop(effect.tolist(),
                                             state.rho.tolist())
                assert p == pytest.approx(want, abs=1e-12)

    def test_zero_state_and_no_detection_folding(self):
        h = PathedHilbert(1, 2, (1,))
        state = DensityState(h, np.zeros((2, 2)))
        raw = measure(state, plus_minus_povm(), no_detection_outcome=None)
        assert raw == pytest.approx([0.0, 0.0], abs=1e-14)
        folded = measure(state, plus_minus_povm(), no_detection_outcome=0)
        assert folded == pytest.approx([1.0, 0.0], abs=1e-14)
        folded1 = measure(state, plus_minus_povm(), no_detection_outcome=1)
        assert folded1 == pytest.approx([0.0, 1.0], abs=1e-14)


class TestRunExperiment:
    def test_binary_phase_protocol_end_to_end(self):
        prep = path_superposition_state(2)
        program = phase_program(2, 2, [[0, 1], [0, 1]])
        dist = run_experiment(prep, program, plus_minus_povm(), 2, 2)
        assert np.allclose(dist.table, games.delta_distribution(2, 2).table,
                           atol=1e-12)

    def test_single_system_three_box_interference_vanishes(self):
        rng = np.random.default_rng(46)
        for _ in range(5):
            h = PathedHilbert(1, 3, (2,))
            prep = random_density_state(h, rng)
            program = random_box_program(3, 2, 2, rng)
            povm = random_projective_povm(h.dim, 2, rng)
            dist = run_experiment(prep, program, povm, 2, 3)
            value = games.interference_term(dist, games.GameSpec.unit(3, 2))
            assert abs(value) < 1e-7

    def test_povm_size_must_match_alphabet(self):
        prep = path_superposition_state(2)
        with pytest.raises(ValueError):
            run_experiment(prep, phase_program(2, 2, [[0, 1], [0, 1]]),
                           plus_minus_povm(), 3, 2)


class TestModuloAverageState:
    def test_three_boxes_single_system_averages_collapse(self):
        rng = np.random.default_rng(47)
        h = PathedHilbert(1, 3, (2,))
        prep = random_density_state(h, rng)
        program = random_box_program(3, 2, 2, rng)
        nu = DitString.ones(3, 2)
        avg0 = modulo_average_state(prep, program, nu, 0)
        avg1 = modulo_average_state(prep, program, nu, 1)
        assert np.max(np.abs(avg0.rho - avg1.rho)) < 1e-8

    def test_two_box_phase_family_is_orthogonal(self):
        prep = path_superposition_state(2)
        program = phase_program(2, 2, [[0, 1], [0, 1]])
        avg0 = modulo_average_state(prep, program, UNIT2, 0)
        avg1 = modulo_average_state(prep, program, UNIT2, 1)
        overlap = np.trace(avg0.rho @ avg1.rho).real
        assert abs(overlap) < 1e-14

    def test_input_independent_program_gives_constant_family(self):
        prep = path_superposition_state(2, internal_dim=2)
        program = identity_program(2, 3, internal_dim=2)
        evolved = evolve(prep, program, (1, 2))
        for s in range(3):
            avg = modulo_average_state(prep, program, DitString.ones(2, 3), s)
            assert np.max(np.abs(avg.rho - evolved.rho)) < 1e-12


class TestAverageStateCollapseCheck:
    def test_single_system_three_boxes_passes(self):
        rng = np.random.default_rng(48)
        for d in (2, 3):
            for _ in range(5):
                idim = int(rng.integers(1, 4))
                h = PathedHilbert(1, 3, (idim,))
                prep = random_density_state(h, rng)
                program = random_box_program(3, d, idim, rng)
                assert average_state_collapse_check(
                    prep, program, DitString.ones(3, d), 3, d, tol=1e-8)

    def test_two_box_phase_strategy_fails(self):
        prep = path_superposition_state(2)
        program = phase_program(2, 2, [[0, 1], [0, 1]])
        assert not average_state_collapse_check(prep, program, UNIT2, 2, 2,
                                                tol=1e-8)

    def test_two_systems_five_boxes_passes(self):
        rng = np.random.default_rng(49)
        h = PathedHilbert(2, 5, (2, 2))
        prep = random_density_state(h, rng)
        program = random_joint_program(5, 2, 2, (2, 2), rng)
        assert average_state_collapse_check(prep, program,
                                            DitString.ones(5, 2), 5, 2,
                                            tol=1e-7)


class TestPhaseWeightedOperatorSum:
    def test_single_system_phase_sum_vanishes_for_three_boxes(self):
        # sum over inputs of omega^(alpha nu.x) rho_x is the zero operator
        # whenever more than two boxes carry nonzero weight
        rng = np.random.default_rng(50)
        for d in (2, 3):
            h = PathedHilbert(1, 3, (2,))
            prep = random_density_state(h, rng)
            program = random_box_program(3, d, 2, rng)
            targets = games.modulo_targets(3, d, (1, 1, 1))
            for alpha in range(1, d):
                acc = np.zeros((h.dim, h.dim), dtype=complex)
                for row, x in enumerate(games.all_inputs(3, d)):
                    phase = np.exp(2j * np.pi * alpha * targets[row] / d)
                    acc += phase * evolve(prep, program, x).rho
                acc /= d**3
                assert np.max(np.abs(acc)) < 1e-8


class TestMarkAndCountingPrimitives:
    def test_mark_program_stamps_input(self):
        # particle parked at box 1 of 2, fresh mark 0; box input 2 of 3
        prep = definite_path_state(2, 1, internal_dim=3)
        program = mark_program(2, 3)
        out = evolve(prep, program, (0, 2))
        idx = 1 * 3 + 2  # path 1, mark 2
        expected = np.zeros((6, 6))
        expected[idx, idx] = 1.0
        assert np.max(np.abs(out.rho - expected)) < 1e-14

    def test_mark_program_is_trace_preserving(self):
        rng = np.random.default_rng(51)
        h = PathedHilbert(1, 2, (3,))
        state = random_density_state(h, rng)
        out = evolve(state, mark_program(2, 3), (2, 1))
        assert out.trace == pytest.approx(1.0, abs=1e-12)


class TestPureStateHelpers:
    def test_pure_state_normalizes(self):
        h = PathedHilbert(1, 2, (1,))
        state = pure_state(h, [2.0, 0.0])
        assert state.rho[0, 0] == pytest.approx(1.0)

    def test_definite_path_state_is_classical(self):
        state = definite_path_state(3, 2)
        assert np.allclose(state.rho,
                           classical_dephase(state).rho, atol=1e-15)
