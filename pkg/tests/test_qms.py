import numpy as np
import pytest

from qmsgap.errors import (
    NoFaithfulInvariantStateError,
    NonUniqueInvariantStateError,
    NotHermitianError,
    QmsGapError,
)
from qmsgap.linalg import choi_matrix, dag, frobenius, vec
from qmsgap.qms import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    GKSLModel,
    check_invariance,
    density_matrix,
    depolarizing_qubit,
    fixed_point_structure,
    generator,
    invariant_state,
    kadison_schwarz_probe,
    random_faithful_model,
    random_model,
    semigroup,
    thermal_qubit,
)

GAMMA = 0.35


def free_model(d=2):
    return GKSLModel(hamiltonian=np.zeros((d, d), dtype=complex))


def test_generator_of_trivial_model_is_zero():
    gen = generator(free_model())
    np.testing.assert_allclose(gen.matrix, 0.0, atol=1e-14)


def test_generator_is_unital_and_star_preserving(rng, random_complex):
    for d in (2, 3, 4):
        model = random_model(rng, d)
        gen = generator(model)
        assert frobenius(gen.apply(np.eye(d))) <= 1e-10
        for _ in range(20):
            x = random_complex(d, d)
            defect = frobenius(gen.apply(dag(x)) - dag(gen.apply(x)))
            assert defect <= 1e-11 * max(1.0, frobenius(x))


def test_depolarizing_generator_closed_form(random_complex):
    # symbolic 2x2 oracle: sum_j sigma_j x sigma_j = 2 tr(x) 1 - x gives
    # L(x) = gamma tr(x) 1 - 2 gamma x, i.e. rate 2 gamma on traceless x
    gen = generator(depolarizing_qubit(GAMMA))
    for _ in range(10):
        x = random_complex(2, 2)
        expected = GAMMA * np.trace(x) * np.eye(2) - 2.0 * GAMMA * x
        np.testing.assert_allclose(gen.apply(x), expected, atol=1e-12)


def test_thermal_generator_rate_equation():
    # oracle: L(sigma_z) = -(g_down + g_up) sigma_z + (g_up - g_down) 1,
    # verified through the assembled 4x4 superoperator matrix
    g_up, g_down = 0.3, 0.9
    gen = generator(thermal_qubit(g_up, g_down))
    out = gen.apply(SIGMA_Z)
    expected = -(g_down + g_up) * SIGMA_Z + (g_up - g_down) * np.eye(2)
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_semigroup_at_zero_is_identity(rng):
    model = random_model(rng, 3)
    np.testing.assert_allclose(semigroup(model, 0.0).matrix, np.eye(9), atol=1e-14)
    with pytest.raises(QmsGapError):
        semigroup(model, -0.1)


def test_semigroup_composition(rng):
    for d in (2, 3):
        model = random_model(rng, d)
        s, t = 0.4, 1.3
        lhs = semigroup(model, s).matrix @ semigroup(model, t).matrix
        rhs = semigroup(model, s + t).matrix
        assert np.linalg.norm(lhs - rhs) <= 1e-9 * max(1.0, np.linalg.norm(rhs))


def test_depolarizing_semigroup_closed_form(random_complex):
    model = depolarizing_qubit(GAMMA)
    t = 0.7
    phi = semigroup(model, t)
    for _ in range(5):
        x = random_complex(2, 2)
        expected = np.exp(-2.0 * GAMMA * t) * (
            x - np.trace(x) * np.eye(2) / 2.0
        ) + np.trace(x) * np.eye(2) / 2.0
        np.testing.assert_allclose(phi.apply(x), expected, atol=1e-12)


def test_semigroup_is_completely_positive(rng):
    for d in (2, 3):
        model = random_model(rng, d)
        for t in (0.1, 1.0, 10.0):
            choi = choi_matrix(semigroup(model, t))
            vals = np.linalg.eigvalsh((choi + dag(choi)) / 2.0)
            assert vals.min() >= -1e-9


def test_invariant_state_depolarizing():
    rho = invariant_state(depolarizing_qubit(GAMMA))
    np.testing.assert_allclose(rho.rho, np.eye(2) / 2.0, atol=1e-12)
    assert rho.faithful


def test_invariant_state_thermal_rate_equation():
    # classical 2-level oracle: kernel of [[-g_down, g_up], [g_down, -g_up]]
    g_up, g_down = 0.3, 0.9
    rho = invariant_state(thermal_qubit(g_up, g_down))
    rates = np.array([[-g_down, g_up], [g_down, -g_up]])
    kernel = np.linalg.svd(rates)[2][-1]
    populations = np.abs(kernel) / np.abs(kernel).sum()
    np.testing.assert_allclose(np.diagonal(rho.rho).real, populations, atol=1e-12)
    np.testing.assert_allclose(
        rho.rho, np.diag([g_up, g_down]) / (g_up + g_down), atol=1e-12
    )


def test_amplitude_damping_has_no_faithful_state():
    with pytest.raises(NoFaithfulInvariantStateError):
        invariant_state(thermal_qubit(0.0, 1.0))


def test_trivial_model_state_is_not_unique():
    with pytest.raises(NonUniqueInvariantStateError):
        invariant_state(free_model())


def test_check_invariance_values():
    model = depolarizing_qubit(GAMMA)
    assert check_invariance(model, np.eye(2) / 2.0) <= 1e-12

    thermal = thermal_qubit(0.3, 0.9)
    assert check_invariance(thermal, np.eye(2) / 2.0) > 1e-3
    assert check_invariance(thermal, invariant_state(thermal)) <= 1e-9


def test_fixed_point_structure_depolarizing():
    model = depolarizing_qubit(GAMMA)
    rho = invariant_state(model)
    fps = fixed_point_structure(model, rho)
    assert fps.dim == 1 and not fps.degenerate
    # E(x) = tr(rho x) 1 has the rank-one matrix vec(1) vec(rho)^H
    oracle = np.outer(vec(np.eye(2)), vec(rho.rho).conj())
    np.testing.assert_allclose(fps.projector.matrix, oracle, atol=1e-10)


def test_fixed_point_structure_trivial_model():
    rho = density_matrix(np.eye(3) / 3.0)
    fps = fixed_point_structure(free_model(3), rho)
    assert fps.dim == 9 and fps.degenerate
    np.testing.assert_allclose(fps.projector.matrix, np.eye(9), atol=1e-10)


def test_fixed_point_structure_block_model(random_complex):
    # single jump sigma_z (x) 1 on d = 4: fixed algebra is its commutant,
    # the two diagonal blocks, so dim N = 8 and E averages over {1, V}
    v = np.kron(SIGMA_Z, np.eye(2))
    model = GKSLModel(hamiltonian=np.zeros((4, 4), dtype=complex), jumps=(v,))
    rho = density_matrix(np.eye(4) / 4.0)
    fps = fixed_point_structure(model, rho)
    assert fps.dim == 8 and fps.degenerate
    for _ in range(5):
        x = random_complex(4, 4)
        oracle = (x + v @ x @ v) / 2.0
        np.testing.assert_allclose(fps.projector.apply(x), oracle, atol=1e-9)


def test_conditional_expectation_identities(rng, random_complex):
    model, rho, _ = random_faithful_model(rng, 3)
    fps = fixed_point_structure(model, rho)
    e = fps.projector
    d = 3
    np.testing.assert_allclose(
        e.matrix @ e.matrix, e.matrix, atol=1e-9
    )
    np.testing.assert_allclose(e.apply(np.eye(d)), np.eye(d), atol=1e-9)
    for _ in range(20):
        x = random_complex(d, d)
        ex = e.apply(x)
        # state-preserving and a GNS contraction
        assert abs(np.trace(rho.rho @ ex) - np.trace(rho.rho @ x)) <= 1e-9
        lhs = np.trace(rho.rho @ dag(ex) @ ex).real
        rhs = np.trace(rho.rho @ dag(x) @ x).real
        assert lhs <= rhs + 1e-9
        np.testing.assert_allclose(e.apply(dag(x)), dag(ex), atol=1e-9)


def test_kadison_schwarz_zero_time(rng):
    model = depolarizing_qubit(GAMMA)
    worst = kadison_schwarz_probe(model, 0.0, trials=10, rng=rng)
    assert abs(worst) <= 1e-12


def test_kadison_schwarz_depolarizing_closed_form():
    # x = sigma_x: tr(rho Phi(x^H x)) = 1 and Phi(x) = exp(-2 gamma t) x,
    # so the defect is 1 - exp(-4 gamma t)
    model = depolarizing_qubit(GAMMA)
    t = 1.0
    phi = semigroup(model, t)
    rho = invariant_state(model)
    lhs = np.trace(rho.rho @ phi.apply(SIGMA_X @ SIGMA_X)).real
    out = phi.apply(SIGMA_X)
    rhs = np.trace(rho.rho @ dag(out) @ out).real
    assert lhs - rhs == pytest.approx(1.0 - np.exp(-4.0 * GAMMA * t), abs=1e-12)


def test_kadison_schwarz_random_models(rng):
    for i in range(12):
        model, rho, _ = random_faithful_model(rng, [2, 3][i % 2])
        worst = kadison_schwarz_probe(model, 0.8, trials=5, rng=rng, rho=rho)
        assert worst >= -1e-9


def test_random_model_is_seed_deterministic():
    m1 = random_model(np.random.default_rng(5), 3)
    m2 = random_model(np.random.default_rng(5), 3)
    np.testing.assert_array_equal(m1.hamiltonian, m2.hamiltonian)
    assert len(m1.jumps) == len(m2.jumps)
    for a, b in zip(m1.jumps, m2.jumps):
        np.testing.assert_array_equal(a, b)


def test_random_faithful_model_conditioning(rng):
    for d in (2, 3, 4):
        _, rho, _ = random_faithful_model(rng, d)
        assert rho.faithful
        assert rho.eigen.values.min() > 1e-4


def test_density_matrix_validation():
    with pytest.raises(QmsGapError):
        density_matrix(np.eye(2))  # trace 2
    with pytest.raises(QmsGapError):
        density_matrix(np.diag([1.5, -0.5]))
    pure = density_matrix(np.diag([1.0, 0.0]))
    assert not pure.faithful


def test_model_requires_hermitian_hamiltonian():
    with pytest.raises(NotHermitianError):
        GKSLModel(hamiltonian=np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_pauli_constants():
    np.testing.assert_array_equal(SIGMA_X @ SIGMA_X, np.eye(2))
    np.testing.assert_array_equal(SIGMA_Y @ SIGMA_Y, np.eye(2))
    np.testing.assert_allclose(SIGMA_X @ SIGMA_Y - SIGMA_Y @ SIGMA_X, 2j * SIGMA_Z)
