import numpy as np
import pytest

from zzgate.channels import CoherentErrorDraw, NoiseModel, coherent_error_unitary_cz
from zzgate.fidelity import (
    INPUT_STATES,
    analytic_cp_coherent,
    analytic_cp_coherent_states,
    analytic_cz_coherent_equal,
    analytic_cz_coherent_smallangle,
    analytic_depolarizing,
    batch_state_fidelities,
    clamp_fidelity,
    depolarizing_threshold,
    gate_fidelity_coherent_overlap,
    gate_fidelity_numeric,
    state_fidelities_numeric,
    state_fidelity,
)
from zzgate.gates import Kind, build_decomposition, r_zz
from zzgate.linalg import InvalidStateError, projector
from zzgate.verification import fit_cz_small_angle, random_density_matrix


def _random_pure(rng):
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    return psi / np.linalg.norm(psi)


def test_input_states():
    assert INPUT_STATES.shape == (16, 4)
    assert np.allclose(np.linalg.norm(INPUT_STATES, axis=1), 1)
    # j = 4(a-1) + b: j=1 is |00>, j=2 is |0>|1>, j=11 is |ψ3>|ψ3>
    assert np.allclose(INPUT_STATES[0], [1, 0, 0, 0])
    assert np.allclose(INPUT_STATES[1], [0, 1, 0, 0])
    plus_i = np.array([1, 1j]) / np.sqrt(2)
    assert np.allclose(INPUT_STATES[10], np.kron(plus_i, plus_i))


def test_state_fidelity_examples(rng):
    rho = random_density_matrix(rng)
    assert abs(state_fidelity(rho, rho) - 1) < 1e-10
    ground = projector([1, 0, 0, 0])
    # pure versus maximally mixed gives 1/d
    assert abs(state_fidelity(ground, np.eye(4) / 4) - 0.25) < 1e-10


def test_state_fidelity_pure_pairs(rng):
    for _ in range(200):
        a, b = _random_pure(rng), _random_pure(rng)
        f = state_fidelity(projector(a), projector(b))
        assert abs(f - abs(np.vdot(a, b)) ** 2) < 1e-10


def test_state_fidelity_symmetric_and_bounded(rng):
    for _ in range(100):
        r, s = random_density_matrix(rng), random_density_matrix(rng)
        f = state_fidelity(r, s)
        assert 0 <= f <= 1
        assert abs(f - state_fidelity(s, r)) < 1e-9


def test_state_fidelity_rejects_invalid():
    with pytest.raises(InvalidStateError):
        state_fidelity(np.eye(4), np.eye(4) / 4)


def test_clamp():
    assert clamp_fidelity(1 + 5e-13) == 1.0
    with pytest.raises(ValueError):
        clamp_fidelity(1 + 1e-9)


@pytest.mark.parametrize("kind", list(Kind))
def test_zero_noise_is_unity(kind):
    for g in (0.0, 0.3, -2.2):
        assert abs(gate_fidelity_numeric(build_decomposition(kind, g)) - 1) < 1e-12


def test_cp_quarter_turn():
    # (25 + 7 cos(π/2)) / 32
    d = build_decomposition(Kind.CP, 0.7)
    f = gate_fidelity_numeric(d, NoiseModel(), CoherentErrorDraw(np.pi / 2))
    assert abs(f - 25 / 32) < 1e-12


def test_cz_depolarizing_one_percent():
    f = gate_fidelity_numeric(build_decomposition(Kind.CZ, 1.1), NoiseModel(p=0.01))
    assert abs(f - 0.985075) < 1e-12


def test_draw_required_for_coherent_model():
    with pytest.raises(ValueError):
        gate_fidelity_numeric(build_decomposition(Kind.CP, 0.1), NoiseModel(sigma_theta=0.1))
    with pytest.raises(ValueError):
        gate_fidelity_numeric(build_decomposition(Kind.CZ, 0.1), None, (0.1,))


def test_overlap_matches_density_route(rng):
    for _ in range(1000):
        kind = (Kind.CP, Kind.CZ)[int(rng.integers(2))]
        d = build_decomposition(kind, rng.uniform(-2 * np.pi, 2 * np.pi))
        draw = CoherentErrorDraw(*rng.normal(0, 0.3, 2))
        assert abs(gate_fidelity_coherent_overlap(d, draw) - gate_fidelity_numeric(d, None, draw)) < 1e-12


def test_cz_overlap_against_closed_unitary(rng):
    for g, t, z in rng.uniform(-1, 1, size=(50, 3)):
        m = r_zz(g).conj().T @ coherent_error_unitary_cz(g, t, z)
        direct = np.mean([abs(np.vdot(s, m @ s)) ** 2 for s in INPUT_STATES])
        d = build_decomposition(Kind.CZ, g)
        assert abs(gate_fidelity_coherent_overlap(d, CoherentErrorDraw(t, z)) - direct) < 1e-12


def test_batch_matches_reference(rng):
    for kind in (Kind.CP, Kind.CZ, Kind.ISWAP):
        d = build_decomposition(kind, rng.uniform(-3, 3))
        p = rng.uniform(0, 0.05)
        n = len(d.error_slots)
        angles = rng.normal(0, 0.3, size=(20, n))
        batch = batch_state_fidelities(d, p, angles)
        for row, a in zip(batch, angles):
            ref = state_fidelities_numeric(d, NoiseModel(p=p), tuple(a))
            assert np.max(np.abs(row - ref)) < 1e-12


def test_cp_per_state_classes():
    theta = 0.9
    f = state_fidelities_numeric(build_decomposition(Kind.CP, 0.4), None, CoherentErrorDraw(theta))
    classes = analytic_cp_coherent_states(theta)
    expected = sorted(v for value, count in classes.values() for v in [value] * count)
    assert np.allclose(sorted(f), expected, atol=1e-12)


def test_cp_gamma_independent():
    d0 = [build_decomposition(Kind.CP, g) for g in np.linspace(-np.pi, np.pi, 50)]
    f = [gate_fidelity_coherent_overlap(d, CoherentErrorDraw(0.4)) for d in d0]
    assert np.var(f) < 1e-12 and max(f) - min(f) < 1e-12


def test_cp_qubit_exchange_symmetry(rng):
    swap = np.eye(4)[[0, 2, 1, 3]]
    for g, t in rng.uniform(-2, 2, size=(20, 2)):
        d = build_decomposition(Kind.CP, g)
        u = d.unitary((t,))
        assert np.allclose(swap @ u @ swap, u, atol=1e-14)


def test_analytic_cp():
    assert analytic_cp_coherent(0.0) == 1.0
    assert analytic_cp_coherent(np.pi) == 0.5625
    for t in np.linspace(0, np.pi, 10):
        f = gate_fidelity_coherent_overlap(build_decomposition(Kind.CP, 1.3), CoherentErrorDraw(t))
        assert abs(f - analytic_cp_coherent(t)) < 1e-12


def test_analytic_cz_values():
    assert analytic_cz_coherent_smallangle(0.7, 0.0, 0.0) == 1.0
    t = 0.05
    assert np.isclose(analytic_cz_coherent_equal(0.0, t), 1 - 0.47 * t * t)
    # the ζ = θ form is the sum of the expansion's coefficients
    for g in np.linspace(0, 2 * np.pi, 7):
        assert abs(analytic_cz_coherent_equal(g, t) - analytic_cz_coherent_smallangle(g, t, t)) < 1e-15


def test_cz_expansion_quadratic_scaling():
    for g in np.linspace(0, 2 * np.pi, 9):
        d = build_decomposition(Kind.CZ, g)
        a = [1 - gate_fidelity_coherent_overlap(d, CoherentErrorDraw(t, t)) for t in (0.02 * np.pi, 0.01 * np.pi)]
        assert abs(a[0] / a[1] - 4) < 0.05


def test_cz_expansion_sin_free_points():
    # at sin γ = 0 the quoted two-decimal coefficients agree to rounding
    for g in (0.0, np.pi):
        d = build_decomposition(Kind.CZ, g)
        for t in np.linspace(0.002, 0.02, 5) * np.pi:
            f = gate_fidelity_coherent_overlap(d, CoherentErrorDraw(t, t))
            assert abs(f - analytic_cz_coherent_smallangle(g, t, t)) < 0.02 * t * t


def test_cz_fit_magnitudes():
    fit = fit_cz_small_angle()
    assert abs(fit["theta^2"] + 0.12) < 0.01
    assert abs(fit["zeta^2"] + 0.13) < 0.01
    assert abs(fit["theta*zeta"] + 0.05) < 0.01
    assert abs(fit["theta*zeta*cos"] + 0.19) < 0.01
    assert abs(fit["zeta^2*cos"] - 0.02) < 0.01
    # the two sin terms have magnitude 1/64 but the opposite sign to the quoted expansion
    assert abs(fit["theta*zeta*sin"] - 1 / 64) < 1e-3
    assert abs(fit["zeta^2*sin"] - 1 / 64) < 1e-3
    assert abs(fit["theta^2*sin"]) < 1e-3 and abs(fit["theta^2*cos"]) < 1e-3


@pytest.mark.parametrize("kind", [Kind.CP, Kind.CZ])
def test_depolarizing_laws_match_numeric(kind):
    for p in np.linspace(0, 0.02, 11):
        for g in (0.0, 1.0, -2.5):
            f = gate_fidelity_numeric(build_decomposition(kind, g), NoiseModel(p=p))
            assert abs(f - analytic_depolarizing(kind, p)) < 1e-12


def test_depolarizing_laws_closed_forms():
    p = 0.013
    assert np.isclose(analytic_depolarizing(Kind.CP, p), 1 - 0.75 * p, atol=1e-15)
    assert np.isclose(analytic_depolarizing(Kind.CZ, p), 1 - 1.5 * p + 0.75 * p * p, atol=1e-15)
    assert analytic_depolarizing(Kind.CP, 0.0) == analytic_depolarizing(Kind.CZ, 0.0) == 1.0


def test_depolarizing_states_all_equal():
    for kind in (Kind.CP, Kind.CZ):
        f = state_fidelities_numeric(build_decomposition(kind, 0.6), NoiseModel(p=0.02))
        assert np.ptp(f) < 1e-12


def test_thresholds():
    assert np.isclose(depolarizing_threshold(Kind.CP), 1 / 75)
    assert np.isclose(depolarizing_threshold(Kind.CZ), 1 - np.sqrt(2.96 / 3))
    for kind in (Kind.CP, Kind.CZ):
        assert np.isclose(analytic_depolarizing(kind, depolarizing_threshold(kind)), 0.99)


def test_fidelity_bounds(rng):
    for _ in range(50):
        kind = list(Kind)[int(rng.integers(3))]
        d = build_decomposition(kind, rng.uniform(-6, 6))
        f = batch_state_fidelities(d, rng.uniform(), rng.normal(0, 2, size=(10, len(d.error_slots))))
        assert np.all((f >= 0) & (f <= 1))
