"""Depolarizing channel in Kraus form and coherent over-rotation errors."""

from dataclasses import dataclass

import numpy as np

from .gates import Kind, cp, cz, embed, hadamard, pauli, r_z
from .linalg import check_density_matrix, kron

PAULI_BASIS = tuple(pauli(n) for n in "IXYZ")

RNG_ALGORITHM = "numpy.random.Generator(PCG64) seeded by SeedSequence; normals via numpy ziggurat"


def _check_probability(p):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must be in [0, 1], got {p!r}")
    return p


def kraus_weights(p):
    """Amplitude weights m_i; the identity term is index 0."""
    w = np.full(16, np.sqrt(p / 16.0))
    w[0] = np.sqrt(1.0 - 15.0 * p / 16.0)
    return w


def pauli_products():
    """The 16 operators ω_{i//4} ⊗ ω_{i%4} with ω = (I, X, Y, Z)."""
    return tuple(kron(PAULI_BASIS[i // 4], PAULI_BASIS[i % 4]) for i in range(16))


@dataclass(frozen=True)
class DepolarizingChannel:
    p: float
    kraus_ops: tuple

    def completeness_residual(self):
        s = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.max(np.abs(s - np.eye(4))))

    def superoperator(self):
        """Row-major vectorised action: vec(E(rho)) = S @ vec(rho)."""
        return sum(np.kron(k, k.conj()) for k in self.kraus_ops)


def make_depolarizing(p):
    p = _check_probability(p)
    ops = tuple(m * k for m, k in zip(kraus_weights(p), pauli_products()))
    return DepolarizingChannel(p, ops)


def apply_channel(ch, rho):
    rho = check_density_matrix(rho)
    return sum(k @ rho @ k.conj().T for k in ch.kraus_ops)


def depolarize_closed_form(rho, p):
    return (1.0 - p) * rho + p * np.trace(rho) * np.eye(4) / 4.0


def coherent_error_unitary_cp(gamma, theta):
    return embed(r_z(gamma), 1) @ embed(r_z(gamma), 0) @ cp(-2.0 * gamma + theta)


def coherent_error_unitary_cz(gamma, theta, zeta):
    """Time-ordered H₂, CZ, CP(θ), H₂, R_Z₂(γ), H₂, CZ, CP(ζ), H₂.

    θ rides on the first CZ and ζ on the second.
    """
    h = embed(hadamard(), 1)
    steps = (h, cz(), cp(theta), h, embed(r_z(gamma), 1), h, cz(), cp(zeta), h)
    u = np.eye(4, dtype=complex)
    for g in steps:
        u = g @ u
    return u


@dataclass(frozen=True)
class CoherentErrorDraw:
    theta: float = 0.0
    zeta: float = 0.0


@dataclass(frozen=True)
class NoiseModel:
    sigma_theta: float = 0.0
    sigma_zeta: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if self.sigma_theta < 0 or self.sigma_zeta < 0:
            raise ValueError("over-rotation standard deviations must be >= 0")
        if not (np.isfinite(self.sigma_theta) and np.isfinite(self.sigma_zeta)):
            raise ValueError("over-rotation standard deviations must be finite")
        _check_probability(self.p)

    @property
    def coherent(self):
        return self.sigma_theta > 0 or self.sigma_zeta > 0


def slot_angles(kind, draw):
    """Map a draw onto the error slots of a decomposition, in application order."""
    kind = Kind(kind)
    if draw is None:
        draw = CoherentErrorDraw()
    if kind is Kind.CP:
        return (draw.theta,)
    return (draw.theta, draw.zeta)


def sample_coherent_draw(model, rng):
    z = rng.standard_normal(2)
    return CoherentErrorDraw(model.sigma_theta * z[0], model.sigma_zeta * z[1])


def sample_coherent_angles(model, rng, reps):
    """``reps`` draws as an array of shape (reps, 2) holding (θ, ζ) rows.

    Consumes the stream exactly like ``reps`` sequential ``sample_coherent_draw`` calls.
    """
    z = rng.standard_normal((reps, 2))
    return z * np.array([model.sigma_theta, model.sigma_zeta])
