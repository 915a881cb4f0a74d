"""Average gate fidelity over the 16 product input states, plus closed forms.

Three numeric routes exist and are checked against each other:

* ``gate_fidelity_numeric`` evolves density matrices gate by gate and applies
  the Kraus-sum channel. It is the reference path and handles one realization.
* ``batch_state_fidelities`` does the same propagation vectorised over many
  coherent draws; the Monte Carlo runner uses it.
* ``gate_fidelity_coherent_overlap`` is the pure-state shortcut for p = 0.
"""

import numpy as np

from .channels import CoherentErrorDraw, apply_channel, make_depolarizing, slot_angles
from .gates import Kind, cp
from .linalg import check_density_matrix, projector, psd_sqrt

FIDELITY_CLAMP_TOL = 1e-12

_SINGLE = np.array(
    [[1, 0], [0, 1], [1 / np.sqrt(2), 1j / np.sqrt(2)], [1 / np.sqrt(2), 1 / np.sqrt(2)]],
    dtype=complex,
)

#: |ψ_a⟩⊗|ψ_b⟩ with row index j - 1 = 4(a - 1) + (b - 1)
INPUT_STATES = np.array([np.kron(_SINGLE[a], _SINGLE[b]) for a in range(4) for b in range(4)])
INPUT_STATES.setflags(write=False)


def clamp_fidelity(value, tol=FIDELITY_CLAMP_TOL):
    """Clamp round-off excursions into [0, 1]; larger excursions are bugs."""
    v = np.asarray(value, dtype=float)
    if np.any(v > 1.0 + tol) or np.any(v < -tol):
        raise ValueError(f"fidelity outside [0, 1] beyond tolerance: {value!r}")
    v = np.clip(v, 0.0, 1.0)
    return float(v) if v.ndim == 0 else v


def state_fidelity(rho, sigma):
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for two density matrices."""
    rho = check_density_matrix(rho)
    sigma = check_density_matrix(sigma)
    s = psd_sqrt(rho)
    inner = s @ sigma @ s
    inner = 0.5 * (inner + inner.conj().T)
    return clamp_fidelity(np.trace(psd_sqrt(inner)).real ** 2, tol=1e-10)


def _resolve_angles(decomp, noise, draw):
    if draw is None:
        if noise is not None and noise.coherent:
            raise ValueError("a coherent error draw is required when sigma > 0")
        return slot_angles(decomp.kind, None)
    if isinstance(draw, CoherentErrorDraw):
        return slot_angles(decomp.kind, draw)
    angles = tuple(float(a) for a in draw)
    if len(angles) != len(decomp.error_slots):
        raise ValueError(
            f"{decomp.kind.value} decomposition has {len(decomp.error_slots)} error slots, "
            f"got {len(angles)} angles"
        )
    return angles


def state_fidelities_numeric(decomp, noise=None, draw=None):
    """Per-input-state fidelities ⟨ψ_j|U† ρ'_j U|ψ_j⟩ for one error realization."""
    angles = _resolve_angles(decomp, noise, draw)
    p = 0.0 if noise is None else noise.p
    channel = make_depolarizing(p) if p > 0 else None
    slot_angle = dict(zip(decomp.error_slots, angles))
    ideal = decomp.target()
    out = np.empty(16)
    for j, psi in enumerate(INPUT_STATES):
        rho = projector(psi)
        for i, g in enumerate(decomp.gates):
            rho = g @ rho @ g.conj().T
            if i in slot_angle:
                e = cp(slot_angle[i])
                rho = e @ rho @ e.conj().T
                if channel is not None:
                    rho = apply_channel(channel, 0.5 * (rho + rho.conj().T))
        phi = ideal @ psi
        out[j] = np.vdot(phi, rho @ phi).real
    return clamp_fidelity(out)


def gate_fidelity_numeric(decomp, noise=None, draw=None):
    return clamp_fidelity(state_fidelities_numeric(decomp, noise, draw).mean())


def gate_fidelity_coherent_overlap(decomp, draw=None):
    """(1/16) Σ |⟨ψ_j|U† U_err|ψ_j⟩|², valid only without depolarizing noise."""
    u_err = decomp.unitary(_resolve_angles(decomp, None, draw))
    m = decomp.target().conj().T @ u_err
    amps = np.einsum("ja,ab,jb->j", INPUT_STATES.conj(), m, INPUT_STATES)
    return clamp_fidelity(np.mean(np.abs(amps) ** 2))


def _segments(decomp):
    """Fixed unitaries before, between and after the error slots."""
    bounds = [-1, *decomp.error_slots, len(decomp.gates) - 1]
    segs = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        u = np.eye(4, dtype=complex)
        for g in decomp.gates[lo + 1 : hi + 1]:
            u = g @ u
        segs.append(u)
    return segs


def batch_state_fidelities(decomp, p, angles):
    """Per-state fidelities for a batch of coherent realizations.

    ``angles`` has shape (reps, n_slots) in slot order. Returns (reps, 16).
    Density matrices are propagated throughout, so depolarizing and coherent
    errors share one code path.
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    n_slots = len(decomp.error_slots)
    if angles.shape[1] != n_slots:
        raise ValueError(f"expected angles of shape (reps, {n_slots}), got {angles.shape}")
    reps = angles.shape[0]
    segs = _segments(decomp)
    sup_t = make_depolarizing(p).superoperator().T if p > 0 else None

    rho0 = np.einsum("ja,jb->jab", INPUT_STATES, INPUT_STATES.conj())
    rho = segs[0] @ rho0 @ segs[0].conj().T
    rho = np.broadcast_to(rho, (reps, 16, 4, 4))
    for k in range(n_slots):
        d = np.ones((reps, 4), dtype=complex)
        d[:, 3] = np.exp(1j * angles[:, k])
        rho = rho * (d[:, :, None] * d[:, None, :].conj())[:, None]
        if sup_t is not None:
            rho = (rho.reshape(reps, 16, 16) @ sup_t).reshape(reps, 16, 4, 4)
        if k + 1 < n_slots:
            u = segs[k + 1]
            rho = u @ rho @ u.conj().T
    # fold the trailing segment into the ideal output states
    chi = (segs[-1].conj().T @ decomp.target() @ INPUT_STATES.T).T
    f = np.einsum("ja,rjab,jb->rj", chi.conj(), rho, chi).real
    return clamp_fidelity(f)


def batch_gate_fidelity(decomp, p, angles):
    return batch_state_fidelities(decomp, p, angles).mean(axis=1)


# --- closed forms ---------------------------------------------------------


def analytic_cp_coherent(theta):
    return (25.0 + 7.0 * np.cos(theta)) / 32.0


def analytic_cp_coherent_states(theta):
    """The three per-state classes: 1 (8 states), (2+2cosθ)/4 (4), (10+6cosθ)/16 (4)."""
    c = np.cos(theta)
    return {
        "unaffected": (1.0, 8),
        "both_superposed": ((2.0 + 2.0 * c) / 4.0, 4),
        "one_superposed": ((10.0 + 6.0 * c) / 16.0, 4),
    }


def expected_cp_coherent(sigma_theta):
    """Gaussian average of the CP coherent law; E[cos θ] = exp(-σ²/2)."""
    return (25.0 + 7.0 * np.exp(-0.5 * sigma_theta**2)) / 32.0


#: two-decimal coefficients of the second-order CZ expansion, keyed by monomial
CZ_SMALL_ANGLE_COEFFS = {
    "theta^2": -0.12,
    "zeta^2": -0.13,
    "theta*zeta": -0.05,
    "theta*zeta*sin": -0.02,
    "theta*zeta*cos": -0.19,
    "zeta^2*sin": -0.02,
    "zeta^2*cos": 0.02,
}


def cz_small_angle_monomials(gamma, theta, zeta):
    s, c = np.sin(gamma), np.cos(gamma)
    return {
        "theta^2": theta * theta,
        "zeta^2": zeta * zeta,
        "theta*zeta": theta * zeta,
        "theta*zeta*sin": theta * zeta * s,
        "theta*zeta*cos": theta * zeta * c,
        "zeta^2*sin": zeta * zeta * s,
        "zeta^2*cos": zeta * zeta * c,
    }


def analytic_cz_coherent_smallangle(gamma, theta, zeta):
    """Second-order CZ coherent fidelity; intended for |θ|, |ζ| ≲ 0.1π."""
    terms = cz_small_angle_monomials(gamma, theta, zeta)
    return 1.0 + sum(CZ_SMALL_ANGLE_COEFFS[k] * v for k, v in terms.items())


def analytic_cz_coherent_equal(gamma, theta):
    """The ζ = θ reduction: 1 - θ²(0.3 + 0.04 sin γ + 0.17 cos γ)."""
    return 1.0 - theta**2 * (0.3 + 0.04 * np.sin(gamma) + 0.17 * np.cos(gamma))


def expected_cz_coherent_smallangle(gamma, sigma_theta, sigma_zeta):
    """Gaussian average of the CZ expansion; cross terms θζ vanish."""
    return analytic_cz_coherent_smallangle(gamma, sigma_theta, 0.0) + (
        analytic_cz_coherent_smallangle(gamma, 0.0, sigma_zeta) - 1.0
    )


def n_channels(kind):
    return 1 if Kind(kind) is Kind.CP else 2


def compose_depolarizing(f_coherent, p, n):
    """Fidelity after ``n`` depolarizing channels on top of a coherent-only fidelity.

    The channel commutes with unitaries, so n uses shrink the state's Bloch
    part by (1-p)^n and the mixed part contributes 1/4.
    """
    keep = (1.0 - p) ** n
    return keep * f_coherent + (1.0 - keep) / 4.0


def analytic_depolarizing(kind, p):
    """Depolarizing-only gate fidelity: 1 - 3p/4 (CP), 1 - 3p/2 + 3p²/4 (CZ)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    return compose_depolarizing(1.0, p, n_channels(kind))


def depolarizing_threshold(kind, fidelity=0.99):
    """Largest p with depolarizing-only fidelity >= ``fidelity``."""
    # 1/4 + 3/4 (1-p)^n = F
    n = n_channels(kind)
    return 1.0 - ((4.0 * fidelity - 1.0) / 3.0) ** (1.0 / n)

