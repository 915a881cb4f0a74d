"""Dense complex linear algebra on 2x2 / 4x4 operators and 4-vectors.

Matrices are plain ``numpy`` complex arrays. The helpers here validate
shapes and finiteness so that dimension bugs surface at the call site
instead of deep inside a sweep.
"""

import numpy as np

DIMS = (2, 4)

HERMITIAN_TOL = 1e-10
NEG_EIG_CLAMP = 1e-10
NEG_EIG_ERROR = 1e-8
JACOBI_MAX_SWEEPS = 50
JACOBI_OFFDIAG_TOL = 1e-14


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class InvalidStateError(ValueError):
    """Raised for vectors/operators that are not valid quantum states."""


def as_matrix(a, dim=None):
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in DIMS:
        raise DimensionError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimensionError(f"expected {dim}x{dim}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_vector(v, dim=4):
    x = np.asarray(v, dtype=complex)
    if x.shape != (dim,):
        raise DimensionError(f"expected a length-{dim} vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return x


def kron(a, b):
    """Kronecker product of two 2x2 matrices; ``(a⊗b)[2r+s, 2c+t] = a[r,c] b[s,t]``."""
    return np.kron(as_matrix(a, 2), as_matrix(b, 2))


def matmul(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return a @ b


def adjoint(a):
    return as_matrix(a).conj().T


def apply(a, psi):
    """Apply ``a`` to a state vector. No renormalisation."""
    a = as_matrix(a)
    return a @ as_vector(psi, a.shape[0])


def trace(a):
    return complex(np.trace(as_matrix(a)))


def is_unitary(u, tol=1e-12):
    u = as_matrix(u)
    return np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def is_hermitian(a, tol=HERMITIAN_TOL):
    a = as_matrix(a)
    return np.max(np.abs(a - a.conj().T)) <= tol


def pure_state(amplitudes, tol=1e-12):
    psi = as_vector(amplitudes)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > tol:
        raise InvalidStateError(f"state norm^2 is {norm!r}, expected 1")
    return psi


def projector(psi):
    psi = as_vector(psi)
    return np.outer(psi, psi.conj())


def check_density_matrix(rho, tol=1e-12, eig_tol=NEG_EIG_CLAMP):
    """Validate a 4x4 density matrix and return it as an array."""
    rho = as_matrix(rho, 4)
    if not is_hermitian(rho, tol):
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise InvalidStateError(f"density matrix trace is {tr!r}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -eig_tol:
        raise InvalidStateError("density matrix has a negative eigenvalue")
    return rho


def _jacobi_rotate(a, v, p, q):
    apq = a[p, q]
    mag = abs(apq)
    if mag == 0.0:
        return
    phase = apq / mag
    # D = diag(1, conj(phase)) on (p, q) makes the pivot real and positive;
    # a real Givens rotation then annihilates it.
    zeta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    n = a.shape[0]
    j = np.eye(n, dtype=complex)
    j[p, p] = c
    j[p, q] = s
    j[q, p] = -s * phase.conjugate()
    j[q, q] = c * phase.conjugate()
    a[:] = j.conj().T @ a @ j
    a[p, q] = a[q, p] = 0.0
    v[:] = v @ j


def hermitian_eig(a):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as the columns of a unitary matrix, so that
    ``a = V diag(w) V^†``.
    """
    a = as_matrix(a)
    if not is_hermitian(a):
        raise NotHermitianError("hermitian_eig requires a Hermitian matrix")
    n = a.shape[0]
    work = 0.5 * (a + a.conj().T)
    vecs = np.eye(n, dtype=complex)
    scale = max(1.0, np.max(np.abs(work)))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(work - np.diag(np.diag(work))) ** 2))
        if off < JACOBI_OFFDIAG_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(work, vecs, p, q)
    vals = np.diag(work).real.copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def psd_sqrt(a):
    """Principal square root of a Hermitian positive semi-definite matrix.

    Eigenvalues in ``[-1e-8, 0)`` are treated as round-off and clamped to zero;
    anything more negative means the input was not PSD.
    """
    vals, vecs = hermitian_eig(a)
    if vals[0] < -NEG_EIG_ERROR:
        raise InvalidStateError(f"matrix is not positive semi-definite (eigenvalue {vals[0]:.3e})")
    # round-off floor: sqrt would amplify ~1e-17 residues into ~1e-9 errors
    floor = 1e-15 * max(1.0, vals[-1])
    vals = np.where(vals < floor, 0.0, vals)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def equal_up_to_global_phase(a, b, tol):
    """True iff ``max|a - c b| <= tol`` for the unit phase ``c`` fixed by b's largest entry."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return global_phase_residual(a, b) <= tol


def global_phase_residual(a, b):
    """Residual ``max|a - c b|`` after aligning the global phase on b's largest entry."""
    a, b = as_matrix(a), as_matrix(b)
    flat_b = b.ravel()
    # argmax returns the first (lowest row-major) index on ties
    k = int(np.argmax(np.abs(flat_b)))
    if flat_b[k] == 0:
        raise ValueError("reference matrix is zero")
    ratio = a.ravel()[k] / flat_b[k]
    c = ratio / abs(ratio) if ratio != 0 else 1.0
    return float(np.max(np.abs(a - c * b)))
