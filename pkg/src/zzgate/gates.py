"""Named gates and the three compilations of the ZZ gate.

Tensor convention: qubit 0 is the first Kronecker factor, basis order
|00>, |01>, |10>, |11>. Gate sequences are stored first-applied first.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import kron, global_phase_residual

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


class Kind(str, Enum):
    CP = "cp"
    CZ = "cz"
    ISWAP = "iswap"


def r_zz(gamma):
    e = np.exp(1j * gamma)
    return np.diag([1.0, e, e, 1.0]).astype(complex)


def cp(gamma):
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * gamma)]).astype(complex)


def r_z(gamma):
    return np.diag([1.0, np.exp(1j * gamma)]).astype(complex)


def hadamard():
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name):
    try:
        return _PAULI[name.upper()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli {name!r}") from None


def cz():
    return np.diag([1, 1, 1, -1]).astype(complex)


def iswap():
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
    )


def embed(g, qubit):
    """Lift a single-qubit gate onto qubit 0 (g⊗I) or qubit 1 (I⊗g)."""
    if qubit == 0:
        return kron(g, I2)
    if qubit == 1:
        return kron(I2, g)
    raise ValueError(f"qubit index must be 0 or 1, got {qubit!r}")


def sequence_product(gates):
    """Matrix product of a first-applied-first gate list."""
    u = I4.copy()
    for g in gates:
        u = g @ u
    return u


@dataclass(frozen=True)
class Decomposition:
    """A compiled R_ZZ(gamma): gate list plus the positions of native two-qubit gates.

    ``error_slots`` holds indices into ``gates``; coherent CP errors and the
    depolarizing channel act immediately after each of those gates.
    """

    kind: Kind
    gamma: float
    gates: tuple
    error_slots: tuple

    def unitary(self, error_angles=None):
        if error_angles is None:
            return sequence_product(self.gates)
        if len(error_angles) != len(self.error_slots):
            raise ValueError(
                f"{self.kind.value} decomposition has {len(self.error_slots)} error slots, "
                f"got {len(error_angles)} angles"
            )
        u = I4.copy()
        angles = dict(zip(self.error_slots, error_angles))
        for i, g in enumerate(self.gates):
            u = g @ u
            if i in angles:
                u = cp(angles[i]) @ u
        return u

    def target(self):
        return r_zz(self.gamma)

    def residual(self):
        """Elementwise distance of the product to R_ZZ(gamma).

        iSWAP is compared up to a global phase.
        """
        u = self.unitary()
        if self.kind is Kind.ISWAP:
            return global_phase_residual(u, self.target())
        return float(np.max(np.abs(u - self.target())))

    @property
    def n_single_qubit(self):
        return len(self.gates) - len(self.error_slots)


def build_cp_decomposition(gamma):
    gates = (embed(r_z(gamma), 0), embed(r_z(gamma), 1), cp(-2.0 * gamma))
    return Decomposition(Kind.CP, float(gamma), gates, (2,))


def build_cz_decomposition(gamma):
    h1 = embed(hadamard(), 1)
    gates = (h1, cz(), h1, embed(r_z(gamma), 1), h1, cz(), h1)
    return Decomposition(Kind.CZ, float(gamma), gates, (1, 5))


def build_iswap_decomposition(gamma):
    h0, h1 = embed(hadamard(), 0), embed(hadamard(), 1)
    gates = (
        h1,
        embed(r_z(np.pi / 2), 0),
        embed(r_z(-np.pi / 2), 1),
        iswap(),
        h0,
        embed(r_z(gamma), 0),
        h0,
        iswap(),
        embed(r_z(np.pi / 2), 0),
        embed(r_z(-np.pi / 2), 1),
        h1,
    )
    return Decomposition(Kind.ISWAP, float(gamma), gates, (3, 7))


_BUILDERS = {
    Kind.CP: build_cp_decomposition,
    Kind.CZ: build_cz_decomposition,
    Kind.ISWAP: build_iswap_decomposition,
}


def build_decomposition(kind, gamma):
    return _BUILDERS[Kind(kind)](gamma)
