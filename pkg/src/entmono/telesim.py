"""Standard teleportation of one qubit over a two-qubit resource state.

The resource is first rotated on Bob's side so that its best maximally
entangled vector becomes |phi+>. Alice then measures (input, her half) in
the Bell basis and Bob applies the matching Pauli correction. The
resulting qubit channel is stored as its Choi matrix

    J = sum_ij |i><j| (x) Lambda(|i><j|)      (input first, trace 2)

so the identity channel has J = 2 |phi+><phi+|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import InvalidStateError
from .measures import fef_two_qubit
from .states import DensityOperator, as_density, bell_state, haar_pure_batch

_I = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# Bell outcome on (input, Alice) -> Bob's correction
CORRECTIONS = {
    "phi+": _I,
    "phi-": _Z,
    "psi+": _X,
    "psi-": _X @ _Z,
}


@dataclass(frozen=True)
class TeleportChannel:
    channel_state: DensityOperator
    correction_frame: tuple  # (Alice unitary, Bob unitary) applied before teleporting
    choi_matrix: np.ndarray

    def apply(self, x) -> np.ndarray:
        """Lambda(x) for a 2x2 input operator."""
        j = self.choi_matrix.reshape(2, 2, 2, 2)
        return np.einsum("ij,iajb->ab", np.asarray(x), j)


@dataclass(frozen=True)
class TeleportEstimate:
    mc_mean: float
    mc_std_err: float
    exact_value: float
    samples: int
    seed: int

    @property
    def consistent(self) -> bool:
        return abs(self.mc_mean - self.exact_value) <= 4 * self.mc_std_err + 1e-12


def _frame_to_phi_plus(rho: DensityOperator) -> np.ndarray:
    """Unitary M on Bob with (I x M)|phi+> equal to the FEF-optimal vector of ``rho``."""
    e = fef_two_qubit(rho).optimal_vector.amplitudes.reshape(2, 2)
    m = math.sqrt(2) * e.T
    # re-unitarize against rounding
    return linalg.qr_retract(m)


def _teleport_map(resource: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Bob's corrected output for input operator ``x`` (parties ordered C, A, B)."""
    full = np.kron(x, resource).reshape([2] * 6)
    out = np.zeros((2, 2), dtype=np.complex128)
    for kind, u in CORRECTIONS.items():
        b = bell_state(kind).amplitudes.reshape(2, 2)
        # <B_k|_{CA} full |B_k>_{CA}
        branch = np.einsum("ca,cabdeg,de->bg", b.conj(), full, b)
        out += u @ branch @ u.conj().T
    return out


def build_channel(rho) -> TeleportChannel:
    rho = as_density(rho)
    if rho.dim != 4:
        raise InvalidStateError(f"teleportation needs a two-qubit resource, got dims {rho.dims}")
    rho = rho.view((2, 2))
    m = _frame_to_phi_plus(rho)
    rot = np.kron(_I, m.conj().T)
    resource = rot @ rho.matrix @ rot.conj().T
    choi = np.zeros((4, 4), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            eij = np.zeros((2, 2), dtype=np.complex128)
            eij[i, j] = 1.0
            choi += np.kron(eij, _teleport_map(resource, eij))
    ch = TeleportChannel(
        channel_state=DensityOperator(resource, (2, 2)),
        correction_frame=(_I.copy(), m.conj().T),
        choi_matrix=choi,
    )
    check_channel(ch)
    return ch


def check_channel(ch: TeleportChannel, tol: float = 1e-10) -> None:
    """Raise InvalidStateError unless the Choi matrix is CP and trace preserving."""
    j = ch.choi_matrix
    lam_min = linalg.hermitian_eig(j).eigenvalues[-1]
    if lam_min < -tol:
        raise InvalidStateError(f"Choi matrix not PSD (min eigenvalue {lam_min:.3e})")
    # normalized Choi: tracing out the output must leave I/2
    reduced = linalg.partial_trace(j / 2, [2, 2], [0])
    if np.max(np.abs(reduced - _I / 2)) > tol:
        raise InvalidStateError("channel is not trace preserving")


def entanglement_fidelity(ch: TeleportChannel) -> float:
    phi = bell_state("phi+").amplitudes
    return float(np.real(np.vdot(phi, ch.choi_matrix @ phi))) / 2


def exact_average_fidelity(ch: TeleportChannel) -> float:
    """Average input/output fidelity over pure inputs, via (2 F_e + 1)/3."""
    return (2 * entanglement_fidelity(ch) + 1) / 3


def sample_fidelities(ch: TeleportChannel, xi: np.ndarray) -> np.ndarray:
    """<xi|Lambda(|xi><xi|)|xi> for each row of ``xi``."""
    j = ch.choi_matrix.reshape(2, 2, 2, 2)
    vals = np.einsum("ni,nj,na,nb,iajb->n", xi, xi.conj(), xi.conj(), xi, j, optimize=True)
    return vals.real


def mc_average_fidelity(ch: TeleportChannel, samples: int = 100_000, seed: int = 0) -> TeleportEstimate:
    """Monte-Carlo average of the output fidelity over Haar-random input qubits."""
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    xi = haar_pure_batch((2,), samples, seed)
    f = sample_fidelities(ch, xi)
    return TeleportEstimate(
        mc_mean=float(f.mean()),
        mc_std_err=float(f.std(ddof=1) / math.sqrt(samples)),
        exact_value=exact_average_fidelity(ch),
        samples=samples,
        seed=seed,
    )
