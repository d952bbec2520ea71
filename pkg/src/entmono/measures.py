"""Concurrence, fully entangled fraction (FEF) and teleportation fidelity."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import NumericError, ShapeError
from .states import (
    DensityOperator,
    PureState,
    as_density,
    bell_state,
    qubit_split_matrix,
    seed_sequence,
)

CLASSICAL_FEF = 0.5
CLASSICAL_FIDELITY = 2.0 / 3.0

_SY = np.array([[0, -1j], [1j, 0]])
_SYSY = np.kron(_SY, _SY)


@dataclass(frozen=True)
class FefResult:
    value: float
    optimal_vector: PureState
    restarts_used: int = 1
    iterations: int = 0
    converged: bool = True


@dataclass(frozen=True)
class ClampedPairQuantities:
    fef_raw: float
    fef_clamped: float
    fid_raw: float
    fid_clamped: float


def _qubit_det(phi: PureState, split: int) -> float:
    m = qubit_split_matrix(phi, split)
    rho1 = m @ m.conj().T
    det = (rho1[0, 0] * rho1[1, 1] - rho1[0, 1] * rho1[1, 0]).real
    return max(det, 0.0)


def concurrence_pure(phi: PureState, split: int = 1) -> float:
    """2 sqrt(det rho_1) across the cut after the first ``split`` factors."""
    return min(2.0 * math.sqrt(_qubit_det(phi, split)), 1.0)


def fef_pure(phi: PureState, split: int = 1) -> float:
    """1/2 + sqrt(det rho_1); the qubit's reduced state fixes the answer."""
    return 0.5 + 0.5 * concurrence_pure(phi, split)


def _require_two_qubit(rho) -> DensityOperator:
    rho = as_density(rho)
    if rho.dims != (2, 2):
        if rho.dim == 4 and len(rho.dims) == 2 and rho.dims[0] == 2:
            pass
        else:
            raise ShapeError(f"expected a two-qubit state, got dims {rho.dims}")
    return rho


def concurrence_two_qubit(rho) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are square roots of the eigenvalues of sqrt(rho) rho~ sqrt(rho),
    with rho~ = (Y x Y) rho* (Y x Y); this Hermitian form has the same
    spectrum as rho rho~.
    """
    rho = _require_two_qubit(rho)
    m = rho.matrix
    rho_tilde = _SYSY @ m.conj() @ _SYSY
    s = linalg.psd_sqrt(m)
    r = s @ rho_tilde @ s
    ev = linalg.hermitian_eig(0.5 * (r + r.conj().T)).eigenvalues
    ev = np.where(ev < 1e-12, 0.0, ev)
    lam = np.sqrt(ev)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _unit(x) -> float:
    # rounding can push a fidelity-like value a few ulps outside [0, 1]
    return min(max(float(x), 0.0), 1.0)


def magic_basis() -> np.ndarray:
    """Columns |phi+>, i|phi->, i|psi+>, |psi->."""
    cols = [
        bell_state("phi+").amplitudes,
        1j * bell_state("phi-").amplitudes,
        1j * bell_state("psi+").amplitudes,
        bell_state("psi-").amplitudes,
    ]
    return np.column_stack(cols)


def fef_two_qubit(rho) -> FefResult:
    """Closed-form two-qubit FEF.

    Maximally entangled two-qubit vectors are, up to a global phase, real
    combinations of the magic basis, so F is the top eigenvalue of Re M with
    M_ij = <e_i|rho|e_j>.
    """
    rho = _require_two_qubit(rho)
    e = magic_basis()
    gram = e.conj().T @ rho.matrix @ e
    eig = linalg.hermitian_eig(gram.real)
    c = eig.eigenvectors[:, 0].real
    c = c / np.linalg.norm(c)
    vec = e @ c
    return FefResult(
        value=_unit(eig.eigenvalues[0]),
        optimal_vector=PureState(vec, (2, 2)),
    )


# --- 2 x d optimizer ------------------------------------------------------


def _objective(rho: np.ndarray, x: np.ndarray) -> float:
    # with x = [v0 v1] (d x 2), the vector (|0>v0 + |1>v1) is x.T flattened
    u = x.T.reshape(-1)
    return 0.5 * float(np.real(np.vdot(u, rho @ u)))


def _egrad(rho: np.ndarray, x: np.ndarray) -> np.ndarray:
    return (rho @ x.T.reshape(-1)).reshape(2, -1).T


def _tangent(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    xg = x.conj().T @ g
    return g - x @ (0.5 * (xg + xg.conj().T))


def _retract2(y: np.ndarray) -> np.ndarray:
    # QR retraction for two columns (Gram-Schmidt = QR with positive diag R)
    v0 = y[:, 0] / np.linalg.norm(y[:, 0])
    v1 = y[:, 1] - np.vdot(v0, y[:, 1]) * v0
    return np.column_stack([v0, v1 / np.linalg.norm(v1)])


def _ascend(m, x, tol, max_iter, patience=3):
    """Projected-gradient ascent on the complex Stiefel manifold St(d, 2).

    Backtracking starts at step 1 and halves until the objective increases;
    stops after ``patience`` consecutive iterations with gain below ``tol``.
    """
    val = _objective(m, x)
    quiet = 0
    for it in range(1, max_iter + 1):
        direction = _tangent(x, _egrad(m, x))
        if np.linalg.norm(direction) < 1e-15:
            return x, val, it, True
        step = 1.0
        while True:
            trial = _retract2(x + step * direction)
            tval = _objective(m, trial)
            if tval > val or step < 1e-12:
                break
            step *= 0.5
        gain = tval - val
        if gain > 0:
            x, val = trial, tval
        quiet = quiet + 1 if gain < tol else 0
        if quiet >= patience:
            return x, val, it, True
    return x, val, max_iter, False


def fef_2xd(rho, restarts: int = 32, tol: float = 1e-10, seed=0, max_iter: int = 5000) -> FefResult:
    """FEF of a 2 x d state by restarted ascent over orthonormal pairs (v0, v1).

    Every maximally entangled vector has the form (|0>v0 + |1>v1)/sqrt(2)
    with orthonormal v0, v1, so the search runs over d x 2 isometries.
    The best restart wins; ties go to the lowest restart index.

    Raises
    ------
    NumericError
        If no restart converges; ``err.best`` holds the best FefResult found.
    """
    rho = as_density(rho)
    n = rho.dim
    if n % 2 or rho.dims[0] != 2:
        raise ShapeError(f"expected a 2 x d state, got dims {rho.dims}")
    d = n // 2
    if not 2 <= d <= 4:
        raise ShapeError(f"d must be in 2..4, got {d}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    m = rho.matrix
    seeds = seed_sequence(seed).spawn(restarts)

    best = None
    total_iter = 0
    any_converged = False
    for s in seeds:
        rng = np.random.default_rng(s)
        x0 = linalg.qr_retract(rng.standard_normal((d, 2)) + 1j * rng.standard_normal((d, 2)))
        x, val, it, ok = _ascend(m, x0, tol, max_iter)
        total_iter += it
        any_converged |= ok
        if best is None or val > best[1]:
            best = (x, val)

    x, val = best
    vec = (np.kron([1, 0], x[:, 0]) + np.kron([0, 1], x[:, 1])) / math.sqrt(2)
    result = FefResult(
        value=_unit(rho.expectation(vec)),
        optimal_vector=PureState(vec, (2, d)),
        restarts_used=restarts,
        iterations=total_iter,
        converged=any_converged,
    )
    if not any_converged:
        raise NumericError(f"fef_2xd: no restart converged in {max_iter} iterations", best=result)
    return result


def fef(rho, restarts: int = 32, tol: float = 1e-10, seed=0) -> FefResult:
    """FEF of any 2 x d input; closed form for two qubits, optimizer otherwise."""
    rho = as_density(rho)
    if rho.dim == 4:
        return fef_two_qubit(rho.view((2, 2)))
    return fef_2xd(rho.view((2, rho.dim // 2)), restarts=restarts, tol=tol, seed=seed)


def fidelity_from_fef(f_ef: float) -> float:
    """Maximal average teleportation fidelity attainable from FEF ``f_ef``."""
    if not -1e-12 <= f_ef <= 1 + 1e-12:
        raise ValueError(f"FEF must lie in [0, 1], got {f_ef!r}")
    return (2.0 * f_ef + 1.0) / 3.0


def clamp_pair_quantities(f_ef: float) -> ClampedPairQuantities:
    fid = fidelity_from_fef(f_ef)
    return ClampedPairQuantities(
        fef_raw=f_ef,
        fef_clamped=max(f_ef, CLASSICAL_FEF),
        fid_raw=fid,
        fid_clamped=max(fid, CLASSICAL_FIDELITY),
    )
