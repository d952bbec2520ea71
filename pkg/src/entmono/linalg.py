"""Small dense complex linear algebra used by the rest of the package.

Everything here works on plain ``numpy`` arrays of dtype complex128.
Subsystem indices passed to :func:`partial_trace` are 0-based axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import NumericError, ShapeError, SizeError

MAX_KRON_SIDE = 1024
HERMITIAN_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.size == 0:
        raise ShapeError("empty matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_KRON_SIDE or cols > MAX_KRON_SIDE:
        raise SizeError(f"kron result {rows}x{cols} exceeds {MAX_KRON_SIDE} per side")
    return np.kron(a, b)


def kron_all(factors: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = kron(out, f)
    return out


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduce ``m`` onto the subsystems listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Square matrix on the tensor product of spaces with sizes ``dims``.
    dims : sequence of int
        Subsystem dimensions, row-major (first factor is most significant).
    keep : iterable of int
        0-based subsystem indices to keep. Must be a nonempty proper subset.

    Returns
    -------
    numpy.ndarray
        Reduced matrix; kept subsystems stay in ascending order.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ShapeError(f"subsystem dimensions must be positive, got {dims}")
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise ShapeError(f"matrix shape {m.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == len(dims):
        raise ValueError("keep must be a nonempty proper subset of subsystems")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    nsys = len(dims)
    traced = [i for i in range(nsys) if i not in keep]
    t = m.reshape(dims + dims)
    # trace highest axes first so lower axis numbers stay valid
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    dk = int(np.prod([dims[i] for i in keep]))
    return t.reshape(dk, dk)


def hermitize(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return (h + h^dagger)/2, refusing inputs that are not Hermitian within ``tol``."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ShapeError(f"expected a square matrix, got {h.shape}")
    asym = np.max(np.abs(h - dagger(h)))
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e} > {tol:g})")
    return 0.5 * (h + dagger(h))


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ dagger(q)


def hermitian_eig(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending."""
    h = hermitize(h)
    try:
        w, q = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver did not converge: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=q[:, order])


def psd_sqrt(h) -> np.ndarray:
    """Square root of a positive-semidefinite matrix; tiny negative eigenvalues are clipped."""
    eig = hermitian_eig(h)
    w = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    q = eig.eigenvectors
    return (q * w) @ dagger(q)


def qr_retract(x: np.ndarray) -> np.ndarray:
    """Map a full-column-rank matrix to the nearest-by-QR isometry.

    The column signs are fixed so that R has a positive real diagonal,
    which makes the map continuous and deterministic.
    """
    q, r = np.linalg.qr(x)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * ph[..., None, :]
