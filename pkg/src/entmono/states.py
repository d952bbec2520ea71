"""State containers and constructors.

Basis convention: row-major qubit ordering, so the 4-dimensional basis
vectors |0>,|1>,|2>,|3> of a 2x4 split are the two-qubit vectors
|00>,|01>,|10>,|11>. Re-tagging dims between [2, 2, 2] and [2, 4] is a
view, the amplitude/matrix array is shared and never reordered.

Party labels used by :func:`sigma_gamma_pair` are 1-based (parties 1, 2, 3)
to match the usual sigma^{13} / sigma^{12} naming; everything that takes
subsystem axes (``keep``, ``split``) is 0-based.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import linalg
from .exceptions import InvalidStateError, ShapeError

MAX_DIM = 32
STATE_TOL = 1e-10
NORM_TOL = 1e-12
PARAM_TOL = 1e-12

BELL_KINDS = ("phi+", "phi-", "psi+", "psi-")


def _check_dims(dims, size: int | None = None) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ShapeError(f"invalid subsystem dimensions {dims}")
    total = math.prod(dims)
    if total > MAX_DIM:
        raise ShapeError(f"total dimension {total} exceeds {MAX_DIM}")
    if size is not None and total != size:
        raise ShapeError(f"dims {dims} (product {total}) do not match size {size}")
    return dims


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        dims = _check_dims(self.dims, amp.size)
        if not np.all(np.isfinite(amp)):
            raise InvalidStateError("amplitudes contain non-finite values")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state is not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_vector(cls, vec, dims) -> "PureState":
        """Normalize ``vec`` and wrap it."""
        v = np.asarray(vec, dtype=np.complex128).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise InvalidStateError("zero vector")
        return cls(v / n, tuple(dims))

    def view(self, dims) -> "PureState":
        """Same amplitudes under a different factorization, e.g. [2,2,2] -> [2,4]."""
        return PureState(self.amplitudes, tuple(dims))

    def density(self) -> "DensityOperator":
        v = self.amplitudes
        return DensityOperator(np.outer(v, v.conj()), self.dims)

    def __len__(self):
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {m.shape}")
        dims = _check_dims(self.dims, m.shape[0])
        asym = np.max(np.abs(m - m.conj().T))
        if asym > STATE_TOL:
            raise InvalidStateError(f"not Hermitian (max asymmetry {asym:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        lam_min = linalg.hermitian_eig(m).eigenvalues[-1]
        if lam_min < -STATE_TOL:
            raise InvalidStateError(f"not positive semidefinite (min eigenvalue {lam_min:.3e})")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    def view(self, dims) -> "DensityOperator":
        return DensityOperator(self.matrix, tuple(dims))

    def reduce(self, keep) -> "DensityOperator":
        """Partial trace onto the 0-based subsystems in ``keep``."""
        keep = sorted(set(keep))
        red = linalg.partial_trace(self.matrix, self.dims, keep)
        return DensityOperator(red, tuple(self.dims[i] for i in keep))

    def expectation(self, vec) -> float:
        v = np.asarray(vec, dtype=np.complex128).reshape(-1)
        return float(np.real(np.vdot(v, self.matrix @ v)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def as_density(state) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    if isinstance(state, PureState):
        return state.density()
    raise TypeError(f"expected PureState or DensityOperator, got {type(state).__name__}")


def basis_state(index: int, dims) -> PureState:
    dims = _check_dims(dims)
    v = np.zeros(math.prod(dims), dtype=np.complex128)
    v[index] = 1.0
    return PureState(v, dims)


def product_state(*labels: int) -> PureState:
    """Computational-basis qubit product state, e.g. product_state(0, 1) = |01>."""
    idx = int("".join(str(int(b)) for b in labels), 2)
    return basis_state(idx, (2,) * len(labels))


def _from_indices(pairs, dims) -> PureState:
    """Build sum_k c_k |idx_k> from ``[(c, idx), ...]``."""
    v = np.zeros(math.prod(dims), dtype=np.complex128)
    for c, idx in pairs:
        v[idx] += c
    return PureState(v, tuple(dims))


def _check_kind(kind: str) -> str:
    k = kind.replace("−", "-").lower()
    if k not in BELL_KINDS:
        raise ValueError(f"unknown Bell kind {kind!r}; expected one of {BELL_KINDS}")
    return k


def bell_state(kind: str) -> PureState:
    k = _check_kind(kind)
    s = 1 / math.sqrt(2)
    sign = 1.0 if k.endswith("+") else -1.0
    if k.startswith("phi"):
        return _from_indices([(s, 0b00), (sign * s, 0b11)], (2, 2))
    return _from_indices([(s, 0b01), (sign * s, 0b10)], (2, 2))


def tilde_bell_state(kind: str) -> PureState:
    """Three-qubit embedding of a Bell state with the middle qubit fixed at |0>.

    Returned with dims (2, 2, 2); call ``.view((2, 4))`` for the 2x4 picture.
    """
    k = _check_kind(kind)
    s = 1 / math.sqrt(2)
    sign = 1.0 if k.endswith("+") else -1.0
    if k.startswith("phi"):
        return _from_indices([(s, 0b000), (sign * s, 0b101)], (2, 2, 2))
    return _from_indices([(s, 0b001), (sign * s, 0b100)], (2, 2, 2))


def ghz_state(n: int) -> PureState:
    s = 1 / math.sqrt(2)
    return _from_indices([(s, 0), (s, 2**n - 1)], (2,) * n)


def w_state(n: int) -> PureState:
    s = 1 / math.sqrt(n)
    return _from_indices([(s, 1 << k) for k in range(n)], (2,) * n)


# --- parametrized families -------------------------------------------------


@dataclass(frozen=True)
class TwoParamClassParams:
    """Weights of the 2 x d two-parameter class.

    ``beta`` is derived from normalization: 2(d-2)alpha + 3beta + gamma = 1.
    """

    alpha: float
    gamma: float
    d: int = 4
    beta: float = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        beta = (1.0 - 2 * (self.d - 2) * self.alpha - self.gamma) / 3.0
        for name, val in (("alpha", self.alpha), ("beta", beta), ("gamma", self.gamma)):
            if not (-PARAM_TOL <= val <= 1.0 + PARAM_TOL):
                raise ValueError(f"{name}={val!r} outside [0, 1]")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class SigmaGammaParams:
    gamma: float
    alpha: float = field(init=False)

    def __post_init__(self):
        g = float(self.gamma)
        if not (0.0 <= g <= 1.0):
            raise ValueError(f"gamma={g!r} outside [0, 1]")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "alpha", (1.0 - g) / 7.0)


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def two_param_state(p: TwoParamClassParams) -> DensityOperator:
    """The 2 x d generalization of the Werner state, dims (2, d).

    The tilde-Bell vectors live on span{|0>,|1>} of the d-dimensional factor;
    the weight-alpha block covers |i j> for j = 2..d-1.
    """
    d = p.d
    m = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    for i in range(2):
        for j in range(2, d):
            m[i * d + j, i * d + j] += p.alpha
    s = 1 / math.sqrt(2)

    def vec(pairs):
        v = np.zeros(2 * d, dtype=np.complex128)
        for c, (i, j) in pairs:
            v[i * d + j] = c
        return v

    phi_p = vec([(s, (0, 0)), (s, (1, 1))])
    phi_m = vec([(s, (0, 0)), (-s, (1, 1))])
    psi_p = vec([(s, (0, 1)), (s, (1, 0))])
    psi_m = vec([(s, (0, 1)), (-s, (1, 0))])
    m += p.beta * (_proj(phi_p) + _proj(phi_m) + _proj(psi_p))
    m += p.gamma * _proj(psi_m)
    return DensityOperator(m, (2, d))


def sigma_gamma_state(g: SigmaGammaParams | float) -> DensityOperator:
    """Three-qubit sigma_gamma state, dims (2, 2, 2); ``.view((2, 4))`` for 2x4.

    Built directly from the three-qubit expression (weight alpha on the
    four |i 1 j> vectors and on three tilde-Bell projectors, gamma on the
    tilde psi-minus projector), not via :func:`two_param_state`, so the two
    constructions can be checked against each other.
    """
    if not isinstance(g, SigmaGammaParams):
        g = SigmaGammaParams(g)
    a = g.alpha
    m = np.zeros((8, 8), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            idx = (i << 2) | (1 << 1) | j
            m[idx, idx] += a
    for kind in ("phi+", "phi-", "psi+"):
        m += a * _proj(tilde_bell_state(kind).amplitudes)
    m += g.gamma * _proj(tilde_bell_state("psi-").amplitudes)
    return DensityOperator(m, (2, 2, 2))


def sigma_gamma_pair(g: SigmaGammaParams | float, pair=(1, 3)) -> DensityOperator:
    """Two-qubit reduction of sigma_gamma onto parties ``pair`` (1-based).

    (1, 3) uses the Bell-diagonal closed form with weights
    (2a, 2a, 2a, a + gamma) on (phi+, phi-, psi+, psi-); (1, 2) is the
    numeric partial trace over party 3.
    """
    if not isinstance(g, SigmaGammaParams):
        g = SigmaGammaParams(g)
    pair = tuple(pair)
    if pair == (1, 3):
        a = g.alpha
        m = 2 * a * sum(_proj(bell_state(k).amplitudes) for k in ("phi+", "phi-", "psi+"))
        m = m + (a + g.gamma) * _proj(bell_state("psi-").amplitudes)
        return DensityOperator(m, (2, 2))
    if pair == (1, 2):
        return sigma_gamma_state(g).reduce([0, 1])
    raise ValueError(f"pair must be (1, 3) or (1, 2), got {pair}")


# --- Schmidt form ----------------------------------------------------------


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray  # (sqrt(alpha_s), sqrt(beta_s)), descending
    left_vectors: np.ndarray  # 2 x 2, columns |a_0>, |a_1>
    right_vectors: np.ndarray  # d x 2, columns |b_0>, |b_1>

    @property
    def weights(self) -> np.ndarray:
        return self.coefficients**2

    def reconstruct(self) -> np.ndarray:
        a, b, c = self.left_vectors, self.right_vectors, self.coefficients
        return sum(c[k] * np.kron(a[:, k], b[:, k]) for k in range(2))


def qubit_split_matrix(phi: PureState, split: int = 1) -> np.ndarray:
    """Amplitudes of ``phi`` as a 2 x d matrix, cutting the dims after ``split`` factors."""
    if not 0 < split < len(phi.dims):
        raise ShapeError(f"split {split} invalid for dims {phi.dims}")
    left = math.prod(phi.dims[:split])
    if left != 2:
        raise ShapeError(f"first factor under split {split} has dimension {left}, expected 2")
    return phi.amplitudes.reshape(2, -1)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size == 0:
        return v
    c = v[nz[0]]
    return v * (abs(c) / c)


def schmidt(phi: PureState, split: int = 1) -> SchmidtDecomposition:
    """Schmidt decomposition across a 2 | d cut.

    Derived from the eigendecomposition of the 2x2 reduced state on the
    qubit factor. When the second coefficient vanishes a right vector is
    completed to an orthonormal pair.
    """
    m = qubit_split_matrix(phi, split)
    rho1 = m @ m.conj().T
    eig = linalg.hermitian_eig(rho1)
    w = np.clip(eig.eigenvalues, 0.0, None)
    coeffs = np.sqrt(w)
    left = np.column_stack([_phase_fix(eig.eigenvectors[:, k]) for k in range(2)])
    d = m.shape[1]
    right = np.zeros((d, 2), dtype=np.complex128)
    for k in range(2):
        if coeffs[k] > 1e-12:
            right[:, k] = left[:, k].conj() @ m / coeffs[k]
    if coeffs[1] <= 1e-12:
        # pick any unit vector orthogonal to b_0
        b0 = right[:, 0]
        for e in np.eye(d, dtype=np.complex128):
            c = e - np.vdot(b0, e) * b0
            if np.linalg.norm(c) > 0.5:
                right[:, 1] = c / np.linalg.norm(c)
                break
    return SchmidtDecomposition(coeffs, left, right)


def schmidt_state(weights, left=None, right=None, d: int = 2) -> PureState:
    """sqrt(w0)|a0 b0> + sqrt(w1)|a1 b1>; defaults to computational-basis vectors."""
    w = np.asarray(weights, dtype=float)
    left = np.eye(2) if left is None else np.asarray(left)
    right = np.eye(d)[:, :2] if right is None else np.asarray(right)
    v = sum(np.sqrt(w[k]) * np.kron(left[:, k], right[:, k]) for k in range(2))
    return PureState.from_vector(v, (2, right.shape[0]))


def embed_qubit_op(a) -> np.ndarray:
    """4x4 block-diagonal [[A, 0], [0, I]] acting as A on span{|0>,|1>}."""
    a = linalg.as_matrix(a)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got {a.shape}")
    out = np.eye(4, dtype=np.complex128)
    out[:2, :2] = a
    return out


# --- random states ---------------------------------------------------------


def seed_sequence(seed) -> np.random.SeedSequence:
    """Accept an int or an existing SeedSequence (e.g. a spawned child)."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_pure_batch(dims, n: int, seed) -> np.ndarray:
    """``n`` Haar-random unit vectors as rows of an (n, prod(dims)) array."""
    dims = _check_dims(dims)
    rng = np.random.default_rng(seed)
    z = _gaussian(rng, (n, math.prod(dims)))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_pure(dims, seed) -> PureState:
    dims = _check_dims(dims)
    return PureState(haar_pure_batch(dims, 1, seed)[0], dims)


def random_density(dims, seed) -> DensityOperator:
    """Random density operator G G^dagger / tr(G G^dagger) with complex Gaussian G."""
    dims = _check_dims(dims)
    n = math.prod(dims)
    rng = np.random.default_rng(seed)
    g = _gaussian(rng, (n, n))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityOperator(m / np.trace(m).real, dims)


def haar_unitary(n: int, seed) -> np.ndarray:
    """Haar-random n x n unitary (QR of a complex Gaussian, phases fixed)."""
    rng = np.random.default_rng(seed)
    return linalg.qr_retract(_gaussian(rng, (n, n)))


# --- state files -----------------------------------------------------------


def _pairs(arr: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in arr.reshape(-1)]


def _complex_from(data, what: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidStateError(f"{what}: expected numbers or [re, im] pairs") from exc
    if arr.ndim >= 1 and arr.shape[-1] == 2 and arr.ndim > 1:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 1:
        return arr.astype(np.complex128)
    raise InvalidStateError(f"{what}: expected a list of [re, im] pairs")


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "amplitudes": _pairs(state.amplitudes)}
    if isinstance(state, DensityOperator):
        return {"dims": list(state.dims), "matrix": _pairs(state.matrix)}
    raise TypeError(f"cannot serialize {type(state).__name__}")


def state_from_dict(doc: dict, dims: Sequence[int] | None = None):
    """Parse a state document. ``dims`` overrides the stored dims if given.

    ``matrix`` is a row-major list of [re, im] pairs (flat, or nested by row).
    ``amplitudes`` is a list of [re, im] pairs. Plain reals are accepted too.
    """
    if not isinstance(doc, dict):
        raise InvalidStateError("state document must be an object")
    if dims is None:
        if "dims" not in doc:
            raise InvalidStateError("state document has no 'dims'")
        dims = doc["dims"]
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise InvalidStateError(f"invalid dims {dims!r}") from exc
    if "matrix" in doc:
        flat = _complex_from(doc["matrix"], "matrix").reshape(-1)
        n = math.isqrt(flat.size)
        if n * n != flat.size:
            raise InvalidStateError(f"matrix has {flat.size} entries, not a square")
        return DensityOperator(flat.reshape(n, n), dims)
    if "amplitudes" in doc:
        amp = _complex_from(doc["amplitudes"], "amplitudes").reshape(-1)
        return PureState(amp, dims)
    raise InvalidStateError("state document needs 'matrix' or 'amplitudes'")


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=1))


def load_state(path, dims: Sequence[int] | None = None):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidStateError(f"cannot parse {path}: {exc}") from exc
    return state_from_dict(doc, dims)
