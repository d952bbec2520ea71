"""Monogamy residuals for multiqubit pure states and the sigma_gamma counterexample.

For a focus qubit and its partners j, each report compares

    lhs^2  against  sum_j term_j^2

where lhs is the focus-vs-rest quantity and term_j the pair quantity.
For the FEF and fidelity kinds, lhs = 2F - 1 (resp. 3f - 2) and pair
terms use the classical-threshold clamps max(F, 1/2) and max(f, 2/3).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exceptions import EntmonoError, NumericError, ShapeError
from .measures import (
    CLASSICAL_FEF,
    CLASSICAL_FIDELITY,
    concurrence_pure,
    concurrence_two_qubit,
    fef_2xd,
    fef_pure,
    fef_two_qubit,
    fidelity_from_fef,
)
from .states import PureState, SigmaGammaParams, seed_sequence, sigma_gamma_pair, sigma_gamma_state

log = logging.getLogger(__name__)

HOLD_TOL = 1e-9
VIOLATION_MARGIN = 1e-9
KINDS = ("concurrence", "fef", "fidelity")


@dataclass(frozen=True)
class PairTerm:
    partner: int  # 0-based qubit index
    raw: float
    clamped: float
    squared: float


@dataclass(frozen=True)
class MonogamyReport:
    kind: str
    lhs_value: float
    pair_terms: tuple[PairTerm, ...]
    rhs_sum: float
    residual: float
    holds: bool


def _focus_first(psi: PureState, focus: int) -> PureState:
    """Permute qubits so that ``focus`` becomes qubit 0."""
    n = len(psi.dims)
    if not 0 <= focus < n:
        raise ValueError(f"focus {focus} out of range for {n} qubits")
    if focus == 0:
        return psi
    order = [focus] + [k for k in range(n) if k != focus]
    t = psi.amplitudes.reshape(psi.dims).transpose(order)
    return PureState(t.reshape(-1), tuple(psi.dims[k] for k in order))


def _validate(psi: PureState) -> None:
    if any(d != 2 for d in psi.dims):
        raise ShapeError(f"monogamy residuals need qubits, got dims {psi.dims}")
    if not 3 <= len(psi.dims) <= 5:
        raise ShapeError(f"monogamy residuals support 3..5 qubits, got {len(psi.dims)}")


def _pair_states(psi: PureState, focus: int):
    rho = psi.density()
    for j in range(len(psi.dims)):
        if j != focus:
            yield j, rho.reduce([focus, j])


def _report(kind: str, lhs: float, terms: list[PairTerm]) -> MonogamyReport:
    rhs = math.fsum(t.squared for t in terms)
    residual = lhs * lhs - rhs
    return MonogamyReport(kind, lhs, tuple(terms), rhs, residual, residual >= -HOLD_TOL)


def ckw_residual(psi: PureState, focus: int = 0) -> MonogamyReport:
    """C_{1(rest)}^2 - sum_j C_{1j}^2 with two-qubit Wootters concurrences."""
    _validate(psi)
    lhs = concurrence_pure(_focus_first(psi, focus), 1)
    terms = []
    for j, rho in _pair_states(psi, focus):
        c = concurrence_two_qubit(rho)
        terms.append(PairTerm(j, c, c, c * c))
    return _report("concurrence", lhs, terms)


def _pair_fefs(psi: PureState, focus: int):
    for j, rho in _pair_states(psi, focus):
        yield j, fef_two_qubit(rho).value


def fef_monogamy_residual(psi: PureState, focus: int = 0) -> MonogamyReport:
    _validate(psi)
    lhs = 2 * fef_pure(_focus_first(psi, focus), 1) - 1
    terms = []
    for j, f in _pair_fefs(psi, focus):
        fc = max(f, CLASSICAL_FEF)
        t = 2 * fc - 1
        terms.append(PairTerm(j, f, fc, t * t))
    return _report("fef", lhs, terms)


def fidelity_monogamy_residual(psi: PureState, focus: int = 0) -> MonogamyReport:
    _validate(psi)
    lhs = 3 * fidelity_from_fef(fef_pure(_focus_first(psi, focus), 1)) - 2
    terms = []
    for j, f in _pair_fefs(psi, focus):
        fid = fidelity_from_fef(f)
        fc = max(fid, CLASSICAL_FIDELITY)
        t = 3 * fc - 2
        terms.append(PairTerm(j, fid, fc, t * t))
    return _report("fidelity", lhs, terms)


def all_residuals(psi: PureState, focus: int = 0) -> dict[str, MonogamyReport]:
    return {
        "concurrence": ckw_residual(psi, focus),
        "fef": fef_monogamy_residual(psi, focus),
        "fidelity": fidelity_monogamy_residual(psi, focus),
    }


# --- sigma_gamma counterexample -------------------------------------------


@dataclass
class CounterexampleRow:
    """One gamma of the sigma_gamma analysis.

    ``fef_violated`` / ``fid_violated`` clamp both sides of the inequality.
    The raw F_1_23 is kept, so the unclamped comparison
    (2 F_1_23 - 1)^2 < (2 F_13 - 1)^2 is available as ``raw_fef_violated``.
    """

    gamma: float
    alpha: float
    F_1_23: float = math.nan
    F_12: float = math.nan
    F_13: float = math.nan
    f_1_23: float = math.nan
    f_13: float = math.nan
    C_13: float = math.nan
    fef_violated: bool = False
    fid_violated: bool = False
    strictness_proxy: bool = False
    raw_fef_violated: bool = False
    error: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.error


def _sq(x: float) -> float:
    return x * x


def fef_violation(f_1_23: float, f_12: float, f_13: float) -> bool:
    lhs = _sq(2 * max(f_1_23, CLASSICAL_FEF) - 1)
    rhs = _sq(2 * max(f_12, CLASSICAL_FEF) - 1) + _sq(2 * max(f_13, CLASSICAL_FEF) - 1)
    return lhs < rhs - VIOLATION_MARGIN


def fidelity_violation(fid_1_23: float, fid_12: float, fid_13: float) -> bool:
    lhs = _sq(3 * max(fid_1_23, CLASSICAL_FIDELITY) - 2)
    rhs = _sq(3 * max(fid_12, CLASSICAL_FIDELITY) - 2) + _sq(3 * max(fid_13, CLASSICAL_FIDELITY) - 2)
    return lhs < rhs - VIOLATION_MARGIN


def closed_forms(gamma) -> dict[str, Fraction]:
    """Exact F_13, f_13, C_13 and F_1_23 for rational ``gamma``.

    F_1_23 = gamma holds for gamma > alpha, i.e. gamma > 1/8; C_13 is
    clipped at zero below gamma = 5/12.
    """
    g = Fraction(gamma).limit_denominator(10**6)
    out = {
        "alpha": (1 - g) / 7,
        "F_13": (6 * g + 1) / 7,
        "f_13": (4 * g + 3) / 7,
        "C_13": max(Fraction(0), (12 * g - 5) / 7),
    }
    if g > Fraction(1, 8):
        out["F_1_23"] = g
        out["f_1_23"] = (2 * g + 1) / 3
    return out


def counterexample_row(gamma: float, restarts: int = 32, seed=0, tol: float = 1e-10) -> CounterexampleRow:
    params = SigmaGammaParams(gamma)
    row = CounterexampleRow(gamma=params.gamma, alpha=params.alpha)

    rho13 = sigma_gamma_pair(params, (1, 3))
    rho12 = sigma_gamma_pair(params, (1, 2))
    row.F_13 = fef_two_qubit(rho13).value
    # the closed-form pair must agree with the numeric partial trace
    numeric13 = sigma_gamma_state(params).reduce([0, 2])
    row.extra["pair13_mismatch"] = float(np.max(np.abs(numeric13.matrix - rho13.matrix)))
    row.F_12 = fef_two_qubit(rho12).value
    row.f_13 = fidelity_from_fef(row.F_13)
    row.C_13 = concurrence_two_qubit(rho13)

    try:
        res = fef_2xd(sigma_gamma_state(params).view((2, 4)), restarts=restarts, tol=tol, seed=seed)
    except NumericError as exc:
        row.error = str(exc)
        if exc.best is not None:
            row.F_1_23 = exc.best.value
        raise NumericError(str(exc), best=row) from exc
    row.F_1_23 = res.value
    row.f_1_23 = fidelity_from_fef(res.value)

    row.fef_violated = fef_violation(row.F_1_23, row.F_12, row.F_13)
    row.fid_violated = fidelity_violation(row.f_1_23, fidelity_from_fef(row.F_12), row.f_13)
    row.raw_fef_violated = _sq(2 * row.F_1_23 - 1) < _sq(2 * row.F_13 - 1) - VIOLATION_MARGIN
    row.strictness_proxy = row.C_13 > 2 * row.F_1_23 - 1 + VIOLATION_MARGIN
    return row


def gamma_sweep(grid: Sequence[float], restarts: int = 32, seed: int = 0, tol: float = 1e-10) -> list[CounterexampleRow]:
    """Independent counterexample rows, one per gamma, in grid order.

    Row k uses the k-th child of ``SeedSequence(seed)``. A failing row is
    kept with its ``error`` set and the sweep carries on.
    """
    seeds = seed_sequence(seed).spawn(len(grid))
    rows = []
    for g, s in zip(grid, seeds):
        try:
            rows.append(counterexample_row(g, restarts=restarts, seed=s, tol=tol))
        except NumericError as exc:
            log.warning("gamma=%s: %s", g, exc)
            rows.append(exc.best)
        except (EntmonoError, ValueError) as exc:
            log.warning("gamma=%s: %s", g, exc)
            rows.append(CounterexampleRow(gamma=float(g), alpha=(1 - float(g)) / 7, error=str(exc)))
    return rows
