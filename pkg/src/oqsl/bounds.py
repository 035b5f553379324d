"""Speed-limit bound evaluation for observables, states, batteries,
correlation functions, and commutators, plus the rate-inequality auditor.

Every evaluator returns a :class:`BoundReport` whose ``valid`` flag states
whether the actual horizon T respects the computed lower bound T_qsl.
Conventions shared by all bounds:

* a numerator within ``ZERO_TOL`` of zero yields T_qsl = 0 exactly (an
  unchanged expectation costs no time);
* a zero denominator with a nonzero numerator is an inconsistency and raises
  :class:`~oqsl.linalg.NumericError`, never returns infinity;
* complex-valued numerators (two-time correlations, commutator expectations)
  enter through their modulus.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ObservableTrajectory, TimeGrid, evolve_unitary_heisenberg
from .linalg import (
    DEFAULT_TOL,
    DensityState,
    NumericError,
    ValidationError,
    as_matrix,
    hs_norm,
    is_hermitian,
    op_norm,
    tr_norm,
    variance,
)

ZERO_TOL = 1e-12
EPS_VAR = 1e-12
VALID_TOL = 1e-6

BOUND_IDS = frozenset(
    {
        "MT_INTEGRAL",
        "SELF_INVERSE",
        "STATE_MT",
        "PURITY_HS",
        "MIN_NORM",
        "GENERATOR_HS",
        "DELCAMPO",
        "KRAUS",
        "STATE_INDEP",
        "BATTERY_CT1",
        "BATTERY_CT2",
        "CORR_CLOSED",
        "CORR_OPEN",
        "COMM_CLOSED",
        "COMM_OPEN",
    }
)

RATE_CHECKS = ("RATE_ROBERTSON", "RATE_HOLDER_OP", "RATE_CS_HS")


@dataclass(frozen=True)
class BoundReport:
    """One bound evaluation: identifier, horizon T, bound value, validity."""

    bound_id: str
    T: float
    T_qsl: float
    valid: bool
    inputs_digest: str
    details: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class CorrelationTrace:
    """Two-time correlation C(t) = <A(t)A(0)> - <A(t)><A(0)> on a grid."""

    grid: TimeGrid
    C_samples: np.ndarray = field(compare=False)


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, np.ndarray):
            h.update(np.ascontiguousarray(p).tobytes())
        else:
            h.update(repr(p).encode())
    return h.hexdigest()[:16]


def _report(bound_id, T, T_qsl, digest, details, valid_tol=VALID_TOL) -> BoundReport:
    return BoundReport(
        bound_id=bound_id,
        T=float(T),
        T_qsl=float(T_qsl),
        valid=bool(T_qsl <= T + valid_tol),
        inputs_digest=digest,
        details=details,
    )


def _ratio(bound_id, numerator, denominator, what) -> float:
    if numerator <= ZERO_TOL:
        return 0.0
    if denominator <= 0.0:
        raise NumericError(f"{bound_id}: {what} is zero while the numerator changed")
    return numerator / denominator


def _mean_speed(speeds: np.ndarray, grid: TimeGrid) -> float:
    return float(np.trapezoid(speeds, dx=grid.h)) / grid.duration


# ---------------------------------------------------------------------------
# unitary-dynamics bounds


def _mt_integral_core(bound_id, traj, delta_H, hbar, eps_var, digest_extra=()):
    if delta_H <= 0:
        raise ValidationError(f"{bound_id}: energy spread must be positive")
    d_expect = np.abs(np.diff(traj.expect))
    mid_std = 0.5 * (traj.stddev[:-1] + traj.stddev[1:])
    usable = mid_std >= eps_var
    contrib = np.where(usable & (d_expect > ZERO_TOL), d_expect / np.where(usable, mid_std, 1.0), 0.0)
    integral = float(contrib.sum())
    T = traj.grid.duration
    tqsl = hbar / (2.0 * delta_H) * integral
    details = {
        "integral": integral,
        "delta_H": float(delta_H),
        "cells": int(d_expect.size),
        "skipped_cells": int(np.count_nonzero(~usable)),
        "expect_start": float(traj.expect[0]),
        "expect_end": float(traj.expect[-1]),
    }
    digest = _digest(traj.expect, traj.stddev, delta_H, hbar, *digest_extra)
    return _report(bound_id, T, tqsl, digest, details)


def oqsl_mt_integral(
    traj: ObservableTrajectory,
    delta_H: float,
    hbar: float = 1.0,
    eps_var: float = EPS_VAR,
) -> BoundReport:
    """Path-integral bound for unitary dynamics:

    T_qsl = (hbar / 2 dH) * sum_cells |d<O>| / dO(midpoint),

    by the midpoint rule over grid cells; cells whose midpoint spread falls
    below ``eps_var`` contribute zero and are counted in the details.
    """
    if traj.kind != "unitary":
        raise ValidationError("MT_INTEGRAL requires a unitary-kind trajectory")
    return _mt_integral_core("MT_INTEGRAL", traj, delta_H, hbar, eps_var)


def oqsl_self_inverse(
    expect0: float,
    expectT: float,
    delta_H: float,
    T: float,
    hbar: float = 1.0,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Arcsine bound for self-inverse observables (O^2 = identity):

    T_qsl = (hbar / 2 dH) |arcsin <O(T)> - arcsin <O(0)>|.
    """
    if delta_H <= 0:
        raise ValidationError("SELF_INVERSE: energy spread must be positive")
    for name, v in (("expect0", expect0), ("expectT", expectT)):
        if abs(v) > 1.0 + tol:
            raise ValidationError(
                f"SELF_INVERSE: {name}={v!r} outside [-1, 1] beyond tolerance"
            )
    e0 = float(np.clip(expect0, -1.0, 1.0))
    eT = float(np.clip(expectT, -1.0, 1.0))
    if abs(eT - e0) <= ZERO_TOL:
        tqsl = 0.0
    else:
        tqsl = hbar / (2.0 * delta_H) * abs(np.arcsin(eT) - np.arcsin(e0))
    details = {"expect0": e0, "expectT": eT, "delta_H": float(delta_H)}
    return _report("SELF_INVERSE", T, tqsl, _digest(e0, eT, delta_H, hbar, T), details)


def state_qsl_projector(
    p0: float,
    pT: float,
    delta_H: float,
    T: float,
    hbar: float = 1.0,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """State (survival-probability) bound through a projector observable:

    T_qsl = (hbar / dH) |arcsin sqrt(pT) - arcsin sqrt(p0)|,

    which for p0 = 1 reduces exactly to (hbar / dH) arccos sqrt(pT), the
    Mandelstam-Tamm bound.
    """
    if delta_H <= 0:
        raise ValidationError("STATE_MT: energy spread must be positive")
    for name, p in (("p0", p0), ("pT", pT)):
        if p < -tol or p > 1.0 + tol:
            raise ValidationError(f"STATE_MT: {name}={p!r} outside [0, 1] beyond tolerance")
    p0c = float(np.clip(p0, 0.0, 1.0))
    pTc = float(np.clip(pT, 0.0, 1.0))
    if p0c == 1.0:
        tqsl = hbar / delta_H * float(np.arccos(np.sqrt(pTc)))
    elif pTc == 1.0:
        tqsl = hbar / delta_H * float(np.arccos(np.sqrt(p0c)))
    else:
        tqsl = hbar / delta_H * abs(float(np.arcsin(np.sqrt(pTc)) - np.arcsin(np.sqrt(p0c))))
    details = {"p0": p0c, "pT": pTc, "delta_H": float(delta_H)}
    return _report("STATE_MT", T, tqsl, _digest(p0c, pTc, delta_H, hbar, T), details)


def oqsl_purity_hs(
    expect0: float,
    expectT: float,
    rho: DensityState,
    oh_hs: float,
    T: float,
    hbar: float = 1.0,
) -> BoundReport:
    """Purity-weighted Hilbert-Schmidt bound:

    T_qsl = (hbar / 2 sqrt(tr rho^2)) |<O(T)> - <O(0)>| / ||O(0) H||_hs.
    """
    num = abs(expectT - expect0)
    tqsl = hbar / (2.0 * np.sqrt(rho.purity)) * _ratio(
        "PURITY_HS", num, oh_hs, "||O(0)H||_hs"
    )
    details = {
        "expect0": float(expect0),
        "expectT": float(expectT),
        "purity": rho.purity,
        "oh_hs": float(oh_hs),
    }
    return _report("PURITY_HS", T, tqsl, _digest(expect0, expectT, rho.purity, oh_hs, hbar, T), details)


def oqsl_min_norm(
    expect0: float,
    expectT: float,
    oh_op: float,
    oh_tr: float,
    T: float,
    hbar: float = 1.0,
) -> BoundReport:
    """Minimum-norm bound for pure initial states:

    T_qsl = (hbar / 2) |<O(T)> - <O(0)>| / min(||O(0)H||_op, ||O(0)H||_tr).
    """
    num = abs(expectT - expect0)
    denom = min(oh_op, oh_tr)
    tqsl = hbar / 2.0 * _ratio("MIN_NORM", num, denom, "min operator/trace norm")
    details = {
        "expect0": float(expect0),
        "expectT": float(expectT),
        "oh_op": float(oh_op),
        "oh_tr": float(oh_tr),
    }
    return _report("MIN_NORM", T, tqsl, _digest(expect0, expectT, oh_op, oh_tr, hbar, T), details)


# ---------------------------------------------------------------------------
# open/arbitrary-dynamics bounds


def oqsl_generator_hs(traj: ObservableTrajectory, rho: DensityState) -> BoundReport:
    """Generator-speed bound for unitary or Lindblad trajectories:

    T_qsl = |<O(T)> - <O(0)>| / (sqrt(tr rho^2) * Lambda_T),

    with Lambda_T the time-averaged Hilbert-Schmidt speed of the evolving
    observable (trapezoid rule on the sampled speeds).
    """
    if traj.kind not in ("unitary", "lindblad"):
        raise ValidationError("GENERATOR_HS requires a unitary- or lindblad-kind trajectory")
    num = abs(float(traj.expect[-1] - traj.expect[0]))
    lam = _mean_speed(traj.gen_speed_hs, traj.grid)
    tqsl = _ratio("GENERATOR_HS", num, np.sqrt(rho.purity) * lam, "mean generator speed")
    details = {
        "lambda_T": lam,
        "purity": rho.purity,
        "expect0": float(traj.expect[0]),
        "expectT": float(traj.expect[-1]),
    }
    digest = _digest(traj.expect, traj.gen_speed_hs, rho.purity)
    return _report("GENERATOR_HS", traj.grid.duration, tqsl, digest, details)


def qsl_delcampo(
    rho0: DensityState,
    rhoT: DensityState,
    lrho0_hs2: float,
    T: float,
) -> BoundReport:
    """Relative-purity state bound for Lindblad dynamics:

    theta = arccos(tr[rho0 rhoT] / tr[rho0^2]),
    T_qsl = |cos theta - 1| tr[rho0^2] / sqrt(tr[(L rho0)^2]),

    where the caller supplies tr[(L rho0)^2] evaluated at the initial state.
    """
    overlap = float(np.trace(rho0.matrix @ rhoT.matrix).real)
    cos_theta = float(np.clip(overlap / rho0.purity, -1.0, 1.0))
    num = abs(cos_theta - 1.0) * rho0.purity
    if num <= ZERO_TOL:
        tqsl = 0.0
    else:
        if lrho0_hs2 <= 0:
            raise ValidationError("DELCAMPO: tr[(L rho0)^2] must be positive")
        tqsl = num / np.sqrt(lrho0_hs2)
    details = {
        "cos_theta": cos_theta,
        "theta": float(np.arccos(cos_theta)),
        "purity0": rho0.purity,
        "lrho0_hs2": float(lrho0_hs2),
    }
    return _report("DELCAMPO", T, tqsl, _digest(rho0.matrix, rhoT.matrix, lrho0_hs2, T), details)


def oqsl_kraus(traj: ObservableTrajectory, rho: DensityState) -> BoundReport:
    """Kraus-map bound:

    T_qsl = |<O(T)> - <O(0)>| / (2 sqrt(tr rho^2) * Lambda_T),

    with Lambda_T the time average of sum_i ||K_i^dag(t) O(0) dK_i/dt||_hs.
    """
    if traj.kind != "kraus":
        raise ValidationError("KRAUS requires a kraus-kind trajectory")
    num = abs(float(traj.expect[-1] - traj.expect[0]))
    lam = _mean_speed(traj.gen_speed_hs, traj.grid)
    tqsl = _ratio("KRAUS", num, 2.0 * np.sqrt(rho.purity) * lam, "mean Kraus speed")
    details = {
        "lambda_T": lam,
        "purity": rho.purity,
        "expect0": float(traj.expect[0]),
        "expectT": float(traj.expect[-1]),
    }
    digest = _digest(traj.expect, traj.gen_speed_hs, rho.purity)
    return _report("KRAUS", traj.grid.duration, tqsl, digest, details)


def oqsl_state_independent(O0: np.ndarray, traj: ObservableTrajectory) -> BoundReport:
    """State-independent bound from the Hilbert-Schmidt overlap of O(0), O(T):

    T_qsl = |tr[O(0)O(T)] - tr[O(0)^2]| / (||O(0)||_hs * Lambda_T).
    """
    if traj.kind not in ("unitary", "lindblad"):
        raise ValidationError("STATE_INDEP requires a unitary- or lindblad-kind trajectory")
    O0 = as_matrix(O0, "observable")
    num = abs(complex(np.trace(O0 @ (traj.O_samples[-1] - O0))))
    o0_hs = hs_norm(O0)
    lam = _mean_speed(traj.gen_speed_hs, traj.grid)
    tqsl = _ratio("STATE_INDEP", num, o0_hs * lam, "||O(0)||_hs * mean speed")
    details = {
        "overlap_change": float(num),
        "o0_hs": o0_hs,
        "lambda_T": lam,
    }
    digest = _digest(O0, traj.O_samples[-1], traj.gen_speed_hs)
    return _report("STATE_INDEP", traj.grid.duration, tqsl, digest, details)


# ---------------------------------------------------------------------------
# battery charging-time bounds


def battery_bounds(
    HB: np.ndarray,
    HC: np.ndarray,
    rho: DensityState,
    grid: TimeGrid,
    hbar: float = 1.0,
    tol: float = DEFAULT_TOL,
) -> tuple[BoundReport, BoundReport]:
    """Charging-time bounds for a battery Hamiltonian HB driven by HB + HC.

    CT1 is the path-integral bound with observable HB and the spread of the
    total Hamiltonian; CT2 divides the stored-energy change by the smallest
    of the operator, Hilbert-Schmidt and trace norms of HB(0) (HB + HC).
    CT2 requires a pure initial state.
    """
    HB = as_matrix(HB, "battery hamiltonian")
    HC = as_matrix(HC, "charging hamiltonian")
    if HB.shape != HC.shape:
        raise ValidationError(f"dimension mismatch: {HB.shape} vs {HC.shape}")
    HT = HB + HC
    if not is_hermitian(HT, tol):
        raise ValidationError("total hamiltonian is not Hermitian within tolerance")
    traj = evolve_unitary_heisenberg(HB, HT, rho, grid, hbar=hbar, tol=tol)
    T = grid.duration

    delta_HT = float(np.sqrt(variance(HT, rho, tol)))
    if delta_HT <= tol:
        # rho is an eigenstate of the drive: nothing evolves.
        ct1 = _report(
            "BATTERY_CT1",
            T,
            0.0,
            _digest(traj.expect, delta_HT, hbar),
            {"delta_H_total": delta_HT, "integral": 0.0, "stationary": 1},
        )
    else:
        ct1 = _mt_integral_core("BATTERY_CT1", traj, delta_HT, hbar, EPS_VAR)

    if not rho.is_pure():
        raise ValidationError("BATTERY_CT2 requires a pure initial state")
    prod = HB @ HT
    norms = {"op": op_norm(prod), "hs": hs_norm(prod), "tr": tr_norm(prod)}
    num = abs(float(traj.expect[-1] - traj.expect[0]))
    tqsl2 = hbar / 2.0 * _ratio("BATTERY_CT2", num, min(norms.values()), "min norm of HB(0)(HB+HC)")
    details2 = {
        "expect0": float(traj.expect[0]),
        "expectT": float(traj.expect[-1]),
        **{f"hbht_{k}": v for k, v in norms.items()},
    }
    ct2 = _report("BATTERY_CT2", T, tqsl2, _digest(HB, HC, rho.matrix, T, hbar), details2)
    return ct1, ct2


# ---------------------------------------------------------------------------
# two-time correlations and commutators


def two_time_correlation(
    A0: np.ndarray,
    traj: ObservableTrajectory,
    rho: DensityState,
    tol: float = DEFAULT_TOL,
) -> CorrelationTrace:
    """C(t) = <A(t)A(0)> - <A(t)><A(0)> along the trajectory of A.

    Defined here for pure states only; C(t) is complex in general while
    C(0) equals the (real, nonnegative) variance of A(0).
    """
    if not rho.is_pure():
        raise ValidationError("two-time correlation requires a pure state")
    A0 = as_matrix(A0, "observable")
    if not is_hermitian(A0, tol):
        raise ValidationError("observable is not Hermitian within tolerance")
    if A0.shape[0] != traj.dim:
        raise ValidationError(f"dimension mismatch: {A0.shape[0]} vs {traj.dim}")
    first = np.einsum("tab,bc,ca->t", traj.O_samples, A0, rho.matrix)
    mean0 = float(np.trace(A0 @ rho.matrix).real)
    C = first - traj.expect * mean0
    c0 = complex(C[0])
    if abs(c0.imag) > max(tol, 1e-8) or c0.real < -max(tol, 1e-8):
        raise NumericError(f"C(0)={c0!r} is not a nonnegative variance within tolerance")
    return CorrelationTrace(grid=traj.grid, C_samples=C)


def corr_qsl(
    trace: CorrelationTrace,
    a0_op: float,
    speeds_op: np.ndarray,
    hbar: float = 1.0,
    kind: str = "closed",
) -> BoundReport:
    """Correlation-function bound:

    T_qsl = (hbar / 2) |C(T) - C(0)| / (||A(0)||_op * Lambda_T),

    where Lambda_T time-averages the operator-norm speed supplied by the
    caller: ||[H, A(t)]||_op for closed dynamics, ||L^dag[A(t)]||_op for open
    dynamics. |C(T) - C(0)| is the complex modulus.
    """
    if kind not in ("closed", "open"):
        raise ValidationError(f"unknown correlation kind {kind!r}")
    speeds_op = np.asarray(speeds_op, dtype=float)
    if speeds_op.shape != (trace.grid.steps + 1,):
        raise ValidationError("speed samples must match the correlation grid")
    bound_id = "CORR_CLOSED" if kind == "closed" else "CORR_OPEN"
    num = abs(complex(trace.C_samples[-1] - trace.C_samples[0]))
    lam = _mean_speed(speeds_op, trace.grid)
    tqsl = hbar / 2.0 * _ratio(bound_id, num, a0_op * lam, "||A(0)||_op * mean speed")
    details = {
        "corr_change": float(num),
        "a0_op": float(a0_op),
        "lambda_T_op": lam,
    }
    digest = _digest(trace.C_samples, a0_op, speeds_op, hbar)
    return _report(bound_id, trace.grid.duration, tqsl, digest, details)


def commutator_qsl(
    B0: np.ndarray,
    traj: ObservableTrajectory,
    rho: DensityState,
    hbar: float = 1.0,
    kind: str = "closed",
) -> BoundReport:
    """Commutator-growth bound for <O(t)> = tr([B(0), A(t)] rho):

    T_qsl = (hbar / 2) |<O(T)>| / (||B(0)||_op * Lambda_T).

    The observable pair is meant to commute at t = 0 (operators supported on
    different regions), so |<O(T)>| is the full change of the commutator
    expectation; its complex modulus is used.
    """
    if kind not in ("closed", "open"):
        raise ValidationError(f"unknown commutator kind {kind!r}")
    expected = "unitary" if kind == "closed" else "lindblad"
    if traj.kind != expected:
        raise ValidationError(f"COMM {kind} requires a {expected}-kind trajectory")
    if not rho.is_pure():
        raise ValidationError("commutator bound requires a pure state")
    B0 = as_matrix(B0, "observable")
    if B0.shape[0] != traj.dim:
        raise ValidationError(f"dimension mismatch: {B0.shape[0]} vs {traj.dim}")
    bound_id = "COMM_CLOSED" if kind == "closed" else "COMM_OPEN"

    comms = B0[None] @ traj.O_samples - traj.O_samples @ B0[None]
    expect_c = np.einsum("tab,ba->t", comms, rho.matrix)
    num = abs(complex(expect_c[-1]))
    # closed dynamics: gen_speed_op holds ||[H, A]||_op / hbar
    speeds = traj.gen_speed_op * (hbar if kind == "closed" else 1.0)
    lam = _mean_speed(speeds, traj.grid)
    b0_op = op_norm(B0)
    tqsl = hbar / 2.0 * _ratio(bound_id, num, b0_op * lam, "||B(0)||_op * mean speed")
    details = {
        "comm_expect_0": abs(complex(expect_c[0])),
        "comm_expect_T": float(num),
        "b0_op": b0_op,
        "lambda_T_op": lam,
    }
    digest = _digest(B0, traj.expect, traj.gen_speed_op, rho.matrix, hbar)
    return _report(bound_id, traj.grid.duration, tqsl, digest, details)


# ---------------------------------------------------------------------------
# auxiliary quantities and the rate auditor


def observable_distance(Ot: np.ndarray, O0: np.ndarray, rho: DensityState) -> float:
    """Normalized expectation distance |tr[(O(t) - O(0)) rho]| / (2 ||O(0)||_op)."""
    Ot = as_matrix(Ot, "O(t)")
    O0 = as_matrix(O0, "O(0)")
    denom = op_norm(O0)
    if denom <= 0.0:
        raise ValidationError("observable distance needs a nonzero reference observable")
    return abs(complex(np.trace((Ot - O0) @ rho.matrix))) / (2.0 * denom)


@dataclass(frozen=True)
class RateAuditReport:
    """Max pointwise violation (LHS - RHS) per applicable rate inequality."""

    kind: str
    violations: dict

    @property
    def max_violation(self) -> float:
        return max(self.violations.values()) if self.violations else float("-inf")


def rate_audit(
    traj: ObservableTrajectory,
    system,
    _flip_robertson_sign: bool = False,
) -> RateAuditReport:
    """Check the applicable rate inequalities along a trajectory.

    Interior grid points only; the left side |d<O>/dt| comes from central
    differences of the sampled expectations. For unitary trajectories the
    Robertson bound 2 dO dH / hbar and the Hoelder bound 2 ||H O(t)||_op / hbar
    apply; for Lindblad trajectories the Cauchy-Schwarz bound
    sqrt(tr rho^2) ||L^dag[O(t)]||_hs applies.

    ``_flip_robertson_sign`` is a test-only hook that negates the Robertson
    right-hand side so auditor mutations are detectable.
    """
    h = traj.grid.h
    lhs = np.abs(traj.expect[2:] - traj.expect[:-2]) / (2.0 * h)
    rho = system.initial_state
    hbar = system.hbar
    violations: dict[str, float] = {}
    if traj.kind == "unitary":
        delta_H = float(np.sqrt(variance(system.hamiltonian, rho)))
        rhs_rob = 2.0 / hbar * traj.stddev[1:-1] * delta_H
        if _flip_robertson_sign:
            rhs_rob = -rhs_rob
        violations["RATE_ROBERTSON"] = float((lhs - rhs_rob).max())
        prods = system.hamiltonian[None] @ traj.O_samples[1:-1]
        rhs_hold = 2.0 / hbar * np.linalg.svd(prods, compute_uv=False)[:, 0]
        violations["RATE_HOLDER_OP"] = float((lhs - rhs_hold).max())
    elif traj.kind == "lindblad":
        rhs_cs = np.sqrt(rho.purity) * traj.gen_speed_hs[1:-1]
        violations["RATE_CS_HS"] = float((lhs - rhs_cs).max())
    else:
        raise ValidationError("rate audit applies to unitary or lindblad trajectories")
    return RateAuditReport(kind=traj.kind, violations=violations)
