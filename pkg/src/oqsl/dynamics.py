"""Heisenberg-picture observable trajectories and Schrodinger-picture state
trajectories under unitary, Lindblad-adjoint, and Kraus dynamics.

Unitary trajectories are exact (propagator per grid point, evaluated in the
Hamiltonian eigenbasis); Lindblad trajectories use fixed-step classical RK4.
Kraus trajectories are evaluated directly from the operator family, with
operator time-derivatives taken by finite differences on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    DensityState,
    NumericError,
    ValidationError,
    as_matrix,
    commutator,
    is_hermitian,
    mat_exp,
    require_finite,
)

INSTABILITY_LIMIT = 1e12


# ---------------------------------------------------------------------------
# time grid


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of ``steps`` cells on [t0, t1] (steps + 1 sample points)."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValidationError("grid endpoints must be finite")
        if self.t1 <= self.t0:
            raise ValidationError("grid requires t1 > t0")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValidationError("grid requires an integer steps >= 2")

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / self.steps

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.steps + 1)


# ---------------------------------------------------------------------------
# rates and generators


@dataclass(frozen=True)
class RateTable:
    """Piecewise-linear nonnegative rate gamma(t) tabulated on increasing times."""

    times: np.ndarray = field(compare=False)
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or v.shape != t.shape or t.size < 2:
            raise ValidationError("rate table needs matching 1-D times/values, length >= 2")
        if not (np.isfinite(t).all() and np.isfinite(v).all()):
            raise ValidationError("rate table entries must be finite")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("rate table times must be strictly increasing")
        if v.min() < 0:
            raise ValidationError(f"negative rate {v.min()!r} in rate table")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def at(self, t) -> np.ndarray:
        return np.interp(t, self.times, self.values)


Rate = Union[float, RateTable]


def rate_at(rate: Rate, t) -> np.ndarray:
    """Evaluate a constant or tabulated rate at scalar or array times."""
    if isinstance(rate, RateTable):
        return rate.at(t)
    return np.full_like(np.asarray(t, dtype=float), float(rate))


@dataclass(frozen=True)
class UnitaryGenerator:
    """Closed dynamics generated by a time-independent Hermitian Hamiltonian."""

    H: np.ndarray = field(compare=False)
    hbar: float = 1.0

    def __post_init__(self):
        H = as_matrix(self.H, "hamiltonian")
        require_finite(H, "hamiltonian")
        if not is_hermitian(H):
            raise ValidationError("hamiltonian is not Hermitian within tolerance")
        if self.hbar <= 0:
            raise ValidationError("hbar must be positive")
        object.__setattr__(self, "H", H)

    @property
    def dim(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class LindbladGenerator:
    """Markovian open dynamics: Hamiltonian plus jump operators with rates."""

    H: np.ndarray = field(compare=False)
    jumps: tuple = ()
    hbar: float = 1.0

    def __post_init__(self):
        H = as_matrix(self.H, "hamiltonian")
        require_finite(H, "hamiltonian")
        if not is_hermitian(H):
            raise ValidationError("hamiltonian is not Hermitian within tolerance")
        if self.hbar <= 0:
            raise ValidationError("hbar must be positive")
        jumps = []
        for k, (L, rate) in enumerate(self.jumps):
            L = as_matrix(L, f"jump operator {k}")
            require_finite(L, f"jump operator {k}")
            if L.shape != H.shape:
                raise ValidationError(f"jump operator {k} has shape {L.shape}, expected {H.shape}")
            if not isinstance(rate, RateTable):
                rate = float(rate)
                if not np.isfinite(rate) or rate < 0:
                    raise ValidationError(f"negative rate {rate!r} for jump operator {k}")
            jumps.append((L, rate))
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "jumps", tuple(jumps))

    @property
    def dim(self) -> int:
        return self.H.shape[0]


# ---------------------------------------------------------------------------
# Kraus families


class DephasingKraus:
    """Closed-form qubit dephasing family:

    K0(t) = sqrt((1 + e^{-gamma t})/2) * I,  K1(t) = sqrt((1 - e^{-gamma t})/2) * sigma_z.
    """

    def __init__(self, gamma: float):
        gamma = float(gamma)
        if not np.isfinite(gamma) or gamma < 0:
            raise ValidationError("dephasing strength must be a nonnegative real")
        self.gamma = gamma
        self.dim = 2
        self.n_ops = 2

    def operators(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValidationError("dephasing family is defined for t >= 0")
        e = np.exp(-self.gamma * t)
        a = np.sqrt((1.0 + e) / 2.0)
        b = np.sqrt((1.0 - e) / 2.0)
        k0 = np.diag([a, a]).astype(complex)
        k1 = np.diag([b, -b]).astype(complex)
        return np.stack([k0, k1])


class TabulatedKraus:
    """Kraus operators given as matrices on a fixed time grid.

    Evaluation is only defined at the tabulated times; evolution grids must
    therefore line up with the table.
    """

    def __init__(self, times, ops):
        t = np.asarray(times, dtype=float)
        K = np.asarray(ops, dtype=complex)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise ValidationError("tabulated Kraus times must be strictly increasing, length >= 2")
        if K.ndim != 4 or K.shape[0] != t.size or K.shape[2] != K.shape[3]:
            raise ValidationError(
                "tabulated Kraus operators must have shape (n_times, n_ops, d, d)"
            )
        require_finite(K.reshape(-1, K.shape[-1]), "tabulated Kraus operators")
        self.times = t
        self.ops = K
        self.dim = K.shape[2]
        self.n_ops = K.shape[1]

    def operators(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-12 * max(1.0, abs(t)):
            raise ValidationError(f"time {t!r} is not on the tabulated Kraus grid")
        return self.ops[i]


class FunctionKraus:
    """Kraus family given by a callable t -> sequence of (d, d) matrices."""

    def __init__(self, fn: Callable[[float], np.ndarray], dim: int, n_ops: int):
        self.fn = fn
        self.dim = int(dim)
        self.n_ops = int(n_ops)

    def operators(self, t: float) -> np.ndarray:
        K = np.asarray(self.fn(t), dtype=complex)
        if K.shape != (self.n_ops, self.dim, self.dim):
            raise ValidationError(f"Kraus callable returned shape {K.shape}")
        return K


KrausFamily = Union[DephasingKraus, TabulatedKraus, FunctionKraus]


@dataclass(frozen=True)
class KrausGenerator:
    """Dynamics given by a completely positive map via its Kraus family."""

    family: KrausFamily

    @property
    def dim(self) -> int:
        return self.family.dim


GeneratorSpec = Union[UnitaryGenerator, LindbladGenerator, KrausGenerator]


def kraus_completeness_defect(family: KrausFamily, t: float) -> float:
    """Max-entry deviation of sum_i K_i^dag K_i from the identity at time t."""
    K = family.operators(t)
    acc = np.einsum("iab,iac->bc", K.conj(), K)
    return float(np.abs(acc - np.eye(family.dim)).max())


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class ObservableTrajectory:
    """Samples of a Heisenberg-picture observable along a time grid.

    ``gen_speed_hs`` / ``gen_speed_op`` hold the Hilbert-Schmidt and operator
    norms of the generator applied to O(t) (for Kraus dynamics: the summed
    norms of K_i^dag(t) O(0) dK_i/dt).
    """

    kind: str
    grid: TimeGrid
    O_samples: np.ndarray = field(compare=False)
    expect: np.ndarray = field(compare=False)
    stddev: np.ndarray = field(compare=False)
    gen_speed_hs: np.ndarray = field(compare=False)
    gen_speed_op: np.ndarray = field(compare=False)
    hbar: float = 1.0

    @property
    def dim(self) -> int:
        return self.O_samples.shape[1]

    def prefix(self, k: int) -> "ObservableTrajectory":
        """Restriction to the first k grid cells (k >= 2)."""
        if not 2 <= k <= self.grid.steps:
            raise ValidationError(f"prefix length {k} outside [2, {self.grid.steps}]")
        t = self.grid.times()
        sub = TimeGrid(self.grid.t0, float(t[k]), k)
        return ObservableTrajectory(
            kind=self.kind,
            grid=sub,
            O_samples=self.O_samples[: k + 1],
            expect=self.expect[: k + 1],
            stddev=self.stddev[: k + 1],
            gen_speed_hs=self.gen_speed_hs[: k + 1],
            gen_speed_op=self.gen_speed_op[: k + 1],
            hbar=self.hbar,
        )


def _batch_expect(Os: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.einsum("tab,ba->t", Os, rho).real


def _batch_stddev(Os: np.ndarray, rho: np.ndarray, tol: float) -> np.ndarray:
    mean = _batch_expect(Os, rho)
    second = np.einsum("tab,tbc,ca->t", Os, Os, rho).real
    var = second - mean * mean
    if var.min() < -tol:
        raise NumericError(f"variance {var.min():.3e} below -tolerance along trajectory")
    return np.sqrt(np.clip(var, 0.0, None))


def _batch_hs(Ms: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("tab,tab->t", Ms.conj(), Ms).real)


def _batch_op(Ms: np.ndarray) -> np.ndarray:
    return np.linalg.svd(Ms, compute_uv=False)[:, 0]


def _check_state(rho: DensityState, dim: int) -> None:
    if rho.matrix.shape[0] != dim:
        raise ValidationError(f"state dimension {rho.matrix.shape[0]} != {dim}")


# ---------------------------------------------------------------------------
# unitary dynamics


def unitary_propagator(H: np.ndarray, t: float, hbar: float = 1.0) -> np.ndarray:
    """U(t) = exp(-i H t / hbar) for a Hermitian Hamiltonian."""
    H = as_matrix(H, "hamiltonian")
    require_finite(H, "hamiltonian")
    if not is_hermitian(H):
        raise ValidationError("hamiltonian is not Hermitian within tolerance")
    if hbar <= 0:
        raise ValidationError("hbar must be positive")
    return mat_exp(-1j * float(t) / hbar * H)


def evolve_unitary_heisenberg(
    O0: np.ndarray,
    H: np.ndarray,
    rho: DensityState,
    grid: TimeGrid,
    hbar: float = 1.0,
    tol: float = DEFAULT_TOL,
) -> ObservableTrajectory:
    """Exact O(t) = U^dag(t) O(0) U(t) per grid point, in the eigenbasis of H."""
    O0 = as_matrix(O0, "observable")
    H = as_matrix(H, "hamiltonian")
    require_finite(O0, "observable")
    require_finite(H, "hamiltonian")
    if O0.shape != H.shape:
        raise ValidationError(f"dimension mismatch: {O0.shape} vs {H.shape}")
    if not is_hermitian(O0, tol):
        raise ValidationError("observable is not Hermitian within tolerance")
    if not is_hermitian(H, tol):
        raise ValidationError("hamiltonian is not Hermitian within tolerance")
    if hbar <= 0:
        raise ValidationError("hbar must be positive")
    _check_state(rho, O0.shape[0])

    w, V = np.linalg.eigh(H)
    Ot = V.conj().T @ O0 @ V
    gaps = (w[:, None] - w[None, :]) / hbar
    times = grid.times()
    phases = np.exp(1j * times[:, None, None] * gaps[None, :, :])
    Os = V @ (phases * Ot[None, :, :]) @ V.conj().T

    comms = H[None] @ Os - Os @ H[None]
    return ObservableTrajectory(
        kind="unitary",
        grid=grid,
        O_samples=Os,
        expect=_batch_expect(Os, rho.matrix),
        stddev=_batch_stddev(Os, rho.matrix, tol),
        gen_speed_hs=_batch_hs(comms) / hbar,
        gen_speed_op=_batch_op(comms) / hbar,
        hbar=hbar,
    )


# ---------------------------------------------------------------------------
# Lindblad dynamics


def _jump_terms(gen: LindbladGenerator):
    out = []
    for L, rate in gen.jumps:
        out.append((L, L.conj().T, L.conj().T @ L, rate))
    return out


def lindblad_adjoint(gen: LindbladGenerator, O: np.ndarray, t: float = 0.0) -> np.ndarray:
    """Adjoint generator acting on an observable:

    (i/hbar)[H, O] + sum_k gamma_k(t) (L_k^dag O L_k - (1/2){L_k^dag L_k, O}).
    """
    O = as_matrix(O, "observable")
    if O.shape != gen.H.shape:
        raise ValidationError(f"dimension mismatch: {O.shape} vs {gen.H.shape}")
    out = (1j / gen.hbar) * (gen.H @ O - O @ gen.H)
    for L, Ld, LdL, rate in _jump_terms(gen):
        g = float(rate_at(rate, t))
        if g < 0:
            raise ValidationError(f"negative rate {g!r} at t={t!r}")
        out = out + g * (Ld @ O @ L - 0.5 * (LdL @ O + O @ LdL))
    return out


def lindblad_apply(gen: LindbladGenerator, rho: np.ndarray, t: float = 0.0) -> np.ndarray:
    """Schrodinger-picture generator acting on a state:

    -(i/hbar)[H, rho] + sum_k gamma_k(t) (L_k rho L_k^dag - (1/2){L_k^dag L_k, rho}).
    """
    rho = as_matrix(rho, "state")
    if rho.shape != gen.H.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {gen.H.shape}")
    out = (-1j / gen.hbar) * (gen.H @ rho - rho @ gen.H)
    for L, Ld, LdL, rate in _jump_terms(gen):
        g = float(rate_at(rate, t))
        if g < 0:
            raise ValidationError(f"negative rate {g!r} at t={t!r}")
        out = out + g * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def _rk4(rhs, y0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Classical fixed-step RK4; returns samples at every grid time."""
    n = times.size - 1
    h = times[1] - times[0]
    out = np.empty((n + 1,) + y0.shape, dtype=complex)
    out[0] = y0
    y = y0
    for i in range(n):
        t = times[i]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1)
        k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if np.abs(y).max() > INSTABILITY_LIMIT:
            raise NumericError(
                "integration became unstable; reduce the step size (increase steps)"
            )
        out[i + 1] = y
    return out


def _adjoint_speeds(gen: LindbladGenerator, Os: np.ndarray, times: np.ndarray):
    """Batched ||L^dag[O(t)]|| along the samples (Hilbert-Schmidt and operator)."""
    rhs = (1j / gen.hbar) * (gen.H[None] @ Os - Os @ gen.H[None])
    for L, Ld, LdL, rate in _jump_terms(gen):
        g = np.asarray(rate_at(rate, times), dtype=float)[:, None, None]
        rhs = rhs + g * (Ld[None] @ Os @ L[None] - 0.5 * (LdL[None] @ Os + Os @ LdL[None]))
    return _batch_hs(rhs), _batch_op(rhs)


def _check_rates_on_grid(gen: LindbladGenerator, times: np.ndarray) -> None:
    for k, (_, rate) in enumerate(gen.jumps):
        g = np.asarray(rate_at(rate, times), dtype=float)
        if g.min() < 0:
            raise ValidationError(f"jump operator {k} has negative rate on the grid")


def evolve_lindblad_heisenberg(
    O0: np.ndarray,
    gen: LindbladGenerator,
    rho: DensityState,
    grid: TimeGrid,
    tol: float = DEFAULT_TOL,
) -> ObservableTrajectory:
    """RK4 integration of dO/dt = (i/hbar)[H, O] + D[O] on the grid."""
    O0 = as_matrix(O0, "observable")
    require_finite(O0, "observable")
    if not is_hermitian(O0, tol):
        raise ValidationError("observable is not Hermitian within tolerance")
    if O0.shape != gen.H.shape:
        raise ValidationError(f"dimension mismatch: {O0.shape} vs {gen.H.shape}")
    _check_state(rho, gen.dim)
    times = grid.times()
    _check_rates_on_grid(gen, times)

    terms = _jump_terms(gen)
    H, hbar = gen.H, gen.hbar

    def rhs(t, O):
        out = (1j / hbar) * (H @ O - O @ H)
        for L, Ld, LdL, rate in terms:
            g = float(rate_at(rate, t))
            out = out + g * (Ld @ O @ L - 0.5 * (LdL @ O + O @ LdL))
        return out

    Os = _rk4(rhs, O0, times)
    speed_hs, speed_op = _adjoint_speeds(gen, Os, times)
    return ObservableTrajectory(
        kind="lindblad",
        grid=grid,
        O_samples=Os,
        expect=_batch_expect(Os, rho.matrix),
        stddev=_batch_stddev(Os, rho.matrix, tol),
        gen_speed_hs=speed_hs,
        gen_speed_op=speed_op,
        hbar=hbar,
    )


def evolve_lindblad_schrodinger(
    rho0: DensityState,
    gen: LindbladGenerator,
    grid: TimeGrid,
    tol: float = DEFAULT_TOL,
) -> list[DensityState]:
    """RK4 integration of the state-picture master equation along the grid.

    Trace preservation is verified to 1e-8; positivity loss beyond tolerance
    is reported as a warning rather than an error.
    """
    _check_state(rho0, gen.dim)
    times = grid.times()
    _check_rates_on_grid(gen, times)

    terms = _jump_terms(gen)
    H, hbar = gen.H, gen.hbar

    def rhs(t, r):
        out = (-1j / hbar) * (H @ r - r @ H)
        for L, Ld, LdL, rate in terms:
            g = float(rate_at(rate, t))
            out = out + g * (L @ r @ Ld - 0.5 * (LdL @ r + r @ LdL))
        return out

    samples = _rk4(rhs, rho0.matrix, times)
    traces = np.einsum("taa->t", samples).real
    if np.abs(traces - 1.0).max() > 1e-8:
        raise NumericError("trace not preserved to 1e-8; reduce the step size")
    return [DensityState.from_matrix(r, tol=tol, on_indefinite="warn") for r in samples]


# ---------------------------------------------------------------------------
# Kraus dynamics


def kraus_derivative(
    family: KrausFamily,
    i: int,
    t: float,
    h: float,
    t_min: float = 0.0,
    t_max: float = np.inf,
) -> np.ndarray:
    """Finite-difference dK_i/dt: central in the interior, one-sided at the
    domain endpoints."""
    if h <= 0:
        raise ValidationError("finite-difference step h must be positive")
    if t - h >= t_min and t + h <= t_max:
        return (family.operators(t + h)[i] - family.operators(t - h)[i]) / (2.0 * h)
    if t - h < t_min:
        return (family.operators(t + h)[i] - family.operators(t)[i]) / h
    return (family.operators(t)[i] - family.operators(t - h)[i]) / h


def evolve_kraus_heisenberg(
    O0: np.ndarray,
    gen: KrausGenerator,
    rho: DensityState,
    grid: TimeGrid,
    tol: float = DEFAULT_TOL,
) -> ObservableTrajectory:
    """Direct evaluation of O(t) = sum_i K_i^dag(t) O(0) K_i(t) per grid point.

    Also records the summed speeds sum_i ||K_i^dag(t) O(0) dK_i/dt|| used by
    the Kraus-map speed-limit bound.
    """
    O0 = as_matrix(O0, "observable")
    require_finite(O0, "observable")
    if not is_hermitian(O0, tol):
        raise ValidationError("observable is not Hermitian within tolerance")
    family = gen.family
    if O0.shape[0] != family.dim:
        raise ValidationError(f"dimension mismatch: {O0.shape[0]} vs {family.dim}")
    _check_state(rho, family.dim)

    times = grid.times()
    n = times.size
    d = family.dim
    Os = np.empty((n, d, d), dtype=complex)
    speed_hs = np.empty(n)
    speed_op = np.empty(n)
    for j, t in enumerate(times):
        K = family.operators(float(t))
        defect = float(np.abs(np.einsum("iab,iac->bc", K.conj(), K) - np.eye(d)).max())
        if defect > max(tol, 1e-8):
            raise ValidationError(
                f"Kraus completeness violated at t={t!r} (defect {defect:.3e})"
            )
        Os[j] = np.einsum("iba,bc,icd->ad", K.conj(), O0, K)
        hs_total = 0.0
        op_total = 0.0
        for i in range(family.n_ops):
            dK = kraus_derivative(family, i, float(t), grid.h, t_min=grid.t0, t_max=grid.t1)
            M = K[i].conj().T @ O0 @ dK
            hs_total += float(np.linalg.norm(M))
            op_total += float(np.linalg.svd(M, compute_uv=False)[0])
        speed_hs[j] = hs_total
        speed_op[j] = op_total

    return ObservableTrajectory(
        kind="kraus",
        grid=grid,
        O_samples=Os,
        expect=_batch_expect(Os, rho.matrix),
        stddev=_batch_stddev(Os, rho.matrix, tol),
        gen_speed_hs=speed_hs,
        gen_speed_op=speed_op,
        hbar=1.0,
    )


# ---------------------------------------------------------------------------
# convenience constructors


def dephasing_generator(gamma: float, hbar: float = 1.0) -> LindbladGenerator:
    """Rate-gamma pure dephasing of a qubit: jump sigma_z at rate gamma/2."""
    from .linalg import sigma_z

    if gamma < 0:
        raise ValidationError("dephasing strength must be nonnegative")
    return LindbladGenerator(
        H=np.zeros((2, 2), dtype=complex),
        jumps=((sigma_z, gamma / 2.0),),
        hbar=hbar,
    )
