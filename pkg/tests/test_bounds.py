import numpy as np
import pytest

from oqsl.bounds import (
    BOUND_IDS,
    CorrelationTrace,
    battery_bounds,
    commutator_qsl,
    corr_qsl,
    observable_distance,
    oqsl_generator_hs,
    oqsl_kraus,
    oqsl_min_norm,
    oqsl_mt_integral,
    oqsl_purity_hs,
    oqsl_self_inverse,
    oqsl_state_independent,
    qsl_delcampo,
    rate_audit,
    state_qsl_projector,
    two_time_correlation,
)
from oqsl.dynamics import (
    DephasingKraus,
    FunctionKraus,
    KrausGenerator,
    LindbladGenerator,
    TimeGrid,
    dephasing_generator,
    evolve_kraus_heisenberg,
    evolve_lindblad_heisenberg,
    evolve_lindblad_schrodinger,
    evolve_unitary_heisenberg,
    lindblad_apply,
)
from oqsl.linalg import (
    DensityState,
    NumericError,
    ValidationError,
    hs_norm,
    identity,
    op_norm,
    sigma_x,
    sigma_y,
    sigma_z,
    tr_norm,
    variance,
)
from oqsl.sysdl import SystemSpec

import oracles

PLUS = DensityState.pure([1.0, 1.0])
GROUND = DensityState.pure([1.0, 0.0])
T_HALF_PI = np.pi / 2.0


def tight_trajectory(steps=4000):
    grid = TimeGrid(0.0, T_HALF_PI, steps)
    return evolve_unitary_heisenberg(sigma_x, sigma_z, PLUS, grid)


def make_system(H, rho, kind="unitary", jumps=()):
    return SystemSpec(
        dim=H.shape[0],
        hbar=1.0,
        kind=kind,
        hamiltonian=H,
        initial_state=rho,
        observables={},
        jumps=tuple(jumps),
        kraus=None,
        metadata={},
    )


# ---------------------------------------------------------------------------
# path-integral bound


def test_mt_integral_tight_qubit():
    rep = oqsl_mt_integral(tight_trajectory(), 1.0)
    assert rep.T_qsl == pytest.approx(T_HALF_PI, abs=1e-4)
    assert rep.valid


def test_mt_integral_conserved_observable():
    grid = TimeGrid(0.0, 2.0, 200)
    traj = evolve_unitary_heisenberg(sigma_z, sigma_z, PLUS, grid)
    assert oqsl_mt_integral(traj, 1.0).T_qsl == 0.0


def test_mt_integral_validity_random_qubits(rng):
    for _ in range(20):
        H = oracles.random_hermitian(rng, 2)
        H = H / op_norm(H)
        O = oracles.random_hermitian(rng, 2)
        rho = DensityState.pure(oracles.random_ket(rng, 2))
        T = float(rng.uniform(0.3, 1.2))
        traj = evolve_unitary_heisenberg(O, H, rho, TimeGrid(0.0, T, 1500))
        dH = float(np.sqrt(variance(H, rho)))
        if dH < 1e-9:
            continue
        rep = oqsl_mt_integral(traj, dH)
        assert rep.T_qsl <= T + 1e-6


def test_mt_integral_rejects_bad_energy_spread():
    with pytest.raises(ValidationError):
        oqsl_mt_integral(tight_trajectory(100), 0.0)


def test_mt_integral_requires_unitary_kind():
    traj = evolve_lindblad_heisenberg(
        sigma_x, dephasing_generator(1.0), PLUS, TimeGrid(0.0, 1.0, 100)
    )
    with pytest.raises(ValidationError):
        oqsl_mt_integral(traj, 1.0)


def test_mt_integral_counts_skipped_cells():
    rep = oqsl_mt_integral(tight_trajectory(100), 1.0)
    assert rep.details["cells"] == 100
    assert rep.details["skipped_cells"] == 0


# ---------------------------------------------------------------------------
# arcsine bound for self-inverse observables


def test_self_inverse_tight_value():
    rep = oqsl_self_inverse(1.0, -1.0, 1.0, T_HALF_PI)
    assert rep.T_qsl == pytest.approx(T_HALF_PI, abs=1e-12)
    assert rep.valid


def test_self_inverse_no_change():
    assert oqsl_self_inverse(0.4, 0.4, 1.0, 1.0).T_qsl == 0.0


def test_self_inverse_matches_integral_when_monotone():
    # <O(t)> = cos 2t decreases monotonically over the whole window
    for T, steps in ((T_HALF_PI, 4000), (0.6, 2000)):
        traj = evolve_unitary_heisenberg(sigma_x, sigma_z, PLUS, TimeGrid(0.0, T, steps))
        mt = oqsl_mt_integral(traj, 1.0).T_qsl
        si = oqsl_self_inverse(
            float(traj.expect[0]), float(traj.expect[-1]), 1.0, T
        ).T_qsl
        assert abs(mt - si) <= 2e-4


def test_self_inverse_rejects_out_of_range():
    with pytest.raises(ValidationError):
        oqsl_self_inverse(1.5, 0.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# projector / state bound


def test_state_projector_orthogonal():
    assert state_qsl_projector(1.0, 0.0, 1.0, T_HALF_PI).T_qsl == pytest.approx(
        T_HALF_PI, abs=1e-15
    )


def test_state_projector_no_change():
    assert state_qsl_projector(0.3, 0.3, 1.0, 1.0).T_qsl == 0.0


def test_state_projector_half():
    assert state_qsl_projector(1.0, 0.5, 1.0, 1.0).T_qsl == pytest.approx(
        np.pi / 4.0, abs=1e-15
    )


@pytest.mark.parametrize("pT", [0.0, 0.25, 0.5, 1.0])
def test_state_projector_arccos_reduction_exact(pT):
    rep = state_qsl_projector(1.0, pT, 1.0, 2.0)
    assert rep.T_qsl == float(np.arccos(np.sqrt(pT)))


def test_state_projector_rejects_bad_probability():
    with pytest.raises(ValidationError):
        state_qsl_projector(1.2, 0.0, 1.0, 1.0)
    with pytest.raises(ValidationError):
        state_qsl_projector(0.5, -0.1, 1.0, 1.0)


# ---------------------------------------------------------------------------
# purity-weighted Hilbert-Schmidt bound


def test_purity_hs_tight_example():
    rep = oqsl_purity_hs(1.0, -1.0, PLUS, hs_norm(sigma_x @ sigma_z), T_HALF_PI)
    assert rep.T_qsl == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)
    assert rep.valid


def test_purity_hs_no_change():
    assert oqsl_purity_hs(0.7, 0.7, PLUS, 1.0, 1.0).T_qsl == 0.0


def test_purity_hs_mixed_state_scaling():
    mixed = DensityState.maximally_mixed(2)
    pure_val = oqsl_purity_hs(0.0, 1.0, PLUS, np.sqrt(2.0), 1.0).T_qsl
    mixed_val = oqsl_purity_hs(0.0, 1.0, mixed, np.sqrt(2.0), 1.0).T_qsl
    assert mixed_val == pytest.approx(np.sqrt(2.0) * pure_val, abs=1e-12)


def test_purity_hs_zero_norm_inconsistency():
    with pytest.raises(NumericError):
        oqsl_purity_hs(0.0, 1.0, PLUS, 0.0, 1.0)


# ---------------------------------------------------------------------------
# minimum-norm bound


def test_min_norm_tight_example():
    prod = sigma_x @ sigma_z
    rep = oqsl_min_norm(1.0, -1.0, op_norm(prod), tr_norm(prod), T_HALF_PI)
    assert rep.T_qsl == pytest.approx(1.0, abs=1e-12)
    assert rep.valid


def test_min_norm_no_change():
    assert oqsl_min_norm(0.2, 0.2, 1.0, 2.0, 1.0).T_qsl == 0.0


def test_min_norm_dominates_purity_hs_when_op_smaller(rng):
    for _ in range(10):
        H = oracles.random_hermitian(rng, 3)
        O = oracles.random_hermitian(rng, 3)
        rho = DensityState.pure(oracles.random_ket(rng, 3))
        prod = O @ H
        if op_norm(prod) >= hs_norm(prod):
            continue
        a = oqsl_min_norm(0.0, 0.5, op_norm(prod), tr_norm(prod), 1.0).T_qsl
        b = oqsl_purity_hs(0.0, 0.5, rho, hs_norm(prod), 1.0).T_qsl
        assert a >= b - 1e-12


def test_min_norm_zero_norms_inconsistency():
    with pytest.raises(NumericError):
        oqsl_min_norm(0.0, 1.0, 0.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# generator-speed bound


@pytest.mark.parametrize("T", [0.4, 0.9, T_HALF_PI])
def test_generator_hs_dephasing_closed_form(T):
    traj = evolve_lindblad_heisenberg(
        sigma_x, dephasing_generator(1.0), PLUS, TimeGrid(0.0, T, 2000)
    )
    rep = oqsl_generator_hs(traj, PLUS)
    assert rep.T_qsl == pytest.approx(T / np.sqrt(2.0), abs=1e-6)
    assert rep.valid


def test_generator_hs_stationary():
    rho = DensityState.from_matrix(np.diag([0.7, 0.3]).astype(complex))
    traj = evolve_lindblad_heisenberg(
        sigma_z, dephasing_generator(1.0), rho, TimeGrid(0.0, 1.0, 100)
    )
    assert oqsl_generator_hs(traj, rho).T_qsl == 0.0


def test_generator_hs_validity_random_lindblad(rng):
    for _ in range(20):
        dim = int(rng.choice([2, 3]))
        H = oracles.random_hermitian(rng, dim)
        H = H / op_norm(H)
        jumps = tuple(
            (oracles.random_matrix(rng, dim, 0.5), float(rng.uniform(0, 1)))
            for _ in range(2)
        )
        gen = LindbladGenerator(H=H, jumps=jumps)
        O = oracles.random_hermitian(rng, dim)
        rho = DensityState.pure(oracles.random_ket(rng, dim))
        T = float(rng.uniform(0.3, 1.0))
        traj = evolve_lindblad_heisenberg(O, gen, rho, TimeGrid(0.0, T, 800))
        assert oqsl_generator_hs(traj, rho).T_qsl <= T + 1e-6


def test_generator_hs_works_for_unitary_kind():
    traj = tight_trajectory(1000)
    rep = oqsl_generator_hs(traj, PLUS)
    assert 0.0 < rep.T_qsl <= T_HALF_PI + 1e-6


def test_generator_hs_rejects_kraus_kind():
    traj = evolve_kraus_heisenberg(
        sigma_x, KrausGenerator(DephasingKraus(1.0)), PLUS, TimeGrid(0.0, 1.0, 100)
    )
    with pytest.raises(ValidationError):
        oqsl_generator_hs(traj, PLUS)


# ---------------------------------------------------------------------------
# relative-purity state bound


def dephasing_delcampo(T, steps=2000, gamma=1.0):
    gen = dephasing_generator(gamma)
    grid = TimeGrid(0.0, T, steps)
    states = evolve_lindblad_schrodinger(PLUS, gen, grid)
    l2 = hs_norm(lindblad_apply(gen, PLUS.matrix, 0.0)) ** 2
    return qsl_delcampo(PLUS, states[-1], l2, T)


@pytest.mark.parametrize("T", [0.4, 0.9, T_HALF_PI])
def test_delcampo_dephasing_closed_form(T):
    rep = dephasing_delcampo(T)
    assert rep.T_qsl == pytest.approx((1.0 - np.exp(-T)) / np.sqrt(2.0), abs=1e-6)
    assert rep.details["cos_theta"] == pytest.approx((1.0 + np.exp(-T)) / 2.0, abs=1e-8)


def test_delcampo_same_state():
    assert qsl_delcampo(PLUS, PLUS, 0.5, 1.0).T_qsl == 0.0


def test_delcampo_below_generator_bound():
    for T in (0.2, 0.8, T_HALF_PI):
        traj = evolve_lindblad_heisenberg(
            sigma_x, dephasing_generator(1.0), PLUS, TimeGrid(0.0, T, 1000)
        )
        assert dephasing_delcampo(T, 1000).T_qsl <= oqsl_generator_hs(traj, PLUS).T_qsl


def test_delcampo_rejects_zero_speed_with_change():
    other = DensityState.pure([1.0, 0.0])
    with pytest.raises(ValidationError):
        qsl_delcampo(PLUS, other, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Kraus-map bound


def test_kraus_bound_validity_across_horizons():
    gen = KrausGenerator(DephasingKraus(1.0))
    for T in (0.3, 0.8, 1.3, T_HALF_PI):
        traj = evolve_kraus_heisenberg(sigma_x, gen, PLUS, TimeGrid(0.0, T, 600))
        rep = oqsl_kraus(traj, PLUS)
        assert rep.T_qsl <= T + 1e-5


def test_kraus_bound_constant_family_zero():
    fam = FunctionKraus(
        lambda t: [np.sqrt(0.5) * identity(2), np.sqrt(0.5) * sigma_z], dim=2, n_ops=2
    )
    traj = evolve_kraus_heisenberg(sigma_x, KrausGenerator(fam), PLUS, TimeGrid(0.0, 1.0, 100))
    rep = oqsl_kraus(traj, PLUS)
    assert rep.T_qsl == 0.0
    assert rep.details["lambda_T"] == pytest.approx(0.0, abs=1e-15)


def test_kraus_bound_single_unitary_family():
    fam = FunctionKraus(
        lambda t: [oracles.expm_hermitian_oracle(sigma_z, -1j * t)], dim=2, n_ops=1
    )
    T = 1.0
    traj = evolve_kraus_heisenberg(sigma_x, KrausGenerator(fam), PLUS, TimeGrid(0.0, T, 400))
    assert oqsl_kraus(traj, PLUS).T_qsl <= T + 1e-6


def test_kraus_bound_rejects_other_kinds():
    with pytest.raises(ValidationError):
        oqsl_kraus(tight_trajectory(100), PLUS)


# ---------------------------------------------------------------------------
# state-independent bound


def test_state_independent_dephasing_saturates():
    T = 1.1
    traj = evolve_lindblad_heisenberg(
        sigma_x, dephasing_generator(1.0), PLUS, TimeGrid(0.0, T, 2000)
    )
    rep = oqsl_state_independent(sigma_x, traj)
    assert rep.T_qsl == pytest.approx(T, abs=1e-5)
    assert rep.T_qsl <= T + 1e-6


def test_state_independent_conserved():
    traj = evolve_unitary_heisenberg(sigma_z, sigma_z, PLUS, TimeGrid(0.0, 1.0, 100))
    assert oqsl_state_independent(sigma_z, traj).T_qsl == 0.0


def test_state_independent_validity_random(rng):
    for _ in range(15):
        dim = int(rng.choice([2, 3]))
        gen = LindbladGenerator(
            H=oracles.random_hermitian(rng, dim, 0.7),
            jumps=((oracles.random_matrix(rng, dim, 0.5), float(rng.uniform(0, 1))),),
        )
        O = oracles.random_hermitian(rng, dim)
        rho = DensityState.pure(oracles.random_ket(rng, dim))
        T = float(rng.uniform(0.3, 1.0))
        traj = evolve_lindblad_heisenberg(O, gen, rho, TimeGrid(0.0, T, 800))
        assert oqsl_state_independent(O, traj).T_qsl <= T + 1e-6


# ---------------------------------------------------------------------------
# battery charging bounds


def test_battery_degenerate_case_exact_zeros():
    grid = TimeGrid(0.0, np.pi / 4.0, 500)
    ct1, ct2 = battery_bounds(sigma_z, sigma_z, PLUS, grid)
    assert ct1.T_qsl == 0.0
    assert ct2.T_qsl == 0.0
    # the state nevertheless reaches an orthogonal configuration
    HT = 2.0 * sigma_z
    ptraj = evolve_unitary_heisenberg(PLUS.matrix.copy(), HT, PLUS, grid)
    pT = float(np.clip(ptraj.expect[-1], 0.0, 1.0))
    smt = state_qsl_projector(1.0, pT, float(np.sqrt(variance(HT, PLUS))), grid.duration)
    assert smt.T_qsl >= 0.5


def test_battery_no_charging_field():
    grid = TimeGrid(0.0, 1.0, 200)
    ct1, ct2 = battery_bounds(sigma_z, np.zeros((2, 2)), PLUS, grid)
    assert ct1.T_qsl == 0.0
    assert ct2.T_qsl == 0.0


def test_battery_charging_protocol_validity():
    T = 1.0
    grid = TimeGrid(0.0, T, 1000)
    ct1, ct2 = battery_bounds(sigma_z, sigma_x, DensityState.pure([0.0, 1.0]), grid)
    assert 0.0 < ct1.T_qsl <= T + 1e-6
    assert 0.0 < ct2.T_qsl <= T + 1e-6


def test_battery_ct2_requires_pure_state():
    with pytest.raises(ValidationError):
        battery_bounds(sigma_z, sigma_x, DensityState.maximally_mixed(2), TimeGrid(0.0, 1.0, 10))


# ---------------------------------------------------------------------------
# two-time correlations


def test_correlation_starts_at_variance(rng):
    A = oracles.random_hermitian(rng, 3)
    rho = DensityState.pure(oracles.random_ket(rng, 3))
    H = oracles.random_hermitian(rng, 3)
    traj = evolve_unitary_heisenberg(A, H, rho, TimeGrid(0.0, 1.0, 50))
    trace = two_time_correlation(A, traj, rho)
    c0 = complex(trace.C_samples[0])
    assert c0.real == pytest.approx(variance(A, rho), abs=1e-10)
    assert abs(c0.imag) <= 1e-10


def test_correlation_dephasing_identically_zero():
    traj = evolve_lindblad_heisenberg(
        sigma_x, dephasing_generator(1.0), PLUS, TimeGrid(0.0, 1.0, 200)
    )
    trace = two_time_correlation(sigma_x, traj, PLUS)
    direct = [
        complex(
            np.trace(traj.O_samples[i] @ sigma_x @ PLUS.matrix)
            - np.trace(traj.O_samples[i] @ PLUS.matrix) * np.trace(sigma_x @ PLUS.matrix)
        )
        for i in range(0, 201, 40)
    ]
    assert np.abs(trace.C_samples[::40] - np.array(direct)).max() <= 1e-9
    assert np.abs(trace.C_samples).max() <= 1e-12


def test_correlation_precession_phase():
    grid = TimeGrid(0.0, 1.2, 800)
    traj = evolve_unitary_heisenberg(sigma_x, sigma_z, GROUND, grid)
    trace = two_time_correlation(sigma_x, traj, GROUND)
    assert np.abs(trace.C_samples - np.exp(2j * grid.times())).max() <= 1e-8


def test_correlation_rejects_mixed_state():
    mixed = DensityState.maximally_mixed(2)
    traj = evolve_unitary_heisenberg(sigma_x, sigma_z, mixed, TimeGrid(0.0, 1.0, 10))
    with pytest.raises(ValidationError):
        two_time_correlation(sigma_x, traj, mixed)


def test_corr_qsl_commuting_case_zero():
    grid = TimeGrid(0.0, 1.0, 100)
    traj = evolve_unitary_heisenberg(sigma_z, sigma_z, GROUND, grid)
    trace = two_time_correlation(sigma_z, traj, GROUND)
    rep = corr_qsl(trace, op_norm(sigma_z), traj.gen_speed_op, kind="closed")
    assert rep.T_qsl == 0.0


def test_corr_qsl_closed_value_and_validity():
    T = 1.2
    grid = TimeGrid(0.0, T, 800)
    traj = evolve_unitary_heisenberg(sigma_x, sigma_z, GROUND, grid)
    trace = two_time_correlation(sigma_x, traj, GROUND)
    rep = corr_qsl(trace, op_norm(sigma_x), traj.gen_speed_op * traj.hbar, kind="closed")
    assert rep.T_qsl == pytest.approx(abs(np.sin(T)) / 2.0, abs=1e-9)
    assert rep.T_qsl <= T + 1e-6


def test_corr_qsl_open_value_and_validity():
    T = 1.2
    traj = evolve_lindblad_heisenberg(
        sigma_x, dephasing_generator(1.0), GROUND, TimeGrid(0.0, T, 800)
    )
    trace = two_time_correlation(sigma_x, traj, GROUND)
    rep = corr_qsl(trace, op_norm(sigma_x), traj.gen_speed_op, kind="open")
    assert rep.T_qsl == pytest.approx(T / 2.0, abs=1e-5)
    assert rep.T_qsl <= T + 1e-6


def test_corr_qsl_zero_speed_inconsistency():
    grid = TimeGrid(0.0, 1.0, 4)
    trace = CorrelationTrace(grid=grid, C_samples=np.linspace(0.0, 1.0, 5).astype(complex))
    with pytest.raises(NumericError):
        corr_qsl(trace, 1.0, np.zeros(5), kind="closed")


# ---------------------------------------------------------------------------
# commutator bounds


TWOQ_H = np.kron(sigma_x, sigma_x)
TWOQ_A = np.kron(np.eye(2), sigma_z)
TWOQ_B = np.kron(sigma_z, np.eye(2))


def twoq_state():
    r = np.random.default_rng(7)
    return DensityState.pure(r.standard_normal(4) + 1j * r.standard_normal(4))


def test_commutator_closed_locality_toy():
    rho = twoq_state()
    grid = TimeGrid(0.0, 1.2, 800)
    traj = evolve_unitary_heisenberg(TWOQ_A, TWOQ_H, rho, grid)
    rep = commutator_qsl(TWOQ_B, traj, rho, kind="closed")
    assert rep.details["comm_expect_0"] <= 1e-12
    assert rep.details["comm_expect_T"] > 0.01
    assert 0.0 < rep.T_qsl <= grid.duration + 1e-6


def test_commutator_closed_commuting_pair_zero():
    # A commutes with the coupling, so A(t) = A(0) commutes with B forever
    rho = twoq_state()
    A = np.kron(np.eye(2), sigma_x)
    traj = evolve_unitary_heisenberg(A, TWOQ_H, rho, TimeGrid(0.0, 1.0, 200))
    rep = commutator_qsl(TWOQ_B, traj, rho, kind="closed")
    assert rep.T_qsl == 0.0


def test_commutator_open_validity():
    rho = twoq_state()
    r = np.random.default_rng(11)
    gen = LindbladGenerator(
        H=TWOQ_H,
        jumps=((oracles.random_matrix(r, 4, 0.4), 0.6),),
    )
    grid = TimeGrid(0.0, 0.8, 800)
    traj = evolve_lindblad_heisenberg(TWOQ_A, gen, rho, grid)
    rep = commutator_qsl(TWOQ_B, traj, rho, kind="open")
    assert rep.details["comm_expect_0"] <= 1e-12
    assert rep.T_qsl <= grid.duration + 1e-6


def test_commutator_requires_pure_state():
    mixed = DensityState.maximally_mixed(4)
    traj = evolve_unitary_heisenberg(TWOQ_A, TWOQ_H, mixed, TimeGrid(0.0, 1.0, 10))
    with pytest.raises(ValidationError):
        commutator_qsl(TWOQ_B, traj, mixed, kind="closed")


def test_commutator_kind_must_match_trajectory():
    rho = twoq_state()
    traj = evolve_unitary_heisenberg(TWOQ_A, TWOQ_H, rho, TimeGrid(0.0, 1.0, 10))
    with pytest.raises(ValidationError):
        commutator_qsl(TWOQ_B, traj, rho, kind="open")


# ---------------------------------------------------------------------------
# rate audit and helpers


def test_rate_audit_tight_qubit_saturates_robertson():
    traj = tight_trajectory()
    system = make_system(sigma_z, PLUS)
    rep = rate_audit(traj, system)
    assert abs(rep.violations["RATE_ROBERTSON"]) <= 1e-5
    assert rep.violations["RATE_HOLDER_OP"] <= 1e-6


def test_rate_audit_conserved_observable():
    traj = evolve_unitary_heisenberg(sigma_z, sigma_z, PLUS, TimeGrid(0.0, 1.0, 100))
    rep = rate_audit(traj, make_system(sigma_z, PLUS))
    assert rep.violations["RATE_ROBERTSON"] <= 0.0
    assert rep.violations["RATE_HOLDER_OP"] <= 0.0


def test_rate_audit_lindblad_cauchy_schwarz(rng):
    gen = dephasing_generator(1.0)
    traj = evolve_lindblad_heisenberg(sigma_x, gen, PLUS, TimeGrid(0.0, 1.0, 800))
    rep = rate_audit(traj, make_system(np.zeros((2, 2)), PLUS, kind="lindblad", jumps=gen.jumps))
    assert rep.kind == "lindblad"
    assert rep.violations["RATE_CS_HS"] <= 1e-6


def test_rate_audit_mutation_hook_detects_sign_flip():
    traj = tight_trajectory(500)
    rep = rate_audit(traj, make_system(sigma_z, PLUS), _flip_robertson_sign=True)
    assert rep.violations["RATE_ROBERTSON"] > 0.1


def test_observable_distance():
    assert observable_distance(sigma_x, sigma_x, PLUS) == 0.0
    d = observable_distance(-sigma_x, sigma_x, PLUS)
    assert d == pytest.approx(1.0, abs=1e-12)  # |<-1 - 1>| / (2 * 1)


def test_bound_ids_catalog():
    assert "MT_INTEGRAL" in BOUND_IDS and len(BOUND_IDS) == 15


# ---------------------------------------------------------------------------
# shared conventions


def test_every_report_carries_digest_and_details():
    rep = oqsl_self_inverse(1.0, -1.0, 1.0, T_HALF_PI)
    assert len(rep.inputs_digest) == 16
    assert rep.details["delta_H"] == 1.0


def test_zero_change_rule_returns_exact_zero():
    assert oqsl_self_inverse(0.5, 0.5, 2.0, 1.0).T_qsl == 0.0
    assert state_qsl_projector(0.25, 0.25, 2.0, 1.0).T_qsl == 0.0
    assert oqsl_purity_hs(0.5, 0.5, PLUS, 2.0, 1.0).T_qsl == 0.0
    assert oqsl_min_norm(0.5, 0.5, 1.0, 1.0, 1.0).T_qsl == 0.0
    assert qsl_delcampo(PLUS, PLUS, 1.0, 1.0).T_qsl == 0.0
