import math

import numpy as np
import pytest

from cwbeam import fock, gaussian as g

from oracles import hermite_psi, squeeze_matrix


def tmss_state(r):
    return g.apply_symplectic(g.vacuum(2), g.two_mode_squeezer(r), [0, 1])


# ----------------------------------------------------------------------
# coherent states
# ----------------------------------------------------------------------

def test_coherent_vacuum():
    state = g.coherent(0.0)
    assert np.allclose(state.mean, [0.0, 0.0])
    assert np.allclose(state.cov, 0.5 * np.eye(2))
    assert state.purity == pytest.approx(1.0)


def test_coherent_real_amplitude():
    state = g.coherent(2.0)
    assert np.allclose(state.mean, [2.0 * math.sqrt(2.0), 0.0])
    assert state.mean_photons(0) == pytest.approx(4.0)


def test_coherent_moments_match_fock():
    state = g.coherent(1 + 1j)
    assert state.mean_photons(0) == pytest.approx(2.0)
    assert state.purity == pytest.approx(1.0)
    reference = fock.coherent_fock(1 + 1j, 30)
    assert fock.mean_photons(reference) == pytest.approx(state.mean_photons(0), abs=1e-10)
    mean, cov = fock.quadrature_moments(reference)
    assert np.allclose(mean, state.mean, atol=1e-10)
    assert np.allclose(cov, state.cov, atol=1e-10)


# ----------------------------------------------------------------------
# symplectic ops
# ----------------------------------------------------------------------

def test_balanced_beamsplitter_splits_coherent():
    joint = g.tensor(g.coherent(2.0), g.vacuum())
    out = g.apply_symplectic(joint, g.beamsplitter(0.5), [0, 1])
    assert out.mode_mean(0) == pytest.approx(2.0 / math.sqrt(2.0))
    assert out.mode_mean(1) == pytest.approx(2.0 / math.sqrt(2.0))
    assert out.purity == pytest.approx(1.0)


def test_identity_op_is_noop():
    state = g.tensor(g.coherent(0.3 - 0.7j), g.coherent(1.2))
    out = g.apply_symplectic(state, g.identity_op(2), [0, 1])
    assert np.allclose(out.mean, state.mean)
    assert np.allclose(out.cov, state.cov)


def test_phase_shift_rotates_amplitude():
    alpha, phi = 1.3 - 0.4j, 0.77
    out = g.apply_symplectic(g.coherent(alpha), g.phase_shift(phi), [0])
    assert out.mode_mean(0) == pytest.approx(alpha * np.exp(1j * phi))
    # cross-check in the number basis
    mean, cov = fock.quadrature_moments(fock.coherent_fock(alpha * np.exp(1j * phi), 40))
    assert np.allclose(mean, out.mean, atol=1e-10)
    assert np.allclose(cov, out.cov, atol=1e-10)


def test_squeezer_on_vacuum():
    r = 0.5
    out = g.apply_symplectic(g.vacuum(), g.squeezer(r), [0])
    assert np.allclose(out.cov, np.diag([math.exp(-2 * r) / 2, math.exp(2 * r) / 2]))
    # independent check against the truncated squeeze operator
    u = squeeze_matrix(r, 0.0, 40)
    rho = u[:, [0]] @ u[:, [0]].conj().T
    mean, cov = fock.quadrature_moments(fock.FockDensityMatrix(rho, 1, 40, tail_mass=1e-12))
    assert np.allclose(cov, out.cov, atol=1e-8)


def test_two_mode_squeezer_zero_is_identity():
    op = g.two_mode_squeezer(0.0)
    assert np.allclose(op.matrix, np.eye(4))


def test_tmss_from_split_squeezed_vacua():
    # interfering a p-squeezed and an x-squeezed vacuum on a 50/50 splitter
    # reproduces the direct two-mode squeezer output elementwise
    r = 0.37
    inputs = g.tensor(g.apply_symplectic(g.vacuum(), g.squeezer(r, math.pi), [0]),
                      g.apply_symplectic(g.vacuum(), g.squeezer(r, 0.0), [0]))
    split = g.apply_symplectic(inputs, g.beamsplitter(0.5), [0, 1])
    direct = tmss_state(r)
    assert np.allclose(split.cov, direct.cov, atol=1e-12)
    assert np.allclose(split.mean, direct.mean, atol=1e-12)
    # the opposite input ordering gives the same pair up to a local pi shift
    swapped = g.tensor(g.apply_symplectic(g.vacuum(), g.squeezer(r, 0.0), [0]),
                       g.apply_symplectic(g.vacuum(), g.squeezer(r, math.pi), [0]))
    swapped = g.apply_symplectic(swapped, g.beamsplitter(0.5), [0, 1])
    fixed = g.apply_symplectic(swapped, g.phase_shift(math.pi), [1])
    assert np.allclose(fixed.cov, direct.cov, atol=1e-12)


def test_apply_symplectic_rejects_bad_input():
    state = g.vacuum(2)
    with pytest.raises(ValueError):
        g.apply_symplectic(state, g.beamsplitter(0.5), [0])
    with pytest.raises(IndexError):
        g.apply_symplectic(state, g.beamsplitter(0.5), [0, 5])
    with pytest.raises(ValueError):
        g.SymplecticOp(np.diag([2.0, 2.0]))
    with pytest.raises(ValueError):
        g.beamsplitter(1.5)
    with pytest.raises(ValueError):
        g.squeezer(float("nan"))


# ----------------------------------------------------------------------
# homodyne
# ----------------------------------------------------------------------

def test_homodyne_vacuum_statistics():
    rng = np.random.default_rng(7)
    n = 100_000
    values = np.empty(n)
    vac = g.vacuum()
    for i in range(n):
        outcome, rest = g.homodyne(vac, 0, 0.9, rng)
        values[i] = outcome.value
        assert rest is None
    se = math.sqrt(2.0 / n) * 0.5
    assert abs(values.var() - 0.5) < 3 * se
    assert abs(values.mean()) < 3 * math.sqrt(0.5 / n)


def test_homodyne_product_state_leaves_other_mode():
    rng = np.random.default_rng(8)
    state = g.tensor(g.coherent(1.5), g.coherent(-0.3 + 2j))
    _, rest = g.homodyne(state, 0, 0.4, rng)
    assert rest.mode_mean(0) == pytest.approx(-0.3 + 2j)
    assert np.allclose(rest.cov, 0.5 * np.eye(2))


def test_homodyne_tmss_conditioning_against_fock():
    # Gaussian conditional mean/variance vs direct projection onto the
    # measured quadrature eigenstate in the number basis
    r, cutoff = 0.3, 12
    rng = np.random.default_rng(9)
    state = tmss_state(r)
    outcome, conditional = g.homodyne(state, 0, 0.0, rng)
    gain = math.tanh(2 * r)
    assert conditional.mean[0] == pytest.approx(gain * outcome.value)
    assert conditional.cov[0, 0] == pytest.approx(0.5 / math.cosh(2 * r))
    assert conditional.cov[0, 0] < 0.5

    wavefn = np.array([hermite_psi(n, outcome.value) for n in range(cutoff)])
    rho = fock.tmss_fock(r, 0.0, cutoff).matrix.reshape(cutoff, cutoff, cutoff, cutoff)
    reduced = np.einsum("i,ijkl,k->jl", wavefn, rho, wavefn)
    reduced /= np.trace(reduced).real
    mean, cov = fock.quadrature_moments(
        fock.FockDensityMatrix(reduced, 1, cutoff, tail_mass=1e-6, check=False))
    assert mean[0] == pytest.approx(conditional.mean[0], abs=2e-3)
    assert cov[0, 0] == pytest.approx(conditional.cov[0, 0], abs=2e-3)


def test_homodyne_conditional_cov_outcome_independent():
    state = tmss_state(0.6)
    covs = []
    for seed in (1, 2):
        _, conditional = g.homodyne(state, 0, 0.3, np.random.default_rng(seed))
        covs.append(conditional.cov)
    assert np.array_equal(covs[0], covs[1])


# ----------------------------------------------------------------------
# heterodyne
# ----------------------------------------------------------------------

def test_heterodyne_vacuum_statistics():
    rng = np.random.default_rng(10)
    n = 100_000
    outcomes = np.empty(n, dtype=complex)
    vac = g.vacuum()
    for i in range(n):
        outcomes[i], _ = g.heterodyne(vac, 0, rng)
    # quadrature components sqrt(2) Re/Im m carry signal + measurement noise
    se = math.sqrt(2.0 / n)
    assert abs((math.sqrt(2.0) * outcomes.real).var() - 1.0) < 3 * se
    assert abs((math.sqrt(2.0) * outcomes.imag).var() - 1.0) < 3 * se


def test_heterodyne_coherent_mean():
    rng = np.random.default_rng(11)
    alpha = 1.2 - 0.7j
    n = 100_000
    outcomes = np.empty(n, dtype=complex)
    state = g.coherent(alpha)
    for i in range(n):
        outcomes[i], _ = g.heterodyne(state, 0, rng)
    se = math.sqrt(0.5 / n)
    assert abs(outcomes.real.mean() - alpha.real) < 4 * se
    assert abs(outcomes.imag.mean() - alpha.imag) < 4 * se


def test_heterodyne_product_state_leaves_other_mode():
    rng = np.random.default_rng(12)
    delta = 0.8
    state = g.tensor(g.coherent(1.1), g.coherent(1.1 * np.exp(1j * delta)))
    _, rest = g.heterodyne(state, 0, rng)
    assert rest.mode_mean(0) == pytest.approx(1.1 * np.exp(1j * delta))


# ----------------------------------------------------------------------
# entanglement and fidelity
# ----------------------------------------------------------------------

def test_log_negativity_product_state_zero():
    state = g.tensor(g.coherent(0.9), g.coherent(-2.0 + 0.4j))
    assert g.log_negativity(state) == 0.0


def test_log_negativity_tmss():
    for r in (0.3, 0.5):
        assert g.log_negativity(tmss_state(r)) == pytest.approx(2 * r / math.log(2), abs=1e-12)
    assert g.log_negativity(tmss_state(0.5)) == pytest.approx(1.4427, abs=1e-4)


def test_log_negativity_matches_fock_ppt():
    r, cutoff = 0.3, 12
    fock_value = fock.log_negativity_fock(fock.tmss_fock(r, 0.0, cutoff))
    assert fock_value == pytest.approx(g.log_negativity(tmss_state(r)), abs=1e-3)


def test_log_negativity_rejects_wrong_shape():
    with pytest.raises(ValueError):
        g.log_negativity(g.vacuum(1))


def test_fidelity_coherent_exact():
    assert g.fidelity_to_coherent(g.coherent(0.5 + 0.2j), 0.5 + 0.2j) == pytest.approx(1.0)
    assert g.fidelity_to_coherent(g.vacuum(), 1.0) == pytest.approx(math.exp(-1.0))


def test_fidelity_thermal_broadened_against_fock():
    from oracles import displacement_matrix, thermal_matrix
    sigma2 = 0.5
    alpha = 0.8 + 0.3j
    state = g.GaussianState(g.coherent(alpha).mean, (0.5 + sigma2) * np.eye(2))
    value = g.fidelity_to_coherent(state, alpha)
    assert value == pytest.approx(1.0 / (1.0 + sigma2), abs=1e-12)
    cutoff = 40
    disp = displacement_matrix(alpha, cutoff)
    rho = disp @ thermal_matrix(sigma2, cutoff) @ disp.conj().T
    oracle = fock.overlap_with_coherent(
        fock.FockDensityMatrix(rho, 1, cutoff, tail_mass=1e-9, check=False), alpha)
    assert value == pytest.approx(oracle, abs=1e-8)


def test_fidelity_rejects_multimode():
    with pytest.raises(ValueError):
        g.fidelity_to_coherent(g.vacuum(2), 0.0)


# ----------------------------------------------------------------------
# invariants
# ----------------------------------------------------------------------

def random_op(rng) -> g.SymplecticOp:
    kind = rng.integers(3)
    if kind == 0:
        return g.phase_shift(rng.uniform(0, 2 * math.pi))
    if kind == 1:
        return g.squeezer(rng.uniform(-1, 1), rng.uniform(0, 2 * math.pi))
    return g.compose(g.phase_shift(rng.uniform(0, 2 * math.pi)),
                     g.squeezer(rng.uniform(-1, 1)))


def test_symplectic_closure():
    rng = np.random.default_rng(13)
    omega = g.symplectic_form(1)
    for _ in range(50):
        op = g.compose(random_op(rng), random_op(rng))
        assert np.max(np.abs(op.matrix @ omega @ op.matrix.T - omega)) < 1e-10


def test_uncertainty_preserved_along_random_chains():
    rng = np.random.default_rng(14)
    for _ in range(20):
        state = g.tensor(g.coherent(rng.normal() + 1j * rng.normal()), g.vacuum(), g.vacuum())
        for _ in range(6):
            mode = int(rng.integers(state.n_modes))
            state = g.apply_symplectic(state, random_op(rng), [mode])
            if state.n_modes > 1 and rng.random() < 0.3:
                if rng.random() < 0.5:
                    _, state = g.homodyne(state, mode, rng.uniform(0, math.pi), rng)
                else:
                    _, state = g.heterodyne(state, mode, rng)
        omega = g.symplectic_form(state.n_modes)
        eigs = np.linalg.eigvalsh(state.cov + 0.5j * omega)
        assert eigs.min() > -1e-10


def test_purity_invariance_and_growth():
    rng = np.random.default_rng(15)
    state = tmss_state(0.4)
    rotated = g.apply_symplectic(state, random_op(rng), [0])
    assert rotated.purity == pytest.approx(state.purity, abs=1e-10)
    # measuring one mode of a pure entangled state purifies the remainder
    before = g.marginal(state, [1]).purity
    _, conditional = g.homodyne(state, 0, 0.0, rng)
    assert conditional.purity > before
    assert conditional.purity == pytest.approx(1.0, abs=1e-9)


def test_log_negativity_local_invariance():
    rng = np.random.default_rng(16)
    state = tmss_state(0.5)
    base = g.log_negativity(state)
    for _ in range(10):
        transformed = g.apply_symplectic(state, g.phase_shift(rng.uniform(0, 2 * math.pi)), [0])
        transformed = g.apply_symplectic(transformed, g.phase_shift(rng.uniform(0, 2 * math.pi)), [1])
        transformed = g.apply_symplectic(
            transformed, g.displacement(rng.normal() + 1j * rng.normal()), [int(rng.integers(2))])
        assert g.log_negativity(transformed) == pytest.approx(base, abs=1e-10)


def test_engine_cross_check_moments_and_overlaps():
    # shared-support instances with <n> <= 6 agree across engines
    cutoff = 40
    cases = [0.0, 1.0, 1 + 1j, 2.0, -1.5 + 0.5j, 2.2j]
    states_g = [g.coherent(a) for a in cases]
    states_f = [fock.coherent_fock(a, cutoff) for a in cases]
    for sg, sf in zip(states_g, states_f):
        mean, cov = fock.quadrature_moments(sf)
        assert np.allclose(mean, sg.mean, atol=1e-6)
        assert np.allclose(cov, sg.cov, atol=1e-6)
    for i in range(len(cases)):
        for j in range(len(cases)):
            assert g.state_overlap(states_g[i], states_g[j]) == pytest.approx(
                fock.overlap(states_f[i], states_f[j]), abs=1e-6)
