import itertools

import numpy as np
import pytest

from floqsim.adapt import (
    AdaptConfig,
    AnsatzKernel,
    CostOperator,
    OperatorPool,
    PoolGradientKernel,
    build_mixed_pool,
    build_mixed_product_pool,
    build_pool,
    build_two_local_total_pool,
    deflation_gradients,
    default_lambda_grid,
    distinct_quasienergies,
    make_cost,
    pool_gradients,
    run_adapt,
    run_deflation,
    spectrum_sweep,
    vqe_optimize,
)
from floqsim.drives import DriveSpec, XYZParams, driven_xyz
from floqsim.hamiltonian import RegisterLayout, build_extended, shifted_squared
from floqsim.oracle import central_zone, dense_extended_spectrum
from floqsim.pauli import PauliSum, to_dense
from floqsim.statevector import Ansatz, StateVector, expectation, init_reference

from oracles import random_state


def full_pool(width: int) -> OperatorPool:
    labels = [
        "".join(p)
        for p in itertools.product("IXYZ", repeat=width)
        if set(p) != {"I"}
    ]
    return OperatorPool(
        labels=tuple(labels),
        generators=tuple(PauliSum.from_string(s) for s in labels),
    )


@pytest.fixture(scope="module")
def toy_static():
    drive = DriveSpec(modes={0: PauliSum.from_string("Z")}, omega=2.0, L=1)
    h = build_extended(drive, n_a=1)
    ref = init_reference(h.layout, "+")
    return h, full_pool(2), ref


@pytest.fixture(scope="module")
def small_driven():
    drive = driven_xyz(
        XYZParams(L=2, j_bar=(1.0, 0.7, 0.4), delta_j=(0.3, 0.2, 0.1), b_bar=0.5,
                  delta_b=0.6),
        omega=4.0,
    )
    return build_extended(drive, n_a=2)


# -- pools ---------------------------------------------------------------------


def test_mixed_pool_counts():
    pool = build_mixed_pool(RegisterLayout(n_a=1, L=2))
    assert len(pool) == 3 + 9
    pool = build_mixed_pool(RegisterLayout(n_a=2, L=2))
    assert len(pool) == 15 + 9
    for gen in pool.generators:
        assert gen.is_hermitian
        ((_, _), c), = gen.terms.items()
        assert c == 1.0


def test_mixed_pool_needs_two_physical_qubits():
    with pytest.raises(ValueError):
        build_mixed_pool(RegisterLayout(n_a=2, L=1))


def test_mixed_pool_nearest_neighbor():
    all_pairs = build_mixed_pool(RegisterLayout(n_a=1, L=3))
    nn = build_mixed_pool(RegisterLayout(n_a=1, L=3), nearest_neighbor=True)
    assert len(all_pairs) == 3 + 9 * 3
    assert len(nn) == 3 + 9 * 2


def test_mixed_product_pool():
    pool = build_mixed_product_pool(RegisterLayout(n_a=1, L=2))
    assert len(pool) == 4 * (9 + 1) - 1
    # contains register-entangling generators
    assert "XXX" in pool.labels
    assert "ZII" in pool.labels
    assert "IXY" in pool.labels


def test_two_local_total_pool():
    pool = build_two_local_total_pool(RegisterLayout(n_a=2, L=2))
    assert len(pool) == 9 * 6  # C(4,2) pairs


def test_build_pool_presets():
    layout = RegisterLayout(n_a=1, L=2)
    assert len(build_pool("mixed", layout)) == 12
    assert len(build_pool("mixed_product", layout)) == 39
    assert len(build_pool("two_local_total", layout)) == 9 * 3
    with pytest.raises(ValueError):
        build_pool("nope", layout)


# -- gradients ------------------------------------------------------------------


def test_pool_gradients_zero_in_eigenstate(small_driven):
    h = small_driven
    evals, vecs = dense_extended_spectrum(h)
    state = StateVector(vecs[:, 3], h.layout)
    pool = full_pool(4)
    g = pool_gradients(state, shifted_squared(h, 0.2), pool)
    assert np.max(np.abs(g)) < 1e-10


def test_pool_gradient_pauli_example():
    layout = RegisterLayout(n_a=1, L=1)
    state = init_reference(layout, "+")
    pool = OperatorPool(labels=("IY",), generators=(PauliSum.from_string("IY"),))
    g = pool_gradients(state, PauliSum.from_string("IZ"), pool)
    assert g[0] == pytest.approx(-2.0)


def finite_difference_gradients(state, cost, pool, step=1e-5):
    from floqsim.statevector import apply_exp

    out = []
    for gen in pool.generators:
        plus = apply_exp(state, gen, step)
        minus = apply_exp(state, gen, -step)
        f_plus = np.vdot(plus.amps, cost.apply(plus.amps)).real
        f_minus = np.vdot(minus.amps, cost.apply(minus.amps)).real
        out.append((f_plus - f_minus) / (2 * step))
    return np.array(out)


def test_pool_gradients_match_finite_differences(small_driven):
    rng = np.random.default_rng(79)
    h = small_driven
    pool = full_pool(4)
    cost = make_cost(h, 0.7)
    for _ in range(5):
        state = StateVector(random_state(rng, h.layout.dim), h.layout)
        g = pool_gradients(state, cost, pool)
        fd = finite_difference_gradients(state, cost, pool)
        assert np.max(np.abs(g - fd)) < 1e-6


def test_pool_gradient_kernel_matches_reference(small_driven):
    rng = np.random.default_rng(83)
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    cost = make_cost(h, -0.4)
    kernel = PoolGradientKernel(pool, h.layout.dim)
    for _ in range(5):
        state = StateVector(random_state(rng, h.layout.dim), h.layout)
        phi = cost.apply(state.amps)
        np.testing.assert_allclose(
            kernel.gradients(state.amps, phi),
            pool_gradients(state, cost, pool),
            atol=1e-12,
        )


def test_deflation_gradients_reduce_to_plain(small_driven):
    rng = np.random.default_rng(89)
    h = small_driven
    pool = full_pool(4)
    cost = make_cost(h, 0.0)
    state = StateVector(random_state(rng, h.layout.dim), h.layout)
    g_plain = pool_gradients(state, cost, pool)
    np.testing.assert_allclose(
        deflation_gradients(state, cost, pool, [], []), g_plain, atol=1e-12
    )
    prior = StateVector(random_state(rng, h.layout.dim), h.layout)
    np.testing.assert_allclose(
        deflation_gradients(state, cost, pool, [prior], [0.0]), g_plain, atol=1e-12
    )


def test_deflation_gradients_match_projected_cost(small_driven):
    rng = np.random.default_rng(97)
    h = small_driven
    pool = full_pool(4)
    state = StateVector(random_state(rng, h.layout.dim), h.layout)
    priors = [StateVector(random_state(rng, h.layout.dim), h.layout) for _ in range(2)]
    betas = [3.0, 1.5]
    base = make_cost(h, 0.3)
    deflated = base.deflated([p.amps for p in priors], betas)
    # explicit-formula gradients equal the projector-cost commutator gradients
    np.testing.assert_allclose(
        deflation_gradients(state, base, pool, priors, betas),
        pool_gradients(state, deflated, pool),
        atol=1e-10,
    )
    # and match finite differences of the full deflated cost
    fd = finite_difference_gradients(state, deflated, pool)
    assert np.max(np.abs(deflation_gradients(state, base, pool, priors, betas) - fd)) < 1e-6


# -- ansatz kernel ----------------------------------------------------------------


def test_ansatz_kernel_matches_ansatz_prepare(small_driven):
    rng = np.random.default_rng(101)
    h = small_driven
    ref = init_reference(h.layout, "ud")
    pool = full_pool(4)
    picks = rng.integers(0, len(pool), size=8)
    thetas = rng.normal(scale=0.4, size=8)
    ansatz = Ansatz.empty(ref)
    kernel = AnsatzKernel(ref.amps)
    for i, p in enumerate(picks):
        ansatz = ansatz.appended(pool.generators[p], pool.labels[p], thetas[i])
        kernel.append(pool.generators[p])
    np.testing.assert_allclose(
        kernel.prepare(thetas), ansatz.prepare().amps, atol=1e-12
    )


def test_ansatz_kernel_value_and_grad_finite_difference(small_driven):
    rng = np.random.default_rng(103)
    h = small_driven
    ref = init_reference(h.layout, "++")
    pool = full_pool(4)
    cost = make_cost(h, 0.5)
    kernel = AnsatzKernel(ref.amps)
    for p in rng.integers(0, len(pool), size=10):
        kernel.append(pool.generators[p])
    thetas = rng.normal(scale=0.3, size=10)
    value, grads = kernel.value_and_grad(thetas, cost)
    assert value == pytest.approx(
        np.vdot(kernel.prepare(thetas), cost.apply(kernel.prepare(thetas))).real
    )
    step = 1e-6
    for j in range(10):
        tp, tm = thetas.copy(), thetas.copy()
        tp[j] += step
        tm[j] -= step
        vp, _ = kernel.value_and_grad(tp, cost)
        vm, _ = kernel.value_and_grad(tm, cost)
        assert grads[j] == pytest.approx((vp - vm) / (2 * step), abs=1e-5)


def test_cost_operator_two_pass_matches_materialized(small_driven):
    rng = np.random.default_rng(107)
    h = small_driven
    for lam in (0.0, 0.9):
        materialized = make_cost(h, lam)
        two_pass = make_cost(h, lam, materialize=False)
        sq = CostOperator.from_sum(shifted_squared(h, lam))
        v = random_state(rng, h.layout.dim)
        a = materialized.apply(v)
        np.testing.assert_allclose(two_pass.apply(v), a, atol=1e-10)
        np.testing.assert_allclose(sq.apply(v), a, atol=1e-10)


# -- inner optimizer ---------------------------------------------------------------


def test_vqe_optimize_empty_ansatz(toy_static):
    h, pool, ref = toy_static
    cost = shifted_squared(h, 0.0)
    angles, value, converged = vqe_optimize(Ansatz.empty(ref), cost, AdaptConfig())
    assert angles.size == 0
    assert value == pytest.approx(expectation(ref, cost))
    assert converged


def test_vqe_optimize_flat_landscape():
    # Z^2 = I: every angle leaves the cost at 1; no error, no decrease
    layout = RegisterLayout(n_a=1, L=1)
    ref = init_reference(layout, "u")
    cost = PauliSum.from_string("IZ") @ PauliSum.from_string("IZ")
    ansatz = Ansatz(
        reference=ref,
        generators=[PauliSum.from_string("IX")],
        thetas=[0.2],
        labels=["IX"],
    )
    angles, value, _ = vqe_optimize(ansatz, cost, AdaptConfig())
    assert value == pytest.approx(1.0)


def test_vqe_optimize_pole_minimum():
    # cost (Z - I/2)^2 has optimum 1/4 at theta = 0 mod pi for a Y rotation
    layout = RegisterLayout(n_a=1, L=1)
    ref = init_reference(layout, "u")
    z = PauliSum.from_string("IZ")
    cost = (z - PauliSum.identity(2, 0.5)) @ (z - PauliSum.identity(2, 0.5))
    ansatz = Ansatz(
        reference=ref,
        generators=[PauliSum.from_string("IY")],
        thetas=[0.3],
        labels=["IY"],
    )
    angles, value, converged = vqe_optimize(ansatz, cost, AdaptConfig())
    assert value == pytest.approx(0.25, abs=1e-9)
    assert min(abs(angles[0] % np.pi), np.pi - abs(angles[0] % np.pi)) < 1e-4
    assert value <= 0.25 + 1e-12


# -- the adaptive loop ---------------------------------------------------------------


def test_run_adapt_certifies_at_eigenvalue_shift(toy_static):
    h, pool, ref = toy_static
    res = run_adapt(h, pool, ref, AdaptConfig(lam=1.0, max_iterations=50))
    assert res.cost <= 1e-8
    assert res.energy == pytest.approx(1.0, abs=1e-6)
    assert res.certified
    assert res.converged


def test_run_adapt_chiral_pairing_uncertified_at_zero_shift(toy_static):
    # the static Z drive is the symmetric toy: at lam = 0 the run returns a
    # +-1 superposition that must not certify, with <H_F> strictly inside
    # (-sqrt(C), sqrt(C))
    h, pool, ref = toy_static
    res = run_adapt(h, pool, ref, AdaptConfig(lam=0.0, max_iterations=50))
    assert not res.certified
    root = np.sqrt(res.cost)
    assert -root < res.energy < root
    assert abs(res.energy) < root - 1e-3


def test_run_adapt_monotone_cost_and_certification(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    ref = init_reference(h.layout, "dd")
    res = run_adapt(h, pool, ref, AdaptConfig(lam=0.4, max_iterations=80))
    costs = [r.cost for r in res.trace]
    assert all(b <= a + 1e-10 for a, b in zip(costs, costs[1:]))
    assert costs[-1] >= 0.0
    assert res.certified
    evals, _ = dense_extended_spectrum(h)
    assert np.min(np.abs(evals - res.energy)) < 1e-5
    # certified residual against the dense operator
    dense = to_dense(h.op)
    residual = np.linalg.norm(dense @ res.state.amps - res.energy * res.state.amps)
    assert residual < 1e-3


def test_run_adapt_batching_appends_disjoint_supports(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    ref = init_reference(h.layout, "dd")
    res = run_adapt(h, pool, ref, AdaptConfig(lam=0.4, max_iterations=40, batching=True))
    assert res.certified
    for record in res.trace:
        if len(record.selected) > 1:
            supports = []
            for label in record.selected:
                mask = 0
                for q, letter in enumerate(reversed(label)):
                    if letter != "I":
                        mask |= 1 << q
                supports.append(mask)
            for a, b in itertools.combinations(supports, 2):
                assert a & b == 0


def test_adapt_config_validation():
    with pytest.raises(ValueError):
        AdaptConfig(eps=0.0)
    with pytest.raises(ValueError):
        AdaptConfig(betas=-1.0)
    with pytest.raises(ValueError):
        AdaptConfig(tie_break="random")


# -- spectrum sweep and deflation ------------------------------------------------------


def test_default_lambda_grid():
    grid = default_lambda_grid(3, 5.0)
    assert len(grid) == 31
    assert grid[0] == pytest.approx(-15 * 5.0 / 32)
    assert grid[-1] == pytest.approx(15 * 5.0 / 32)
    assert 0.0 in grid


@pytest.fixture(scope="module")
def sweep_results(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    refs = [("dd", init_reference(h.layout, "dd")), ("++", init_reference(h.layout, "++"))]
    config = AdaptConfig(max_iterations=60)
    return h, spectrum_sweep(h, pool, refs, config)


def test_spectrum_sweep_recovers_central_zone(sweep_results):
    h, entries = sweep_results
    found = distinct_quasienergies(entries, h.omega)
    evals, _ = dense_extended_spectrum(h)
    expected = central_zone(evals, h.omega)
    assert len(expected) == 4
    for eps in expected:
        assert np.min(np.abs(found - eps)) < 1e-3 * h.omega


def test_sweep_near_eigenvalue_cost_vanishes(sweep_results):
    h, entries = sweep_results
    evals, _ = dense_extended_spectrum(h)
    for entry in entries:
        gap = np.min(np.abs(evals - entry.lam))
        if gap < 0.05 and entry.result.certified:
            assert entry.result.cost < gap**2 + 1e-6


def test_sweep_rejects_out_of_zone_grid(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    refs = [("dd", init_reference(h.layout, "dd"))]
    with pytest.raises(ValueError):
        spectrum_sweep(h, pool, refs, AdaptConfig(), lambda_grid=[h.omega])


def test_run_deflation_first_state_matches_run_adapt(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    ref = init_reference(h.layout, "dd")
    config = AdaptConfig(max_iterations=60)
    single = run_deflation(h, pool, ref, config, k_states=1, shift=0.4)
    direct = run_adapt(h, pool, ref, AdaptConfig(max_iterations=60, lam=0.4))
    assert len(single) == 1
    assert single[0].energy == pytest.approx(direct.energy, abs=1e-8)
    assert single[0].cost == pytest.approx(direct.cost, abs=1e-8)


def test_run_deflation_penalty_is_beta_on_found_state(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    ref = init_reference(h.layout, "dd")
    config = AdaptConfig(max_iterations=60, betas=2.5)
    results = run_deflation(h, pool, ref, config, k_states=2, shift=0.4)
    psi0 = results[0].state.amps
    base = make_cost(h, 0.4)
    deflated = base.deflated([psi0], [2.5])
    assert deflated.expectation(psi0) == pytest.approx(
        base.expectation(psi0) + 2.5, abs=1e-9
    )


def test_run_deflation_collects_distinct_states(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    ref = init_reference(h.layout, "dd")
    config = AdaptConfig(max_iterations=80)
    results = run_deflation(h, pool, ref, config, k_states=3, shift=0.4)
    energies = [r.energy for r in results if r.certified]
    assert len(energies) >= 2
    assert np.min(np.abs(np.diff(np.sort(energies)))) > 1e-3


def test_run_deflation_validates_shift(small_driven):
    h = small_driven
    pool = build_mixed_product_pool(h.layout)
    ref = init_reference(h.layout, "dd")
    with pytest.raises(ValueError):
        run_deflation(h, pool, ref, AdaptConfig(), k_states=1, shift=h.omega)
