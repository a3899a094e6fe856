import math

import numpy as np
import pytest

from oracles import central_difference, dense_circuit_state, dense_expectation
from qwoabench.graphs import Graph, build_quality_table, gen_er, gen_regular, path_graph
from qwoabench.optimize import OptimizerConfig, minimize
from qwoabench.rng import stream
from qwoabench.simulator import CircuitSpec, Gate, cost, gradient_adjoint, qwoa_circuit, value_and_grad
from qwoabench.strategies import (
    NV_BOUNDS,
    NVHyperparams,
    PretrainBundle,
    PretrainingFailed,
    angle_bounds,
    augmented_circuit,
    build_augmented,
    krawtchouk,
    mixer_diagnostics,
    nv_circuit_params,
    nv_cost_grad,
    nv_jacobian,
    nv_random_init,
    nv_schedule,
    pretrain_path_graph,
    random_init,
)


def test_random_init():
    x = random_init(256, 3)
    assert x.shape == (512,) and x.min() >= 0 and x.max() <= 2 * np.pi
    assert random_init(1, 3).shape == (2,)
    np.testing.assert_array_equal(random_init(8, 5), random_init(8, 5))
    assert not np.array_equal(random_init(8, 5), random_init(8, 6))


def test_nv_hyperparams_validation():
    for beta in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            NVHyperparams(beta, 1.0, 1.0)
    hp = nv_random_init(4)
    assert 0.05 <= hp.beta <= 0.95 and 0 <= hp.gamma <= 2 * np.pi and 0 <= hp.t <= 2 * np.pi
    assert nv_random_init(4) == hp


def test_nv_schedule_examples():
    s = nv_schedule(NVHyperparams(0.5, 1.0, 1.0), 2, 1.0)
    np.testing.assert_array_equal(s.gammas, [0.5, 1.0])
    np.testing.assert_array_equal(s.times, [1.0, 0.5])
    s = nv_schedule(NVHyperparams(1 - 1e-12, 2.0, 3.0), 16, 4.0)
    np.testing.assert_allclose(s.gammas, 0.5, rtol=1e-11)
    np.testing.assert_allclose(s.times, 3.0, rtol=1e-11)
    with pytest.raises(ValueError):
        nv_schedule(NVHyperparams(0.5, 1, 1), 1, 1.0)
    with pytest.raises(ValueError):
        nv_schedule(NVHyperparams(0.5, 1, 1), 4, 0.0)


def test_nv_schedule_figure_point():
    hp = NVHyperparams(0.35, 5.3, 4.0)
    sigma = 2.0
    s = nv_schedule(hp, 256, sigma)
    assert s.gammas[0] == pytest.approx(0.35 * 5.3 / sigma, abs=1e-15)
    assert s.gammas[-1] == pytest.approx(5.3 / sigma, abs=1e-15)
    assert s.times[0] == 4.0 and s.times[-1] == pytest.approx(0.35 * 4.0, abs=1e-15)
    assert np.all(np.diff(s.gammas) > 0) and np.all(np.diff(s.times) < 0)
    # linear ramps: constant step
    np.testing.assert_allclose(np.diff(s.gammas), np.diff(s.gammas)[0], rtol=1e-9)


def test_nv_bindings():
    s = nv_schedule(NVHyperparams(0.3, 2.0, 1.0), 4, 1.5)
    np.testing.assert_array_equal(nv_circuit_params(s, "named")[:4], s.gammas)
    np.testing.assert_array_equal(nv_circuit_params(s, "literal")[:4], s.times)
    with pytest.raises(ValueError):
        nv_circuit_params(s, "sideways")


@pytest.mark.parametrize("binding", ["named", "literal"])
def test_nv_jacobian_finite_differences(binding):
    hp = np.array([0.4, 2.2, 1.3])
    p, sigma = 5, 1.7

    def angles(x):
        return nv_circuit_params(nv_schedule(NVHyperparams(*x), p, sigma), binding)

    J = nv_jacobian(NVHyperparams(*hp), p, sigma, binding)
    fd = np.column_stack([(angles(hp + e) - angles(hp - e)) / 2e-6 for e in np.eye(3) * 1e-6])
    np.testing.assert_allclose(J, fd, atol=1e-8)


@pytest.mark.parametrize("binding", ["named", "literal"])
def test_nv_cost_grad_matches_direct_and_fd(binding):
    rng = stream(8, "nv-grad", binding)
    for _ in range(20):
        g = gen_er(int(rng.integers(2, 5)), 0.7, int(rng.integers(1 << 30)))
        if g.m == 0:
            continue
        t = build_quality_table(g)
        p = int(rng.integers(2, 5))
        x = np.array([rng.uniform(0.1, 0.9), rng.uniform(0, 6), rng.uniform(0, 6)])
        hp = NVHyperparams(*x)
        c, grad = nv_cost_grad(hp, t, p, binding)
        theta = nv_circuit_params(nv_schedule(hp, p, t.sigma), binding)
        direct = -gradient_adjoint(qwoa_circuit(g.n, p), theta, t)
        np.testing.assert_allclose(grad, nv_jacobian(hp, p, t.sigma, binding).T @ direct, atol=1e-12)
        fd = central_difference(lambda y: nv_cost_grad(NVHyperparams(*y), t, p, binding)[0], x)
        assert np.max(np.abs(grad - fd)) <= 1e-6 * max(1.0, np.max(np.abs(fd)))
        assert c == pytest.approx(cost(qwoa_circuit(g.n, p), theta, t))


def test_nv_gamma_zero():
    t = build_quality_table(path_graph(4))
    c, grad = nv_cost_grad(NVHyperparams(0.4, 0.0, 1.1), t, 6)
    assert c == pytest.approx(-t.mu)
    assert abs(grad[0]) < 1e-12 and abs(grad[2]) < 1e-12


def test_augmented_circuit_layout_and_identity_start():
    aux = build_quality_table(path_graph(4))
    target = build_quality_table(gen_regular(4, 3, 0))
    bundle = PretrainBundle(4, 3, random_init(3, 1), 0.5, 1, 1)
    circuit, x0 = build_augmented(bundle, target)
    assert circuit.num_params == 9 and np.all(x0[6:] == 0)
    # plain QWOA whose phase gates are pinned to the path-graph table
    aux_circuit = CircuitSpec(4, 3, tuple(
        Gate(g.kind, g.param, table=aux if g.kind == "phase" else None, label=g.label)
        for g in qwoa_circuit(4, 3).gates))
    assert cost(circuit, x0, target) == cost(aux_circuit, bundle.aux_params, target)
    aux_circuit = qwoa_circuit(4, 3)
    assert cost(circuit, x0, aux) == pytest.approx(cost(aux_circuit, bundle.aux_params, aux), abs=1e-12)
    with pytest.raises(ValueError):
        build_augmented(bundle, build_quality_table(path_graph(5)))


def test_augmented_matches_dense_oracle_and_gradient():
    aux = build_quality_table(path_graph(3))
    target = build_quality_table(Graph(3, ((0, 1), (1, 2), (0, 2))))
    circuit = augmented_circuit(aux, 2)
    x = stream(2, "aug").uniform(0, 2 * np.pi, 6)
    psi = dense_circuit_state(circuit, x, {"target": target})
    assert -cost(circuit, x, target) == pytest.approx(dense_expectation(psi, target.values), abs=1e-12)
    fd = central_difference(lambda y: -cost(circuit, y, target), x)
    np.testing.assert_allclose(gradient_adjoint(circuit, x, target), fd, atol=1e-7)


def test_pretrain_small_and_bundle_roundtrip(tmp_path):
    b = pretrain_path_graph(2, 4, seed=0)
    assert b.aux_approx_ratio >= 0.999 and len(b.aux_params) == 8
    b.save(tmp_path / "b.json")
    b2 = PretrainBundle.load(tmp_path / "b.json")
    assert b2.aux_n == 2 and b2.depth == 4 and b2.aux_approx_ratio == b.aux_approx_ratio
    np.testing.assert_array_equal(b2.aux_params, b.aux_params)


def test_pretrain_gives_up():
    with pytest.raises(PretrainingFailed) as info:
        pretrain_path_graph(6, 1, seed=0, opt=OptimizerConfig(max_iters=3), max_restarts=2)
    assert info.value.best_ratio < 0.999


def test_augmented_on_auxiliary_keeps_ratio():
    b = pretrain_path_graph(4, 6, seed=3)
    aux = build_quality_table(path_graph(4))
    circuit, x0 = build_augmented(b, aux)
    _, trace = minimize(value_and_grad(circuit, aux), x0, OptimizerConfig(max_iters=50, bounds=angle_bounds(18)))
    assert -trace.costs[-1] / aux.q_max >= b.aux_approx_ratio - 1e-12


def test_mixer_diagnostics_single_edge():
    t = build_quality_table(Graph(2, ((0, 1),)))
    tt = math.pi / 8
    d = mixer_diagnostics(t, tt)
    assert d.phase_residual < 1e-15
    np.testing.assert_array_equal(d.sphere_sizes, [1, 2, 1])
    # sphere of radius 1 around 00 is {01, 10}: both cut
    np.testing.assert_allclose(d.sphere_means[:, 0], [0, 1, 0])
    np.testing.assert_allclose(d.alphas, [0, 2, 0], atol=1e-12)
    np.testing.assert_allclose(d.fit_residuals, 0, atol=1e-12)
    assert d.monotone  # over delta up to n/2 = 1


def test_mixer_diagnostics_regular_graph():
    n = 10
    t = build_quality_table(gen_regular(n, 3, 17))
    d = mixer_diagnostics(t, 0.3)
    assert d.phase_residual < 1e-10 and d.monotone
    delta = np.arange(n + 1)
    # MaxCut on any graph: alpha_d = 4 d (n - d) / (n (n - 1)), exact fit
    np.testing.assert_allclose(d.alphas, 4 * delta * (n - delta) / (n * (n - 1)), atol=1e-10)
    np.testing.assert_allclose(d.fit_residuals, 0, atol=1e-10)
    assert d.sphere_sizes.sum() == 2**n


def test_sphere_means_brute_force():
    g = gen_er(6, 0.5, 2)
    t = build_quality_table(g)
    d = mixer_diagnostics(t, 0.2)
    pop = np.array([bin(i).count("1") for i in range(64)])
    for x in (0, 13, 42):
        for delta in range(7):
            members = [y for y in range(64) if pop[x ^ y] == delta]
            assert d.sphere_means[delta, x] == pytest.approx(t.values[members].mean(), abs=1e-12)


def test_krawtchouk_small():
    np.testing.assert_array_equal(krawtchouk(2), [[1, 1, 1], [2, 0, -2], [1, -1, 1]])


@pytest.mark.parametrize("t_small", [0.1, 0.5, 1.0])
def test_phase_linearity_binary_mixer(t_small):
    t = build_quality_table(gen_er(8, 0.4, 1))
    assert mixer_diagnostics(t, t_small).phase_residual < 1e-10


def test_mixer_diagnostics_limits():
    t = build_quality_table(path_graph(3))
    with pytest.raises(ValueError):
        mixer_diagnostics(t, 2.0)
    with pytest.raises(ValueError):
        mixer_diagnostics(t, 0.1, max_n=2)


def test_nv_bounds_shape():
    assert NV_BOUNDS.shape == (3, 2) and NV_BOUNDS[0, 0] > 0 and NV_BOUNDS[0, 1] < 1
