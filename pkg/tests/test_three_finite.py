import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

import fokas_heat as fh
from fokas_heat._field import Numerics
from fokas_heat.oracles import crank_nicolson, make_grid, single_medium_neumann_series
from fokas_heat.solver_finite import (
    delta_three_finite,
    delta_three_finite_real_form,
    eval_three_finite,
    solve_three_finite,
)


def total_heat(sol, t):
    cfg = sol.config
    xg, wg = leggauss(24)
    tot = 0.0
    for i, layer in enumerate(cfg.layers):
        edges = np.linspace(layer.x_lo, layer.x_hi, 30)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            xq = 0.5 * (e0 + e1) + 0.5 * (e1 - e0) * xg
            tot += float(np.sum(0.5 * (e1 - e0) * wg * sol.values_in_layer(i, xq, t)))
    return tot


def test_delta_zero_at_origin_and_real_zeros():
    d = delta_three_finite(1.0, 0.7, 1.4, 1.0, 1.0, 2.0, "left")
    assert abs(d(0.0)) < 1e-12
    g = delta_three_finite_real_form(1.0, 0.7, 1.4, 1.0, 1.0, 2.0)
    # the exponential-sum and trigonometric forms describe the same zeros:
    # scan for sign changes of g and confirm |delta| dips there
    ks = np.linspace(1e-3, 6, 4000)
    gv = g(ks)
    roots = ks[:-1][np.sign(gv[:-1]) != np.sign(gv[1:])]
    assert roots.size >= 3
    for k0 in roots[:3]:
        assert abs(d(k0)) < 1e-2 * max(1.0, abs(d(k0 + 0.3)))


def test_delta_equal_sigma_single_slab_eigenvalues():
    # equal sigmas: zeros of the insulated composite slab must be the
    # single-medium values n pi / (a + c)
    sig, a, b, c = 0.9, 1.0, 1.0, 2.0
    g = delta_three_finite_real_form(sig, sig, sig, a, b, c)
    for n in range(1, 5):
        assert abs(g(n * np.pi / (a + c))) < 1e-12


def test_delta_bounded_on_contours():
    from fokas_heat.contours import build_contour

    d = delta_three_finite(1.0, 0.7, 1.4, 1.0, 1.0, 2.0, "left")
    for half in ("upper", "lower"):
        cc = build_contour(half, 0.7, 0.05, x_scale=8.0, avoid_origin=True, r=1.0)
        dv, _ = d.eval_scaled(cc.nodes, half)
        assert np.min(np.abs(dv)) > 1e-12 * np.max(np.abs(dv))


def test_zero_data_zero_field():
    cfg = fh.three_finite(1.0, 0.7, 1.4, 1.0, 1.0, 2.0)
    sol = solve_three_finite(cfg, "full")
    for x in (-0.5, 0.5, 1.5):
        assert sol.value(x, 0.2) == pytest.approx(0.0, abs=1e-13)


def test_restricted_requires_restricted_data(three_finite_full_config):
    with pytest.raises(fh.FokasHeatError):
        solve_three_finite(three_finite_full_config, "restricted")


def test_equal_sigma_matches_cosine_series():
    a, b, c = 1.0, 1.0, 2.0
    sig = 0.9
    prof = lambda x: np.cos(np.pi * (x + 1) / 3)
    cfg = fh.three_finite(
        sig,
        sig,
        sig,
        a,
        b,
        c,
        left_initial=fh.SampledInterval(prof, -a, 0.0),
        middle_initial=fh.SampledInterval(prof, 0.0, b),
        right_initial=fh.SampledInterval(prof, b, c),
    )
    sol = solve_three_finite(cfg, "full")
    ser = single_medium_neumann_series(prof, sig, -a, c, n_modes=60)
    xs = np.array([-0.9, -0.4, 0.0, 0.3, 0.8, 1.0, 1.3, 1.9])
    for t in (0.05, 0.2, 1.0):
        assert np.max(np.abs(sol.values(xs, t) - ser(xs, t))) < 1e-6


def test_heat_conserved(three_finite_full_config):
    sol = solve_three_finite(three_finite_full_config, "full")
    heats = [total_heat(sol, t) for t in (0.01, 0.05, 0.2, 1.0)]
    scale = max(abs(h) for h in heats)
    assert (max(heats) - min(heats)) / scale < 1e-6


def test_interface_conditions(three_finite_config):
    cfg = three_finite_config
    sol = solve_three_finite(cfg, "restricted")
    t = 0.2
    for xi, (l1, l2) in ((0.0, (0, 1)), (1.0, (1, 2))):
        ul = sol.values_in_layer(l1, np.array([xi]), t)[0]
        ur = sol.values_in_layer(l2, np.array([xi]), t)[0]
        assert abs(ul - ur) < 1e-8 * max(1.0, abs(ul))
        fl = cfg.layers[l1].sigma ** 2 * sol.derivative(xi, t, layer=l1)
        fr = cfg.layers[l2].sigma ** 2 * sol.derivative(xi, t, layer=l2)
        assert fl == pytest.approx(fr, rel=2e-4, abs=1e-9)


def test_insulated_ends(three_finite_config):
    sol = solve_three_finite(three_finite_config, "restricted")
    for t in (0.05, 0.5):
        assert abs(sol.derivative(-1.0, t, layer=0)) < 1e-4
        assert abs(sol.derivative(2.0, t, layer=2)) < 1e-4


def test_crank_nicolson_agreement(three_finite_full_config):
    cfg = three_finite_full_config
    sol = solve_three_finite(cfg, "full")
    t = 0.2
    xs = np.array([-0.9, -0.4, 0.0, 0.3, 0.8, 1.0, 1.3, 1.9])
    grid = make_grid(cfg, 1400, t_end=t, dt=t / 1500)
    fd = crank_nicolson(cfg, grid, t)
    assert np.max(np.abs(sol.values(xs, t) - fd.interp(t, xs))) < 2e-4


def test_reflection_symmetry(three_finite_full_config):
    cfg = three_finite_full_config
    b = cfg.layers[1].x_hi
    sol = solve_three_finite(cfg, "full")
    msol = solve_three_finite(fh.mirrored(cfg), "full")
    xs = np.array([-0.9, -0.3, 0.2, 0.9, 1.2, 1.9])
    t = 0.2
    np.testing.assert_allclose(sol.values(xs, t), msol.values(b - xs, t), atol=1e-9)


def test_long_time_limit_is_mean(three_finite_config):
    # insulated slab relaxes to the conserved mean of the initial data
    cfg = three_finite_config
    sol = solve_three_finite(cfg, "restricted")
    xs = np.linspace(-1, 0, 3001)
    mean = np.trapezoid(np.real(cfg.initial_data[0](xs)), xs) / 3.0
    for x in (-0.5, 0.5, 1.5):
        assert sol.value(x, 1e3) == pytest.approx(mean, abs=1e-7)


def test_arc_radius_independence(three_finite_config):
    xs = np.array([-0.5, 0.5, 1.5])
    t = 0.2
    vals = [
        solve_three_finite(three_finite_config, "restricted", Numerics(arc_radius=r)).values(xs, t)
        for r in (0.5, 1.0, 2.0)
    ]
    assert np.max(np.abs(vals[0] - vals[1])) < 1e-8
    assert np.max(np.abs(vals[2] - vals[1])) < 1e-8


def test_eval_wrapper(three_finite_config):
    sol = solve_three_finite(three_finite_config, "restricted")
    assert eval_three_finite(sol, 1.5, 0.2).layer_index == 2
