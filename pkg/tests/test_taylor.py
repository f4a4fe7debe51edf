import numpy as np
import pytest
from scipy.optimize import brentq

from kolmo import (
    Point,
    compose,
    connect,
    coordinate_bundle,
    dilate,
    endpoint_error,
    flow_X,
    flow_Y,
    gamma_traj,
    gaussian_bundle,
    lie_derivative_fd,
    origin,
    quadratic_bundle,
    remainder_profile,
    taylor2,
    traj_increment,
    validate_bundle,
    verify_plan,
)
from kolmo.errors import DomainError, NonConvergenceError, PlanIntegrityError
from kolmo.group import sample_ball
from kolmo.taylor import PathSegment


def test_flows_closed_forms(kinetic):
    z = Point([1.0, 2.0], 3.0)
    moved = flow_X([1.0, 0.0], -0.5, z)
    assert moved == Point([0.5, 2.0], 3.0)
    # exp(sB) = I + sB for the nilpotent kinetic drift
    arc = flow_Y(2.0, z, kinetic)
    assert np.abs(arc.x - np.array([1.0, 4.0])).max() < 1e-14
    assert arc.t == 1.0


def test_gamma_traj_level1_closed_forms(kinetic, drifted):
    # nilpotent drift: gamma^(1) moves the second level by exactly s^3
    for s in (0.7, -1.3):
        end, trace = gamma_traj(1, np.array([1.0, 0.0]), s, Point([0.0, 5.0], 0.0),
                                kinetic)
        assert len(trace) == 4
        assert np.abs(end.x - np.array([0.0, 5.0 + s**3])).max() < 1e-12
        assert end.t == 0.0
    # generic drift: displacement s(1 - e^{-s^2}) in both coordinates
    for s in (0.9, -1.1):
        end, _ = gamma_traj(1, np.array([1.0, 0.0]), s, Point([0.0, 4.0], 0.0),
                            drifted)
        d = s * (1.0 - np.exp(-s * s))
        assert np.abs(end.x - np.array([d, 4.0 + d])).max() < 1e-12


def test_traj_increment_matches_execution(kinetic, drifted, kappa2):
    rng = np.random.default_rng(0)
    for spec in (kinetic, drifted, kappa2):
        for _ in range(20):
            n = int(rng.integers(0, spec.kappa + 1))
            v = np.zeros(spec.N)
            v[: spec.m] = rng.standard_normal(spec.m)
            s = rng.uniform(-1.2, 1.2)
            z = Point(rng.uniform(-1, 1, size=spec.N), rng.uniform(-1, 1))
            end, _ = gamma_traj(n, v, s, z, spec)
            assert np.abs((end.x - z.x) - traj_increment(n, v, s, spec)).max() < 1e-12
            assert abs(end.t - z.t) < 1e-14


def test_traj_increment_preserves_lower_levels(kappa2):
    # principal drift: gamma^(n) leaves levels below n untouched
    rng = np.random.default_rng(1)
    for _ in range(200):
        n = int(rng.integers(1, 3))
        v = np.zeros(3)
        v[0] = rng.standard_normal()
        s = rng.uniform(-1.5, 1.5)
        d = traj_increment(n, v, s, kappa2)
        assert np.abs(d[:n]).max() < 1e-12 * max(1.0, np.abs(d).max())
        # and moves level n by exactly s^{2n+1} B^n v
        want = s ** (2 * n + 1) * (np.linalg.matrix_power(kappa2.B, n) @ v)
        assert abs(d[n] - want[n]) < 1e-12 * max(1.0, abs(want[n]))


def test_connect_example_nilpotent(kinetic):
    # closed form: s0 = -x, s1 = (-t x - y)^{1/3}
    plan = connect(Point([1.0, 1.0], 1.0), origin(2), kinetic)
    assert plan.achieved_error <= 1e-12
    kinds = [seg.kind for seg in plan.segments]
    assert kinds == ["Y", "X", "X", "Y", "X", "Y"]
    assert abs(plan.segments[0].s - 1.0) < 1e-14  # time match
    assert abs(plan.segments[1].s - (-1.0)) < 1e-14  # s0 = -x
    s1 = plan.segments[2].s
    assert abs(s1 + 2.0 ** (1.0 / 3.0)) < 1e-12  # s1 = (-2)^{1/3}
    check = verify_plan(plan, kinetic)
    assert check["ok"] and check["endpoint_error"] <= 1e-12


def test_connect_example_generic_drift(drifted):
    # level equation s (1 - e^{-s^2}) = -2, bisection against brentq
    plan = connect(Point([0.0, 2.0], 0.0), origin(2), drifted)
    assert plan.achieved_error <= 1e-9
    s = plan.segments[0].s
    assert abs(s * (1.0 - np.exp(-s * s)) + 2.0) <= 1e-10
    oracle = brentq(lambda u: u * (1.0 - np.exp(-u * u)) + 2.0, -3.0, -1.0,
                    xtol=1e-13)
    assert abs(s - oracle) < 1e-9
    assert verify_plan(plan, drifted)["ok"]


def test_connect_random_principal(kspec, kappa2):
    rng = np.random.default_rng(2)
    for spec in (kspec, kappa2):
        for _ in range(100):
            z = Point(rng.uniform(-2, 2, size=spec.N), rng.uniform(-2, 2))
            zeta = Point(rng.uniform(-2, 2, size=spec.N), rng.uniform(-2, 2))
            plan = connect(z, zeta, spec)
            assert plan.achieved_error <= 1e-12
            assert verify_plan(plan, spec)["ok"]


def test_connect_random_generic(drifted):
    rng = np.random.default_rng(3)
    for _ in range(30):
        z = Point(rng.uniform(-1.5, 1.5, size=2), rng.uniform(-1.5, 1.5))
        zeta = Point(rng.uniform(-1.5, 1.5, size=2), rng.uniform(-1.5, 1.5))
        plan = connect(z, zeta, drifted)
        assert plan.achieved_error <= 1e-9


def test_connect_trivial_and_nonconvergence(kspec, drifted):
    z = Point([0.4, -0.2], 0.1)
    assert connect(z, z, kspec).segments == []
    with pytest.raises(NonConvergenceError) as err:
        connect(Point([0.0, 2.0], 0.0), origin(2), drifted, tol=0.0, max_iters=2)
    assert err.value.plan is not None


def test_verify_plan_detects_tampering(kspec):
    plan = connect(Point([1.0, 1.0], 1.0), origin(2), kspec)
    seg = plan.segments[1]
    plan.segments[1] = PathSegment(kind=seg.kind, v=seg.v, s=seg.s + 0.1,
                                   start=seg.start, end=seg.end)
    with pytest.raises(PlanIntegrityError):
        verify_plan(plan, kspec)


def test_bundle_derivatives_fd(kspec, drifted):
    rng = np.random.default_rng(4)
    for spec in (kspec, drifted):
        pts = sample_ball(spec, 1.0, 15, rng)
        for bundle in (
            quadratic_bundle(spec, c0=0.3, a=[0.5], H=[[1.2]], bt=-0.7),
            coordinate_bundle(spec, 1),
            gaussian_bundle(spec, center_x=[0.1, -0.2], width_x=0.9,
                            width_t=0.6, amplitude=1.3),
        ):
            assert validate_bundle(bundle, spec, pts) < 1e-6


def test_lie_derivative_fd(kspec):
    bundle = gaussian_bundle(kspec, width_t=0.5)
    z = Point([0.3, -0.4], 0.2)
    assert abs(lie_derivative_fd(bundle.u, z, kspec) - bundle.Yu(z)) < 1e-8
    with pytest.raises(DomainError):
        lie_derivative_fd(bundle.u, z, kspec, h=0.0)


def test_taylor_exact_on_quadratics(kspec, kappa2):
    # intrinsic degree <= 2: constants, first-level linears/quadratics, t
    rng = np.random.default_rng(5)
    for spec in (kspec, kappa2):
        bundle = quadratic_bundle(spec, c0=1.0, a=0.7 * np.ones(spec.m),
                                  H=1.5 * np.eye(spec.m), bt=-0.3)
        for _ in range(50):
            z = Point(rng.uniform(-1, 1, size=spec.N), rng.uniform(-1, 1))
            zeta = Point(rng.uniform(-1, 1, size=spec.N), rng.uniform(-1, 1))
            rem = bundle.u(zeta) - taylor2(bundle, z, zeta, spec)
            assert abs(rem) < 1e-13


def test_taylor_forms_coincide_when_top_row_vanishes(kspec):
    bundle = gaussian_bundle(kspec)
    z = Point([0.2, 0.1], -0.1)
    zeta = Point([-0.3, 0.4], 0.2)
    a = taylor2(bundle, z, zeta, kspec, form="group")
    b = taylor2(bundle, z, zeta, kspec, form="euclidean")
    assert a == b
    with pytest.raises(DomainError):
        taylor2(bundle, z, zeta, kspec, form="weird")


def test_remainder_second_order_decay(kspec):
    exps = kspec.exponents()
    bundle = gaussian_bundle(kspec, center_x=[0.3, -0.1], width_x=0.8,
                             width_t=0.5)
    z = Point([0.1, 0.05], 0.02)
    direction = Point([0.8, -0.6], 0.7)

    def path(rho):
        return compose(z, dilate(rho, direction, exps), kspec)

    rhos = [2.0**-k for k in range(3, 10)]
    prof = remainder_profile(bundle, z, path, rhos, kspec)
    ratios = [r for _, r in prof]
    for a, b in zip(ratios, ratios[1:]):
        assert a >= 1.5 * b  # remainder / rho^2 keeps shrinking


def test_euclidean_vs_group_discrepancy_quadratic(drifted):
    # the two forms differ by O(||.||^2) when the top block row is nonzero
    exps = drifted.exponents()
    bundle = gaussian_bundle(drifted, center_x=[0.2, 0.3], width_x=0.9)
    z = Point([0.4, 0.2], 0.1)
    direction = Point([0.5, 0.7], 0.9)
    consts = []
    for rho in [2.0**-k for k in range(3, 9)]:
        zeta = compose(z, dilate(rho, direction, exps), drifted)
        diff = abs(taylor2(bundle, z, zeta, drifted, form="euclidean")
                   - taylor2(bundle, z, zeta, drifted, form="group"))
        consts.append(diff / rho**2)
    assert max(consts) < 50.0
    assert max(consts) < 4.0 * min(consts)


def test_endpoint_error_metric():
    a = Point([1.0, 2.0], 3.0)
    b = Point([1.0, 2.5], 3.25)
    assert endpoint_error(a, b) == 0.5
