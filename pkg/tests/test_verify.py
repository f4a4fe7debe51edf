import math

import numpy as np
import pytest

from kolmo import (
    KernelContext,
    ManufacturedProblem,
    Point,
    apply_L_fd,
    convolve_solution,
    cutoff_eta,
    cutoff_gradient_report,
    gamma,
    harmonic_family,
    manufacture,
    verify_apriori,
    verify_invariance,
    verify_mean_value,
    verify_schauder_const,
    verify_schauder_var,
    verify_singular_bounds,
)
from kolmo.errors import (
    ApplicabilityError,
    DomainError,
    EllipticityError,
)
from kolmo.verify import _FAMILIES


def test_apply_L_fd_on_monomial(kspec):
    # L x1^2 = 2 a11 = 2 for the kinetic operator (drift term vanishes)
    val = apply_L_fd(kspec, lambda z: z.x[0] ** 2, Point([0.3, 0.2], 0.1))
    assert abs(val - 2.0) < 1e-8


def test_apply_L_fd_kills_kernel(kctx):
    p = Point([0.1, -0.2], -1.0)
    z = Point([0.3, 0.4], 0.2)
    val = apply_L_fd(kctx.spec, lambda w: gamma(kctx, w, p), z)
    assert abs(val) < 1e-6


def test_manufacture_families(kspec, drifted):
    for spec in (kspec, drifted):
        for fam in sorted(_FAMILIES):
            prob = manufacture(fam, spec)
            assert prob.details["fd_validation_worst"] < 1e-6
    with pytest.raises(DomainError):
        manufacture("nope", kspec)


def test_manufacture_varcoeff(kspec):
    prob = manufacture("gaussian", kspec, varcoeff_id="sin1")
    assert prob.varcoeff is not None and prob.omega_a is not None
    z = Point([0.5, 0.0], 0.0)
    assert abs(prob.varcoeff(z)[0, 0] - (1.0 + 0.25 * math.sin(0.5))) < 1e-14
    with pytest.raises(DomainError):
        manufacture("gaussian", kspec, varcoeff_id="sin9")


def test_cutoff_profile(kspec):
    exps = kspec.exponents()
    assert cutoff_eta(0.5, Point([0.0, 0.0], 0.0), exps) == 1.0
    assert cutoff_eta(0.5, Point([0.3, 0.0], 0.0), exps) == 1.0  # inside 3R/4
    assert cutoff_eta(0.5, Point([0.6, 0.0], 0.0), exps) == 0.0
    mid = cutoff_eta(0.5, Point([0.45, 0.0], 0.0), exps)
    assert 0.0 < mid < 1.0
    with pytest.raises(DomainError):
        cutoff_eta(2.0, Point([0.0, 0.0], 0.0), exps)


def test_cutoff_gradient_scaling_stable(kspec):
    out = cutoff_gradient_report(kspec, samples=150)
    for i in range(kspec.N):
        vals = [out[R]["first_scaled"][i] for R in out]
        assert max(vals) <= 4.0 * min(vals)


def test_harmonic_family_poles_below_cylinder(kctx):
    rng = np.random.default_rng(0)
    for R in (1.0, 0.25):
        for p in harmonic_family(kctx, R, 10, rng):
            assert -3.0 * R * R <= p.t <= -2.0 * R * R


def test_convolution_duhamel_time_only(heat):
    # f = f(tau) only: u(z) = -int_{t_lo}^{t} f, since the mass is 1
    ctx = KernelContext(heat)
    z = Point([0.2], 0.5)
    val = convolve_solution(ctx, lambda zeta: math.cos(zeta.t), z, t_lo=-0.5)
    assert abs(val - (-(math.sin(0.5) - math.sin(-0.5)))) < 1e-9


def test_convolution_reconstructs_manufactured(kctx):
    # narrow-in-time solution: u(., t_lo) ~ 1e-19, so u = -Gamma * f
    prob = manufacture("gaussian-narrow", kctx.spec)
    z = Point([0.0, 0.0], 0.0)
    val = convolve_solution(kctx, prob.f, z, t_lo=-1.0)
    assert abs(val - prob.u.u(z)) < 1e-5


def test_verify_apriori(kctx):
    rep = verify_apriori(kctx, poles=8, samples=25)
    assert rep.verdict and math.isfinite(rep.fitted_constant)
    for cell in rep.details["per_group"].values():
        assert set(cell) == {"grad_alpha1", "grad_alpha3", "second", "Y"}


def test_verify_mean_value(kctx):
    rep = verify_mean_value(kctx, poles=8, samples=40)
    assert rep.verdict and 0.0 < rep.fitted_constant < 10.0


def test_verify_singular_bounds_const(kctx):
    rep = verify_singular_bounds(kctx, "const", samples=3)
    assert rep.verdict
    assert rep.details["expected_dyadic_step"] == 1.0
    with pytest.raises(DomainError):
        verify_singular_bounds(kctx, "g3")


def test_schauder_const_report(kctx):
    prob = manufacture("gaussian", kctx.spec)
    rep = verify_schauder_const(kctx, prob, pair_samples=400)
    assert rep.verdict and math.isfinite(rep.fitted_constant)
    assert rep.samples > 100
    assert "ratio" in rep.to_json_dict()["ratios_csv"]


def test_schauder_const_rejects_varcoeff(kctx):
    prob = manufacture("gaussian", kctx.spec, varcoeff_id="sin1")
    with pytest.raises(ApplicabilityError):
        verify_schauder_const(kctx, prob)


def test_schauder_var_matches_const_without_coefficients(kctx):
    prob = manufacture("gaussian2", kctx.spec)
    a = verify_schauder_const(kctx, prob, pair_samples=300)
    b = verify_schauder_var(kctx, prob, pair_samples=300)
    assert b.name == "schauder-const"
    assert abs(a.fitted_constant - b.fitted_constant) <= 1e-10


def test_schauder_var_with_coefficients(kctx):
    prob = manufacture("gaussian", kctx.spec, varcoeff_id="sin1x2")
    rep = verify_schauder_var(kctx, prob, pair_samples=300)
    assert rep.name == "schauder-var"
    assert rep.verdict and rep.details["eta_sup"] > 0.0


def test_ellipticity_loss_detected(kctx):
    prob = manufacture("gaussian", kctx.spec)
    bad = ManufacturedProblem(
        u=prob.u, f=prob.f, spec=prob.spec,
        varcoeff=lambda z: np.array([[-1.0]]),
        omega_a=prob.omega_a, family_id=prob.family_id,
    )
    with pytest.raises(EllipticityError):
        verify_schauder_var(kctx, bad, pair_samples=300)


def test_invariance_principal(kctx):
    rep = verify_invariance(kctx, samples=15)
    assert rep.verdict
    assert rep.details["dilation_checked"]
    assert rep.scaling["left"] < 1e-5 and rep.scaling["dilation"] < 1e-5


def test_invariance_generic_drift(drifted):
    ctx = KernelContext(drifted)
    rep = verify_invariance(ctx, samples=15)
    assert rep.verdict and not rep.details["dilation_checked"]
    with pytest.raises(ApplicabilityError):
        verify_invariance(ctx, samples=5, include_dilation=True)
