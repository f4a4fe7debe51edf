import numpy as np
import pytest

from kolmo import (
    Point,
    compose,
    dilate,
    estimate_triangle_constant,
    hormander_check,
    inverse,
    kdist,
    knorm,
    load_spec,
    make_spec,
    origin,
    principal_B,
    sample_ball,
    scaled_B,
)
from kolmo.errors import DomainError, EllipticityError, SolveError, StructureError
from kolmo.group import compose_r, level_map_solve, project_level


def _random_point(rng, N, scale=1.5):
    return Point(rng.uniform(-scale, scale, size=N), rng.uniform(-scale, scale))


def test_kolmogorov_exponents(kspec):
    exps = kspec.exponents()
    assert exps.alpha == (1, 3)
    assert exps.Q == 4
    assert exps.Qplus2 == 6
    assert kspec.is_dilation_invariant()


def test_rank_deficient_subdiagonal_rejected():
    # zero B_1 block cannot span the second level
    with pytest.raises(StructureError, match="level 1"):
        make_spec(np.eye(1), np.zeros((2, 2)), (1, 1))


def test_structure_rejects_below_subdiagonal_block(kappa2):
    B = np.array(kappa2.B)
    B[2, 0] = 0.5
    with pytest.raises(StructureError, match=r"\(2,0\)"):
        make_spec(np.eye(1), B, (1, 1, 1))


def test_bad_A_rejected():
    B = np.array([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(EllipticityError):
        make_spec(np.array([[-1.0]]), B, (1, 1))
    with pytest.raises(StructureError):
        make_spec(np.eye(2), B, (1, 1))  # wrong A shape for m = 1


def test_block_sizes_must_not_increase():
    with pytest.raises(StructureError):
        make_spec(np.eye(1), np.zeros((3, 3)), (1, 2))


def test_load_spec_declared_shape_mismatch(tmp_path):
    with pytest.raises(StructureError):
        load_spec({"N": 3, "A": [[1.0]], "B": [[0.0, 0.0], [1.0, 0.0]],
                   "blocks": [1, 1]})


def test_group_axioms_random_triples(drifted):
    rng = np.random.default_rng(0)
    e = origin(drifted.N)
    worst = 0.0
    for _ in range(1000):
        z = _random_point(rng, drifted.N)
        zeta = _random_point(rng, drifted.N)
        w = _random_point(rng, drifted.N)
        lhs = compose(compose(z, zeta, drifted), w, drifted)
        rhs = compose(z, compose(zeta, w, drifted), drifted)
        worst = max(worst, np.abs(lhs.x - rhs.x).max(), abs(lhs.t - rhs.t))
        ze = compose(z, e, drifted)
        ez = compose(e, z, drifted)
        worst = max(worst, np.abs(ze.x - z.x).max(), np.abs(ez.x - z.x).max())
        zi = compose(z, inverse(z, drifted), drifted)
        worst = max(worst, np.abs(zi.x).max(), abs(zi.t))
    assert worst < 1e-11


def test_dilation_distributes_for_principal_drift(kspec, kappa2):
    rng = np.random.default_rng(1)
    for spec in (kspec, kappa2):
        exps = spec.exponents()
        worst = 0.0
        for _ in range(500):
            z = _random_point(rng, spec.N)
            zeta = _random_point(rng, spec.N)
            r = float(np.exp(rng.uniform(-1.5, 1.5)))
            lhs = dilate(r, compose(z, zeta, spec), exps)
            rhs = compose(dilate(r, z, exps), dilate(r, zeta, exps), spec)
            worst = max(worst, np.abs(lhs.x - rhs.x).max(), abs(lhs.t - rhs.t))
        assert worst < 1e-11


def test_dilation_fails_for_generic_drift(drifted):
    exps = drifted.exponents()
    z = Point([1.0, 1.0], 1.0)
    r = 0.5
    lhs = dilate(r, compose(z, z, drifted), exps)
    rhs = compose(dilate(r, z, exps), dilate(r, z, exps), drifted)
    assert np.abs(lhs.x - rhs.x).max() >= 1e-3


def test_kdist_left_invariance(kspec, drifted):
    rng = np.random.default_rng(2)
    for spec in (kspec, drifted):
        worst = 0.0
        for _ in range(300):
            z = _random_point(rng, spec.N, 1.0)
            zeta = _random_point(rng, spec.N, 1.0)
            g = _random_point(rng, spec.N, 1.0)
            d0 = kdist(z, zeta, spec)
            d1 = kdist(compose(g, z, spec), compose(g, zeta, spec), spec)
            worst = max(worst, abs(d0 - d1))
        assert worst < 1e-12


def test_knorm_homogeneous_degree_one(kappa2):
    exps = kappa2.exponents()
    rng = np.random.default_rng(3)
    for _ in range(100):
        z = _random_point(rng, kappa2.N)
        r = float(np.exp(rng.uniform(-2.0, 2.0)))
        assert abs(knorm(dilate(r, z, exps), exps) - r * knorm(z, exps)) < 1e-12


def test_dilate_rejects_nonpositive_scale(kspec):
    with pytest.raises(DomainError):
        dilate(0.0, origin(2), kspec.exponents())


def test_covariance_positivity_hormander(kspec, kappa2):
    for spec in (kspec, kappa2):
        rep = hormander_check(spec, 1.0)
        assert rep.is_spd and rep.min_eigenvalue > 0.0


def test_kolmogorov_covariance_min_eigenvalue(kspec):
    # eigenvalues of [[1, 1/2], [1/2, 1/3]] are (4 +- sqrt(13)) / 6
    rep = hormander_check(kspec, 1.0)
    assert abs(rep.min_eigenvalue - (4.0 - np.sqrt(13.0)) / 6.0) < 1e-10


def test_scaled_B_endpoints(drifted):
    assert np.abs(scaled_B(drifted, 1.0) - drifted.B).max() == 0.0
    assert np.abs(scaled_B(drifted, 0.0) - principal_B(drifted)).max() == 0.0
    with pytest.raises(DomainError):
        scaled_B(drifted, 1.5)


def test_compose_r_matches_compose_at_one(drifted):
    rng = np.random.default_rng(4)
    z = _random_point(rng, 2)
    zeta = _random_point(rng, 2)
    a = compose_r(z, zeta, drifted, 1.0)
    b = compose(z, zeta, drifted)
    assert np.abs(a.x - b.x).max() < 1e-14 and a.t == b.t


def test_level_map_solve_reaches_target(kappa2):
    rng = np.random.default_rng(5)
    for n in (1, 2):
        target = rng.standard_normal(kappa2.N)
        w = level_map_solve(kappa2, n, target)
        assert np.abs(project_level(w, 0, kappa2.blocks) - w).max() == 0.0
        reached = np.linalg.matrix_power(kappa2.B, n) @ w
        sl = kappa2.blocks.level_slice(n)
        assert np.abs(reached[sl] - target[sl]).max() < 1e-10


def test_level_map_solve_bad_level(kspec):
    with pytest.raises(DomainError):
        level_map_solve(kspec, 2, np.zeros(2))


def test_sample_ball_stays_in_quasi_ball(kspec):
    exps = kspec.exponents()
    rng = np.random.default_rng(6)
    for z in sample_ball(kspec, 0.5, 200, rng):
        assert knorm(z, exps) <= 0.5 + 1e-12


def test_triangle_constant_finite(kspec):
    c = estimate_triangle_constant(kspec, 1.0, samples=2000)
    assert 1.0 <= c < 10.0


def test_point_from_seq_roundtrip():
    z = Point.from_seq([1.0, 2.0, 3.0])
    assert z.to_list() == [1.0, 2.0, 3.0]
    with pytest.raises(DomainError):
        Point.from_seq([1.0])
    with pytest.raises(DomainError):
        Point([np.inf], 0.0)
