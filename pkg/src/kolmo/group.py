"""Homogeneous Lie-group calculus on R^{N+1} for degenerate Kolmogorov
operators: operator specification and validation, composition law,
anisotropic dilations, quasi-norm and quasi-distance, and the scaled
drift family.

The group law is (x,t) o (xi,tau) = (xi + E(tau) x, t + tau) with
E(tau) = exp(-tau B).  Spatial coordinate i scales as r^{alpha_i} under
the dilation delta_r and time scales as r^2, where alpha_i = 2n+1 on
block level n.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    EllipticityError,
    SolveError,
    StructureError,
    SymmetryError,
)
from .matrixcalc import integrate_matrix, mat_exp, spd_min_eigen

ZERO_BLOCK_TOL = 1e-14
RANK_TOL = 1e-10


@dataclass(frozen=True)
class BlockStructure:
    """Partition of the N spatial coordinates into dilation levels."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise StructureError("block sizes must be positive integers")
        if any(a < b for a, b in zip(sizes, sizes[1:])):
            raise StructureError("block sizes must be non-increasing")

    @property
    def kappa(self):
        return len(self.sizes) - 1

    @property
    def N(self):
        return sum(self.sizes)

    def offsets(self):
        """Start index of each level within an N-vector."""
        out = [0]
        for s in self.sizes[:-1]:
            out.append(out[-1] + s)
        return out

    def level_slice(self, n):
        if not 0 <= n <= self.kappa:
            raise DomainError(f"level {n} out of range 0..{self.kappa}")
        start = self.offsets()[n]
        return slice(start, start + self.sizes[n])


@dataclass(frozen=True)
class Exponents:
    """Dilation exponents alpha_i and the homogeneous dimension."""

    alpha: tuple
    Q: int

    @property
    def Qplus2(self):
        return self.Q + 2


@dataclass(frozen=True)
class Point:
    """A space-time point z = (x, t) of the group."""

    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))
        if not (np.all(np.isfinite(x)) and np.isfinite(self.t)):
            raise DomainError("point has non-finite coordinates")

    @classmethod
    def from_seq(cls, seq):
        """Build from a flat sequence whose last entry is the time."""
        seq = [float(v) for v in seq]
        if len(seq) < 2:
            raise DomainError("a point needs at least one spatial and one time entry")
        return cls(np.array(seq[:-1]), seq[-1])

    def to_list(self):
        return [*self.x.tolist(), self.t]

    def __eq__(self, other):
        return (
            isinstance(other, Point)
            and self.t == other.t
            and self.x.shape == other.x.shape
            and bool(np.all(self.x == other.x))
        )

    def __repr__(self):
        coords = ", ".join(f"{v:g}" for v in self.x)
        return f"Point(({coords}), t={self.t:g})"


def origin(N):
    return Point(np.zeros(N), 0.0)


@dataclass(frozen=True)
class OperatorSpec:
    """The pair (A, B) with its block structure; one Kolmogorov operator."""

    A: np.ndarray
    B: np.ndarray
    blocks: BlockStructure
    zero_block_tol: float = ZERO_BLOCK_TOL
    rank_tol: float = RANK_TOL
    _exps: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float))

    @property
    def N(self):
        return self.blocks.N

    @property
    def m(self):
        return self.blocks.sizes[0]

    @property
    def kappa(self):
        return self.blocks.kappa

    @property
    def lam(self):
        """Smallest eigenvalue of A."""
        return float(np.linalg.eigvalsh(self.A)[0])

    @property
    def Lam(self):
        """Largest eigenvalue of A."""
        return float(np.linalg.eigvalsh(self.A)[-1])

    def exponents(self):
        """Validated dilation exponents; validates the spec on first use."""
        if "exps" not in self._exps:
            self._exps["exps"] = validate_structure(self)
        return self._exps["exps"]

    def is_dilation_invariant(self, tol=ZERO_BLOCK_TOL):
        """True when B has only the subdiagonal blocks (B = B_0)."""
        return bool(np.abs(self.B - principal_B(self)).max() <= tol)

    def E(self, tau):
        """Translation matrix E(tau) = exp(-tau B)."""
        return mat_exp(-tau * self.B)

    def to_json_dict(self):
        return {
            "N": self.N,
            "m": self.m,
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "blocks": list(self.blocks.sizes),
        }


def make_spec(A, B, blocks, validate=True):
    """Assemble and (by default) validate an operator spec."""
    spec = OperatorSpec(A=A, B=B, blocks=BlockStructure(tuple(blocks)))
    if validate:
        spec.exponents()
    return spec


def load_spec(path_or_dict, validate=True):
    """Read an operator spec from a JSON file or an already-parsed dict."""
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        with open(path_or_dict) as fh:
            data = json.load(fh)
    spec = make_spec(data["A"], data["B"], data["blocks"], validate=validate)
    if "N" in data and int(data["N"]) != spec.N:
        raise StructureError(f"declared N={data['N']} but blocks sum to {spec.N}")
    if "m" in data and int(data["m"]) != spec.m:
        raise StructureError(f"declared m={data['m']} but first block is {spec.m}")
    return spec


def level_exponents(blocks):
    alpha = []
    for n, size in enumerate(blocks.sizes):
        alpha.extend([2 * n + 1] * size)
    Q = sum((2 * n + 1) * size for n, size in enumerate(blocks.sizes))
    return Exponents(alpha=tuple(alpha), Q=Q)


def validate_structure(spec):
    """Check all structural invariants of an OperatorSpec.

    Returns the dilation exponents.  Raises StructureError naming the
    offending level or block, or EllipticityError for a bad A.
    """
    blocks = spec.blocks
    N, m = blocks.N, blocks.sizes[0]
    if spec.B.shape != (N, N):
        raise StructureError(f"B must be {N}x{N}, got {spec.B.shape}")
    if spec.A.shape != (m, m):
        raise StructureError(f"A must be {m}x{m}, got {spec.A.shape}")
    if not np.allclose(spec.A, spec.A.T, atol=1e-12, rtol=0.0):
        raise EllipticityError("A is not symmetric")
    if np.linalg.eigvalsh(spec.A)[0] <= 0.0:
        raise EllipticityError("A is not positive definite")

    for i in range(blocks.kappa + 1):
        for j in range(blocks.kappa + 1):
            if j >= i - 1:
                continue
            blk = spec.B[blocks.level_slice(i), blocks.level_slice(j)]
            if np.abs(blk).max() > spec.zero_block_tol:
                raise StructureError(
                    f"block ({i},{j}) below the subdiagonal must be zero, "
                    f"max entry {np.abs(blk).max():g}"
                )
    for j in range(1, blocks.kappa + 1):
        blk = spec.B[blocks.level_slice(j), blocks.level_slice(j - 1)]
        sv = np.linalg.svd(blk, compute_uv=False)
        rank = int(np.sum(sv > spec.rank_tol))
        if rank < blocks.sizes[j]:
            raise StructureError(
                f"subdiagonal block at level {j} has rank {rank}, "
                f"needs {blocks.sizes[j]}"
            )
    return level_exponents(blocks)


def embedded_A(spec):
    """A embedded in the top-left m x m corner of an N x N zero matrix."""
    At = np.zeros((spec.N, spec.N))
    At[: spec.m, : spec.m] = spec.A
    return At


def hormander_check(spec, t, tol=1e-10, panels=8):
    """Positivity of C(t) = int_0^t E(s) A~ E(s)^T ds; the Hormander test."""
    if t <= 0.0:
        raise DomainError(f"time must be positive, got {t}")
    At = embedded_A(spec)
    C = integrate_matrix(lambda s: spec.E(s) @ At @ spec.E(s).T, t, panels=panels)
    C = (C + C.T) / 2.0
    return spd_min_eigen(C, tol=tol)


def compose(z, zeta, spec):
    """Group product z o zeta = (xi + E(tau) x, t + tau)."""
    return Point(zeta.x + spec.E(zeta.t) @ z.x, z.t + zeta.t)


def inverse(z, spec):
    """Group inverse (x,t)^{-1} = (-E(-t) x, -t)."""
    return Point(-(spec.E(-z.t) @ z.x), -z.t)


def dilate(r, z, exps):
    """Anisotropic dilation delta_r: x_i -> r^{alpha_i} x_i, t -> r^2 t."""
    if r <= 0.0:
        raise DomainError(f"dilation parameter must be positive, got {r}")
    scales = np.power(r, np.asarray(exps.alpha, dtype=float))
    return Point(scales * z.x, r * r * z.t)


def knorm(z, exps):
    """Homogeneous quasi-norm: max of |x_i|^{1/alpha_i} and |t|^{1/2}."""
    vals = [abs(z.t) ** 0.5]
    for xi, a in zip(z.x, exps.alpha):
        vals.append(abs(xi) ** (1.0 / a))
    return max(vals)


def kdist(z, zeta, spec):
    """Left-invariant quasi-distance d_K(z, zeta) = ||zeta^{-1} o z||_K."""
    return knorm(compose(inverse(zeta, spec), z, spec), spec.exponents())


def principal_B(spec):
    """B_0: the drift with every block except the subdiagonal zeroed."""
    blocks = spec.blocks
    B0 = np.zeros_like(spec.B)
    for j in range(1, blocks.kappa + 1):
        rows, cols = blocks.level_slice(j), blocks.level_slice(j - 1)
        B0[rows, cols] = spec.B[rows, cols]
    return B0


def scaled_B(spec, r):
    """Blockwise-scaled drift B_r; B_1 = B and B_0 is the principal part.

    Block (i, j) is scaled by r^{2(j - i + 1)}; the subdiagonal (j = i-1)
    is left untouched and every admissible block above it vanishes as
    r -> 0.
    """
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"scale parameter must lie in [0, 1], got {r}")
    blocks = spec.blocks
    Br = np.zeros_like(spec.B)
    for i in range(blocks.kappa + 1):
        for j in range(max(0, i - 1), blocks.kappa + 1):
            power = 2 * (j - i + 1)
            factor = 1.0 if power == 0 else r**power
            rows, cols = blocks.level_slice(i), blocks.level_slice(j)
            Br[rows, cols] = factor * spec.B[rows, cols]
    return Br


def compose_r(z, zeta, spec, r):
    """Composition under the scaled drift B_r; agrees with o at r = 1."""
    Er = mat_exp(-zeta.t * scaled_B(spec, r))
    return Point(zeta.x + Er @ z.x, z.t + zeta.t)


def project_level(x, n, blocks):
    """Zero all coordinates of x outside dilation level n."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    sl = blocks.level_slice(n)
    out[sl] = x[sl]
    return out


def level_map_solve(spec, n, target, residual_tol=1e-10):
    """Minimum-norm w in V_0 with B^n w = target in V_n.

    The minimum-norm least-squares solution of the restricted map is
    automatically orthogonal to its kernel, which is the defining
    property of V_{0,n}.
    """
    if not 1 <= n <= spec.kappa:
        raise DomainError(f"level {n} out of range 1..{spec.kappa}")
    blocks = spec.blocks
    target = np.asarray(target, dtype=float)
    if target.shape == (spec.N,):
        target_n = target[blocks.level_slice(n)]
    elif target.shape == (blocks.sizes[n],):
        target_n = target
    else:
        raise DomainError(f"target must have {spec.N} or {blocks.sizes[n]} entries")

    Bn = np.linalg.matrix_power(spec.B, n)
    M = Bn[blocks.level_slice(n), blocks.level_slice(0)]
    w0, *_ = np.linalg.lstsq(M, target_n, rcond=None)
    if np.linalg.norm(M @ w0 - target_n) > residual_tol * max(
        1.0, np.linalg.norm(target_n)
    ):
        raise SolveError(
            f"level-{n} map could not reach the target; spec violates surjectivity"
        )
    w = np.zeros(spec.N)
    w[blocks.level_slice(0)] = w0
    return w


def sample_ball(spec, radius, count, rng, center=None):
    """Uniform samples in the quasi-ball Q_radius(center).

    The unit quasi-ball is exactly the unit box in (x, t), so sampling
    reduces to a box sample followed by a dilation and a translation.
    """
    exps = spec.exponents()
    pts = []
    for _ in range(count):
        raw = Point(rng.uniform(-1.0, 1.0, size=spec.N), rng.uniform(-1.0, 1.0))
        z = dilate(radius, raw, exps)
        if center is not None:
            z = compose(z, center, spec)
        pts.append(z)
    return pts


def estimate_triangle_constant(spec, radius, samples=10_000, seed=0):
    """Empirical pseudo-triangle constant over sampled pairs in a ball."""
    if radius <= 0.0:
        raise DomainError("radius must be positive")
    if samples < 100:
        raise DomainError("need at least 100 samples")
    rng = np.random.default_rng(seed)
    exps = spec.exponents()
    best = 1.0
    pts = sample_ball(spec, radius, samples, rng)
    for i in range(0, samples - 1, 2):
        z, zeta = pts[i], pts[i + 1]
        nz, nzeta = knorm(z, exps), knorm(zeta, exps)
        if nz > 1e-12:
            best = max(best, knorm(inverse(z, spec), exps) / nz)
        if nz + nzeta > 1e-12:
            best = max(best, knorm(compose(z, zeta, spec), exps) / (nz + nzeta))
    return best


def kolmogorov_spec(m=1):
    """The classical kinetic operator: Delta_v - <v, D_y> - d_t."""
    N = 2 * m
    B = np.zeros((N, N))
    B[m:, :m] = -np.eye(m)
    return make_spec(np.eye(m), B, (m, m))


def heat_spec(N=1):
    """The heat operator: B = 0, m = N."""
    return make_spec(np.eye(N), np.zeros((N, N)), (N,))
