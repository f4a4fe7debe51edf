"""Intrinsic second-order Taylor polynomial and the trajectory planner.

The planner connects two points by integral curves of the first-level
fields X_v (straight lines in the first m coordinates) and the drift Y
(whose flow is e^{sY}(x, t) = (exp(sB) x, t - s)).  Higher coordinate
levels are reached through the recursive commutator-style trajectories

    gamma^(0)_{v,s}(z)   = (x + s v, t)
    gamma^(n+1)_{v,s}(z) = e^{-s^2 Y} gamma^(n)_{v,-s} e^{s^2 Y}
                           gamma^(n)_{v,s} (z).

For a dilation-invariant drift, gamma^(n) moves level n by exactly
s^{2n+1} B^n v and leaves the lower levels untouched; for a generic
drift the planner solves the level equation by bisection and repairs
the disturbed levels in a capped fixed-point loop.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AccuracyError,
    DomainError,
    NonConvergenceError,
    PlanIntegrityError,
)
from .group import (
    Point,
    compose,
    inverse,
    kdist,
    level_map_solve,
    mat_exp,
    project_level,
)

SEGMENT_TOL = 1e-12


def endpoint_error(a, b):
    """Max-abs coordinate discrepancy between two points.

    Convergence of the planner is measured in plain coordinates rather
    than the quasi-distance: the 1/alpha root in the quasi-norm blows a
    machine-epsilon residual on level n up to eps^{1/(2n+1)}, which
    would make tight tolerances unreachable for any plan.
    """
    return max(float(np.abs(a.x - b.x).max()), abs(a.t - b.t))


@dataclass(frozen=True)
class C2Bundle:
    """A function with its first/second derivatives in the first m
    variables and its Lie derivative along the drift.

    Fields are callables on Point: u -> float, grad_m -> (m,) array,
    hess_m -> (m, m) array, Yu -> float.
    """

    u: object
    grad_m: object
    hess_m: object
    Yu: object


@dataclass(frozen=True)
class PathSegment:
    """One closed-form flow piece: an X_v line or a drift arc."""

    kind: str  # "X" or "Y"
    v: np.ndarray  # unit direction in V_0 for X segments, zeros for Y
    s: float
    start: Point
    end: Point


@dataclass
class PathPlan:
    """Ordered flow segments steering source to target."""

    source: Point
    target: Point
    segments: list = field(default_factory=list)
    achieved_error: float = 0.0

    def endpoint(self):
        return self.segments[-1].end if self.segments else self.source

    def to_json_dict(self):
        return {
            "source": self.source.to_list(),
            "target": self.target.to_list(),
            "achieved_error": self.achieved_error,
            "segments": [
                {
                    "kind": seg.kind,
                    "v": seg.v.tolist(),
                    "s": seg.s,
                    "start": seg.start.to_list(),
                    "end": seg.end.to_list(),
                }
                for seg in self.segments
            ],
        }


def flow_X(v, s, z):
    """Straight-line flow of X_v: (x + s v, t)."""
    v = np.asarray(v, dtype=float)
    return Point(z.x + s * v, z.t)


def flow_Y(s, z, spec):
    """Drift flow e^{sY}(x, t) = (exp(sB) x, t - s)."""
    return Point(mat_exp(s * spec.B) @ z.x, z.t - s)


def _segment(kind, v, s, start, end):
    return PathSegment(kind=kind, v=np.asarray(v, dtype=float), s=float(s), start=start, end=end)


def _append_X(segments, v, s, z):
    end = flow_X(v, s, z)
    segments.append(_segment("X", v, s, z, end))
    return end


def _append_Y(segments, s, z, spec):
    end = flow_Y(s, z, spec)
    segments.append(_segment("Y", np.zeros(z.x.size), s, z, end))
    return end


def gamma_traj(n, v, s, z, spec, segments=None):
    """Recursive trajectory gamma^(n)_{v,s}; returns (endpoint, trace)."""
    if n < 0:
        raise DomainError("trajectory level must be >= 0")
    if segments is None:
        segments = []
    if n == 0:
        end = _append_X(segments, v, s, z)
        return end, segments
    cur, _ = gamma_traj(n - 1, v, s, z, spec, segments)
    cur = _append_Y(segments, s * s, cur, spec)
    cur, _ = gamma_traj(n - 1, v, -s, cur, spec, segments)
    cur = _append_Y(segments, -s * s, cur, spec)
    return cur, segments


def lie_derivative_fd(u, z, spec, h=1e-5):
    """Central flow-difference approximation of Yu with a Richardson check."""
    if h <= 0.0:
        raise DomainError("step must be positive")

    def central(step):
        fwd = u(flow_Y(step, z, spec))
        bwd = u(flow_Y(-step, z, spec))
        return (fwd - bwd) / (2.0 * step)

    d1, d2 = central(h), central(h / 2.0)
    extrap = (4.0 * d2 - d1) / 3.0
    scale = max(1.0, abs(extrap))
    if abs(d2 - d1) > 1e-3 * scale:
        raise AccuracyError("drift derivative did not converge under refinement")
    return extrap


def taylor2(bundle, z, zeta, spec, form="group"):
    """Second-order intrinsic Taylor polynomial of the bundle at z.

    The euclidean form uses raw coordinate differences xi_i - x_i; the
    group form uses the first m components of the left-invariant
    increment z^{-1} o zeta.  Both use -Yu(z)(tau - t) for the drift
    term.  The forms coincide whenever the first block row of B is zero.
    """
    m = spec.m
    if form == "euclidean":
        dx = (zeta.x - z.x)[:m]
    elif form == "group":
        dx = compose(inverse(z, spec), zeta, spec).x[:m]
    else:
        raise DomainError(f"unknown Taylor form {form!r}")
    dtau = zeta.t - z.t
    g = np.asarray(bundle.grad_m(z), dtype=float)
    H = np.asarray(bundle.hess_m(z), dtype=float)
    return (
        bundle.u(z)
        + float(g @ dx)
        + 0.5 * float(dx @ H @ dx)
        - bundle.Yu(z) * dtau
    )


def remainder_profile(bundle, z, path, rhos, spec, form="group"):
    """Taylor remainder over a shrinking family zeta(rho) at distance rho.

    Returns a list of (rho, |u(zeta) - T2(zeta)| / rho^2).
    """
    out = []
    for rho in rhos:
        zeta = path(rho)
        rem = abs(bundle.u(zeta) - taylor2(bundle, z, zeta, spec, form=form))
        out.append((rho, rem / rho**2))
    return out


def _leading_sign_unit(w):
    """Unit vector with positive leading nonzero entry, plus the sign
    absorbed into the flow parameter."""
    norm = np.linalg.norm(w)
    v = w / norm
    lead = v[np.flatnonzero(np.abs(v) > 0)[0]]
    if lead < 0:
        return -v, -1.0
    return v, 1.0


def traj_increment(n, v, s, spec):
    """Displacement of gamma^(n)_{v,s} in closed form.

    Independent of the base point: Delta_0(s) = s v and
    Delta_{n+1}(s) = Delta_n(s) + exp(-s^2 B) Delta_n(-s).  Unlike
    re-executing the flows, this never forms the huge intermediate
    exp(s^2 B) x products, so it stays accurate for large parameters.
    """
    v = np.asarray(v, dtype=float)
    if n == 0:
        return s * v
    d = traj_increment(n - 1, v, s, spec)
    return d + mat_exp(-s * s * spec.B) @ traj_increment(n - 1, v, -s, spec)


def _level_increment(n, v, s, spec, blocks):
    return project_level(traj_increment(n, v, s, spec), n, blocks)


def _solve_level_param(n, v, s_guess, need, spec, tol=1e-12, max_expand=60):
    """Bisection in s for the level-n increment along the needed direction.

    ``need`` is the required level-n increment vector; the scalar
    equation matches its component along need/|need|.
    """
    blocks = spec.blocks
    nhat = need / np.linalg.norm(need)
    target = float(np.linalg.norm(need))

    def phi(s):
        return float(_level_increment(n, v, s, spec, blocks) @ nhat) - target

    def bracket(hi0):
        lo, flo = 0.0, phi(0.0)
        hi = hi0
        for _ in range(max_expand):
            try:
                fhi = phi(hi)
            except AccuracyError:
                return None
            if flo * fhi <= 0.0:
                return lo, hi, flo, fhi
            hi *= 1.5
        return None

    found = bracket(s_guess) or bracket(-s_guess)
    if found is None:
        raise NonConvergenceError(f"no bracket for the level-{n} equation")
    lo, hi, flo, fhi = found
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = phi(mid)
        if fmid == 0.0 or abs(hi - lo) < tol:
            return mid
        if flo * fmid <= 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def connect(z, zeta, spec, tol=1e-9, max_iters=50):
    """Plan a concatenation of X and Y flows steering z to zeta.

    One Y arc matches times, one X line matches the first-level
    coordinates, then one trajectory gamma^(n) per level n = 1..kappa.
    Dilation-invariant drifts terminate exactly; otherwise a final X
    correction of the first-level residual is followed by a fixed-point
    repetition until the endpoint error drops below ``tol``.
    """
    blocks = spec.blocks
    plan = PathPlan(source=z, target=zeta)
    if z == zeta:
        return plan
    segments = plan.segments
    invariant = spec.is_dilation_invariant()

    cur = z
    if cur.t != zeta.t:
        cur = _append_Y(segments, cur.t - zeta.t, cur, spec)
    cur = _match_level0(segments, cur, zeta, blocks)

    err = endpoint_error(cur, zeta)
    iters = 0
    while err > tol:
        if iters >= max_iters:
            plan.achieved_error = err
            raise NonConvergenceError(
                f"correction loop hit the cap with error {err:g}", plan=plan
            )
        iters += 1
        for n in range(1, blocks.kappa + 1):
            need = project_level(zeta.x - cur.x, n, blocks)
            if np.linalg.norm(need) <= SEGMENT_TOL:
                continue
            w = level_map_solve(spec, n, need)
            v, sign = _leading_sign_unit(w)
            s = sign * np.linalg.norm(w) ** (1.0 / (2 * n + 1))
            if not invariant:
                s = _solve_level_param(n, v, s, need, spec)
            cur, _ = gamma_traj(n, v, s, cur, spec, segments)
        cur = _match_level0(segments, cur, zeta, blocks)
        err = endpoint_error(cur, zeta)
        if invariant:
            break
    plan.achieved_error = err
    return plan


def _match_level0(segments, cur, zeta, blocks):
    d0 = project_level(zeta.x - cur.x, 0, blocks)
    if np.linalg.norm(d0) <= SEGMENT_TOL:
        return cur
    v, sign = _leading_sign_unit(d0)
    return _append_X(segments, v, sign * np.linalg.norm(d0), cur)


def verify_plan(plan, spec, tol=1e-9):
    """Re-execute every segment and check chaining and the endpoint.

    Returns a dict with the endpoint error and the accumulated path
    length (sum of per-segment quasi-distance increments).
    """
    cur = plan.source
    length = 0.0
    for k, seg in enumerate(plan.segments):
        if cur != seg.start and kdist(cur, seg.start, spec) > SEGMENT_TOL:
            raise PlanIntegrityError(f"segment {k} does not chain from the previous end")
        if seg.kind == "X":
            end = flow_X(seg.v, seg.s, seg.start)
        elif seg.kind == "Y":
            end = flow_Y(seg.s, seg.start, spec)
        else:
            raise PlanIntegrityError(f"segment {k} has unknown kind {seg.kind!r}")
        if np.abs(end.x - seg.end.x).max() > SEGMENT_TOL * max(
            1.0, np.abs(end.x).max()
        ) or abs(end.t - seg.end.t) > SEGMENT_TOL * max(1.0, abs(end.t)):
            raise PlanIntegrityError(f"segment {k} endpoint does not match its flow")
        length += kdist(seg.end, seg.start, spec)
        cur = seg.end
    err = endpoint_error(cur, plan.target)
    return {
        "segments": len(plan.segments),
        "endpoint_error": err,
        "kdist_error": kdist(cur, plan.target, spec),
        "length": length,
        "ok": err <= max(tol, plan.achieved_error * 1.01 + 1e-15),
    }


# ---------------------------------------------------------------------------
# Analytic bundle families used across the test and verification suites.


def quadratic_bundle(spec, c0=0.0, a=None, H=None, bt=0.0):
    """u = c0 + <a, x_m> + x_m^T H x_m / 2 + bt * t, derivatives exact."""
    m = spec.m
    a = np.zeros(m) if a is None else np.asarray(a, dtype=float)
    H = np.zeros((m, m)) if H is None else np.asarray(H, dtype=float)

    def u(z):
        xm = z.x[:m]
        return c0 + float(a @ xm) + 0.5 * float(xm @ H @ xm) + bt * z.t

    def grad_m(z):
        return a + H @ z.x[:m]

    def hess_m(z):
        return H.copy()

    def Yu(z):
        Du = np.zeros(spec.N)
        Du[:m] = a + H @ z.x[:m]
        return float(spec.B @ z.x @ Du) - bt

    return C2Bundle(u=u, grad_m=grad_m, hess_m=hess_m, Yu=Yu)


def coordinate_bundle(spec, index):
    """u = x_index for a higher-level coordinate (index >= m)."""
    m = spec.m
    if index < m:
        return quadratic_bundle(spec, a=np.eye(spec.m)[index])

    def u(z):
        return float(z.x[index])

    def grad_m(z):
        return np.zeros(m)

    def hess_m(z):
        return np.zeros((m, m))

    def Yu(z):
        return float((spec.B @ z.x)[index])

    return C2Bundle(u=u, grad_m=grad_m, hess_m=hess_m, Yu=Yu)


def gaussian_bundle(spec, center_x=None, center_t=0.0, width_x=1.0, width_t=1.0,
                    amplitude=1.0):
    """Smooth Gaussian bump in (x, t) with hand-coded derivatives."""
    N, m = spec.N, spec.m
    c = np.zeros(N) if center_x is None else np.asarray(center_x, dtype=float)
    wx = np.broadcast_to(np.asarray(width_x, dtype=float), (N,)).copy()

    def u(z):
        q = np.sum(((z.x - c) / wx) ** 2) + ((z.t - center_t) / width_t) ** 2
        return amplitude * np.exp(-q)

    def grad_full(z):
        return -2.0 * (z.x - c) / wx**2 * u(z)

    def grad_m(z):
        return grad_full(z)[:m]

    def hess_m(z):
        val = u(z)
        d = -2.0 * (z.x[:m] - c[:m]) / wx[:m] ** 2
        return (np.outer(d, d) - np.diag(2.0 / wx[:m] ** 2)) * val

    def dudt(z):
        return -2.0 * (z.t - center_t) / width_t**2 * u(z)

    def Yu(z):
        return float(spec.B @ z.x @ grad_full(z)) - dudt(z)

    return C2Bundle(u=u, grad_m=grad_m, hess_m=hess_m, Yu=Yu)


def validate_bundle(bundle, spec, points, h=1e-5, tol=1e-6):
    """FD cross-check of a bundle's analytic derivatives.

    Returns the worst relative mismatch over the points; raises nothing.
    """
    worst = 0.0
    m = spec.m
    for z in points:
        scale = max(1.0, abs(bundle.u(z)))
        g = np.asarray(bundle.grad_m(z), dtype=float)
        for i in range(m):
            e = np.zeros(spec.N)
            e[i] = h
            fd = (bundle.u(Point(z.x + e, z.t)) - bundle.u(Point(z.x - e, z.t))) / (2 * h)
            worst = max(worst, abs(fd - g[i]) / scale)
        fd_Y = lie_derivative_fd(bundle.u, z, spec, h=h)
        worst = max(worst, abs(fd_Y - bundle.Yu(z)) / scale)
    return worst
