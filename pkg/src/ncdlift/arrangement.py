"""Domain arrangements and their defining-condition checks.

An :class:`Arrangement` holds the constraint family ``{f_j}`` cutting out
``D = ∩ {f_j > 0}``.  :func:`check_ncd` verifies, at sampling scale, the
conditions that make D a normal and convenient domain: closure consistency,
off-component separation, transversality of the selected boundary pieces,
and connectivity.

Grid checks run on the full 2-D window when n = 2 and on the coordinate
planes (x1, xi) through the seed point when n >= 3; a full n-dimensional
grid at the configured step would be far beyond the runtime budget and every
constraint involves x1 and at most one other coordinate, so these sections
see all the geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import InputError
from .geom import (
    KIND_ELLIPSOID_BODY,
    KIND_ELLIPSOID_HOLE,
    KIND_HYPERBOLA,
    Primitive,
)
from .linalg import exact_rank, float_rank_report, sqrt_bounds
from .poly import Polynomial

# Activation tolerance for float boundary points; rational points use exact
# arithmetic instead.
ACTIVATION_TOL = 1e-9
RANK_RATIO = 1e-8
BOUNDARY_REFINE_TOL = 1e-12
DEFAULT_WINDOW = Fraction(12)
T_PADDING = Fraction(5)


@dataclass(eq=False)
class Arrangement:
    """A candidate domain: ambient dimension, constraints, interior seed."""

    n: int
    primitives: tuple[Primitive, ...]
    seed_point: tuple[Fraction, ...]
    provenance: str = ""
    t_values: tuple[Fraction, ...] | None = None
    labels: tuple[int, ...] | None = None
    variant: str | None = None
    expected: dict | None = None

    def __post_init__(self):
        self.primitives = tuple(self.primitives)
        if not self.primitives:
            raise InputError("an arrangement needs at least one primitive")
        for prim in self.primitives:
            if prim.f.num_vars != self.n:
                raise InputError(
                    f"primitive has {prim.f.num_vars} variables, arrangement has n={self.n}"
                )
        self.seed_point = tuple(Fraction(v) for v in self.seed_point)
        if len(self.seed_point) != self.n:
            raise InputError("seed point dimension mismatch")
        if self.t_values is not None:
            self.t_values = tuple(Fraction(v) for v in self.t_values)

    @property
    def l(self) -> int:
        return len(self.primitives)


@dataclass(frozen=True)
class ActiveSet:
    """Indices of constraints vanishing at a point, with the tolerance used."""

    point: tuple
    indices: tuple[int, ...]
    tolerance: float


def _is_exact_point(point) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in point)


def window_box(arr: Arrangement, halfwidth=None) -> tuple[np.ndarray, np.ndarray]:
    """Float sampling window: x1 padded beyond the t-range, others symmetric."""
    w = float(DEFAULT_WINDOW if halfwidth is None else halfwidth)
    lo = np.full(arr.n, -w)
    hi = np.full(arr.n, w)
    if arr.t_values:
        lo[0] = float(arr.t_values[0] - T_PADDING)
        hi[0] = float(arr.t_values[-1] + T_PADDING)
    return lo, hi


# ---------------------------------------------------------------------------
# membership and transversality
# ---------------------------------------------------------------------------


def membership(arr: Arrangement, point, tol: float = ACTIVATION_TOL):
    """Classify a point: ('interior' | 'boundary' | 'exterior', active indices).

    Exact arithmetic when the point is rational; otherwise |f_j| <= tol
    counts as active.
    """
    if len(point) != arr.n:
        raise InputError(f"point has dimension {len(point)}, expected {arr.n}")
    active = []
    if _is_exact_point(point):
        for j, prim in enumerate(arr.primitives):
            v = prim.f.eval(point)
            if v < 0:
                return "exterior", ()
            if v == 0:
                active.append(j)
    else:
        for j, prim in enumerate(arr.primitives):
            v = prim.f.eval_float(point)
            if v < -tol:
                return "exterior", ()
            if abs(v) <= tol:
                active.append(j)
    if active:
        return "boundary", tuple(active)
    return "interior", ()


def active_set(arr: Arrangement, point, tol: float = ACTIVATION_TOL) -> ActiveSet:
    _, active = membership(arr, point, tol)
    return ActiveSet(tuple(point), active, 0.0 if _is_exact_point(point) else tol)


def gradient_at(prim: Primitive, point) -> list:
    if _is_exact_point(point):
        return [g.eval(point) for g in prim.f.gradient()]
    return [g.eval_float(point) for g in prim.f.gradient()]


def check_transversality_at(arr: Arrangement, point, active=None, tol: float = ACTIVATION_TOL) -> dict:
    """Rank report for the active constraint gradients at a boundary point."""
    if active is None:
        status, active = membership(arr, point, tol)
        if status != "boundary":
            raise InputError(f"point is {status}, not on the boundary")
    active = tuple(active)
    exact = _is_exact_point(point)
    rows = [gradient_at(arr.primitives[j], point) for j in active]
    report = {
        "point": [float(v) for v in point],
        "active": list(active),
        "size": len(active),
        "exact": exact,
    }
    for j, row in zip(active, rows):
        if all(v == 0 for v in row) if exact else all(abs(v) < tol for v in row):
            report.update(
                passed=False,
                rank=0,
                reason=f"gradient of constraint {j} vanishes: boundary piece is singular",
            )
            return report
    if exact:
        rank = exact_rank(rows)
        report.update(rank=rank, passed=rank == len(active))
    else:
        rr = float_rank_report(np.array(rows, dtype=float), RANK_RATIO)
        report.update(
            rank=rr["rank"],
            smin=rr["smin"],
            smax=rr["smax"],
            passed=rr["rank"] == len(active),
        )
    if not report["passed"]:
        report["reason"] = (
            f"gradient rank {report['rank']} < {len(active)} active constraints"
        )
    return report


# ---------------------------------------------------------------------------
# exact extrema of degree <= 2 constraints over boxes
# ---------------------------------------------------------------------------


def _min_quadratic_1d(lin: Fraction, quad: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    """Exact min of quad*x^2 + lin*x over [lo, hi]."""
    best = min(quad * lo * lo + lin * lo, quad * hi * hi + lin * hi)
    if quad > 0:
        vertex = -lin / (2 * quad)
        if lo <= vertex <= hi:
            best = min(best, quad * vertex * vertex + lin * vertex)
    return best


def exact_min_on_box(f: Polynomial, lo: Sequence[Fraction], hi: Sequence[Fraction]) -> Fraction:
    """Exact minimum of a degree <= 2 polynomial over an axis-aligned box.

    Supports separable quadratics plus at most one bilinear pair (the only
    shapes the primitives produce); raises on anything else.
    """
    lo = [Fraction(v) for v in lo]
    hi = [Fraction(v) for v in hi]
    const, lin, quad = f.as_quadratic()
    diag = {i: c for (i, j), c in quad.items() if i == j}
    off = {(i, j): c for (i, j), c in quad.items() if i != j}
    if len(off) > 1:
        raise InputError("exact_min_on_box supports at most one bilinear term")
    if off:
        (bi, bj), bc = next(iter(off.items()))
        if bi in diag or bj in diag:
            raise InputError("mixed square and bilinear terms are unsupported")
        best = None
        for u in (lo[bi - 1], hi[bi - 1]):
            for v in (lo[bj - 1], hi[bj - 1]):
                value = const + bc * u * v
                value += lin.get(bi, Fraction(0)) * u + lin.get(bj, Fraction(0)) * v
                for i, c in lin.items():
                    if i not in (bi, bj):
                        value += _min_quadratic_1d(c, diag.get(i, Fraction(0)), lo[i - 1], hi[i - 1])
                for i, c in diag.items():
                    if i not in (bi, bj) and i not in lin:
                        value += _min_quadratic_1d(Fraction(0), c, lo[i - 1], hi[i - 1])
                best = value if best is None else min(best, value)
        return best
    value = const
    for i in set(lin) | set(diag):
        value += _min_quadratic_1d(
            lin.get(i, Fraction(0)), diag.get(i, Fraction(0)), lo[i - 1], hi[i - 1]
        )
    return value


def ellipsoid_bounding_box(prim: Primitive) -> tuple[list[Fraction], list[Fraction]]:
    """Rational box enclosing an axis-aligned ellipsoid boundary (conservative)."""
    centers = prim.metadata["centers"]
    radii = prim.metadata["radii_sq"]
    lo, hi = [], []
    for c, r in zip(centers, radii):
        _, ub = sqrt_bounds(r)
        lo.append(c - ub)
        hi.append(c + ub)
    return lo, hi


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _eval_all(arr: Arrangement, points: np.ndarray) -> np.ndarray:
    """Matrix of constraint values, shape (num_primitives, P)."""
    return np.stack([prim.f.eval_batch(points) for prim in arr.primitives])


def _feasible_mask(values: np.ndarray, strict: bool = True) -> np.ndarray:
    return (values > 0).all(axis=0) if strict else (values >= 0).all(axis=0)


def sample_region(arr: Arrangement, count: int, seed: int, window=None):
    """Deterministic interior samples.

    Rejection sampling inside the window; if the acceptance rate is too low
    (high ambient dimension), falls back to seeded hit-and-run walks from the
    seed point.  The method used is reported, never silent.
    """
    if count <= 0:
        raise InputError("sample count must be positive")
    rng = np.random.default_rng(seed)
    lo, hi = window_box(arr, window)
    collected: list[np.ndarray] = []
    draws = 0
    max_draws = max(200 * count, 20000)
    chunk = max(4 * count, 1000)
    while len(collected) < count and draws < max_draws:
        pts = rng.uniform(lo, hi, size=(chunk, arr.n))
        draws += chunk
        mask = _feasible_mask(_eval_all(arr, pts))
        for p in pts[mask]:
            collected.append(p)
            if len(collected) >= count:
                break
    info = {"method": "rejection", "draws": draws, "accepted": len(collected)}
    if len(collected) < count:
        walked = _hit_and_run(arr, count - len(collected), rng, lo, hi)
        collected.extend(walked)
        info = {
            "method": "rejection+hit_and_run",
            "draws": draws,
            "accepted": len(collected),
            "note": "rejection retry budget exhausted; walk samples appended",
        }
    if len(collected) < count:
        info["shortfall"] = count - len(collected)
    points = np.array(collected) if collected else np.zeros((0, arr.n))
    return points, info


def _batch_feasible(arr: Arrangement, points: np.ndarray) -> np.ndarray:
    return _feasible_mask(_eval_all(arr, points))


def _batch_ray_exits(arr: Arrangement, starts: np.ndarray, dirs: np.ndarray, span: float):
    """Per-ray largest feasible step (0 where the start is already infeasible).

    Rays that stay feasible out to 2*span are flagged as non-exiting.
    """
    B = starts.shape[0]
    hi_t = np.full(B, span / 64.0)
    exits = np.zeros(B, dtype=bool)
    for _ in range(9):
        pending = ~exits
        if not pending.any():
            break
        pts = starts[pending] + hi_t[pending, None] * dirs[pending]
        feas = _batch_feasible(arr, pts)
        newly = np.where(pending)[0][~feas]
        exits[newly] = True
        grow = np.where(pending)[0][feas]
        hi_t[grow] *= 2
    lo_t = np.zeros(B)
    lo_t[~exits] = hi_t[~exits]
    for _ in range(60):
        if not exits.any():
            break
        mid = 0.5 * (lo_t[exits] + hi_t[exits])
        pts = starts[exits] + mid[:, None] * dirs[exits]
        feas = _batch_feasible(arr, pts)
        idx = np.where(exits)[0]
        lo_t[idx[feas]] = mid[feas]
        hi_t[idx[~feas]] = mid[~feas]
    return lo_t, hi_t, exits


def _hit_and_run(arr: Arrangement, count: int, rng, lo, hi) -> list[np.ndarray]:
    """Seeded hit-and-run walk from the seed point; assumes the seed is interior."""
    x0 = np.array([float(v) for v in arr.seed_point])
    if not _batch_feasible(arr, x0[None, :])[0]:
        return []
    chains = min(max(count, 8), 256)
    xs = np.repeat(x0[None, :], chains, axis=0)
    out: list[np.ndarray] = []
    steps = max(8, (count + chains - 1) // chains + 6)
    for step in range(steps):
        dirs = rng.normal(size=(chains, arr.n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        span = float(np.max(hi - lo))
        fwd, _, _ = _batch_ray_exits(arr, xs, dirs, span)
        bwd, _, _ = _batch_ray_exits(arr, xs, -dirs, span)
        t = rng.uniform(-bwd, fwd)
        cand = xs + t[:, None] * dirs
        ok = _batch_feasible(arr, cand)
        ok &= np.all(cand >= lo[None, :], axis=1) & np.all(cand <= hi[None, :], axis=1)
        xs[ok] = cand[ok]
        if step >= 2:
            out.extend(xs[ok].copy())
            if len(out) >= count:
                break
    return out[:count]


def sample_boundary(arr: Arrangement, count: int, seed: int, window=None):
    """Boundary samples via vectorized ray bisection from interior points.

    Returns a list of (point, active_indices); points satisfy
    min_j f_j = 0 up to ~1e-12.
    """
    if count <= 0:
        raise InputError("sample count must be positive")
    rng = np.random.default_rng(seed)
    interior, _ = sample_region(arr, max(count // 2, 8), seed + 1, window)
    if interior.shape[0] == 0:
        return []
    lo, hi = window_box(arr, window)
    span = float(np.max(hi - lo))
    out = []
    rounds = 0
    while len(out) < count and rounds < 6:
        rounds += 1
        B = count
        bases = interior[rng.integers(0, interior.shape[0], size=B)]
        dirs = rng.normal(size=(B, arr.n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        _, hi_t, exits = _batch_ray_exits(arr, bases, dirs, span)
        pts = bases[exits] + hi_t[exits, None] * dirs[exits]
        if pts.size == 0:
            continue
        vals = _eval_all(arr, pts)
        min_ok = vals.min(axis=0) > -ACTIVATION_TOL
        actives = np.abs(vals) <= ACTIVATION_TOL
        for i in np.where(min_ok)[0]:
            active = tuple(int(j) for j in np.where(actives[:, i])[0])
            if active:
                out.append((pts[i], active))
            if len(out) >= count:
                break
    return out[:count]


def sample_zero_set(arr: Arrangement, j: int, count: int, seed: int, window=None):
    """Points on {f_j = 0}, labeled by whether they satisfy the component descriptor.

    Uses the primitive's structure: hyperbolas are parameterized branch-wise
    by x1 (both branches, so off-component points are produced), affine
    constraints by points on the hyperplane, ellipsoids by seeded directions.
    Returns a list of (point, on_component: bool).
    """
    prim = arr.primitives[j]
    rng = np.random.default_rng(seed)
    lo, hi = window_box(arr, window)
    supp = prim.f.support()
    out = []

    def full_point(assign: dict) -> np.ndarray:
        p = np.array([float(v) for v in arr.seed_point])
        for var, value in assign.items():
            p[var - 1] = float(value)
        return p

    base = prim.base_kind
    if base == KIND_HYPERBOLA:
        a = prim.metadata["a"]
        x1s = np.linspace(lo[0], hi[0], count)
        for x1 in x1s:
            if abs(x1 - float(a)) < 1e-9:
                continue
            sols = _solutions_at_x1_float(prim, float(x1))
            for assign in sols:
                assign = dict(assign)
                assign[1] = float(x1)
                p = full_point(assign)
                out.append((p, prim.component.satisfied_float(p)))
    elif base in (KIND_ELLIPSOID_BODY, KIND_ELLIPSOID_HOLE):
        centers = [float(c) for c in prim.metadata["centers"]]
        radii = [math.sqrt(float(r)) for r in prim.metadata["radii_sq"]]
        k = len(centers)
        for _ in range(count):
            d = rng.normal(size=k)
            d /= np.linalg.norm(d)
            assign = {
                i + 1: centers[i] + radii[i] * d[i] for i in range(k)
            }
            p = full_point(assign)
            out.append((p, prim.component.satisfied_float(p)))
    else:
        # affine: solve for one occurring variable given random values elsewhere
        const, lin, _ = prim.f.as_quadratic()
        var = max(lin, key=lambda i: abs(lin[i]))
        for _ in range(count):
            assign = {}
            value = float(const)
            for i in supp:
                if i == var:
                    continue
                v = float(rng.uniform(lo[i - 1], hi[i - 1]))
                assign[i] = v
                value += float(lin.get(i, Fraction(0))) * v
            assign[var] = -value / float(lin[var])
            p = full_point(assign)
            out.append((p, prim.component.satisfied_float(p)))
    return out


def _second_var(prim: Primitive) -> int:
    supp = prim.f.support()
    others = [v for v in supp if v != 1]
    return others[0] if others else 1


def _solutions_at_x1_float(prim: Primitive, x1: float) -> list[dict]:
    """Float solutions {var: value} of f = 0 at fixed x1 (single second variable)."""
    sols = []
    g = prim.f.substitute(1, Fraction(x1))
    supp = g.support()
    if not supp:
        return []
    if len(supp) > 1:
        return []
    v = supp[0]
    const, lin, quad = g.as_quadratic()
    a2 = float(quad.get((v, v), 0))
    a1 = float(lin.get(v, 0))
    a0 = float(const)
    if a2 == 0:
        if a1 != 0:
            sols.append({v: -a0 / a1})
    else:
        disc = a1 * a1 - 4 * a2 * a0
        if disc >= 0:
            rt = math.sqrt(disc)
            for sign in (1, -1):
                sols.append({v: (-a1 + sign * rt) / (2 * a2)})
    return sols


# ---------------------------------------------------------------------------
# pairwise intersections (exact where the structure allows)
# ---------------------------------------------------------------------------


def _exact_roots_univariate(g: Polynomial, var: int):
    """Roots of a degree <= 2 polynomial in one variable: (roots, exact?)."""
    const, lin, quad = g.as_quadratic()
    a2 = quad.get((var, var), Fraction(0))
    a1 = lin.get(var, Fraction(0))
    a0 = const
    if a2 == 0:
        if a1 == 0:
            return ([], True) if a0 != 0 else ("all", True)
        return [(-a0 / a1)], True
    disc = a1 * a1 - 4 * a2 * a0
    if disc < 0:
        return [], True
    from .linalg import sqrt_fraction

    rt = sqrt_fraction(disc)
    if rt is not None:
        return [(-a1 + rt) / (2 * a2), (-a1 - rt) / (2 * a2)], True
    rtf = math.sqrt(float(disc))
    return [(float(-a1) + rtf) / (2 * float(a2)), (float(-a1) - rtf) / (2 * float(a2))], False


def _restrict_to_var(f: Polynomial, keep: int):
    """Check f involves only variable ``keep`` (after substitutions)."""
    return all(v == keep for v in f.support())


def pair_intersection(arr: Arrangement, j: int, k: int, window=None, sweep: int = 241) -> dict:
    """Locate S_j ∩ S_k (component descriptors respected).

    Returns {"status": "found" | "empty" | "not_found", "certified": bool,
    "points": [...], "detail": str}.  "empty" with certified=True is an exact
    verdict; "not_found" means the search failed, which is never treated as
    emptiness.
    """
    pj, pk = arr.primitives[j], arr.primitives[k]
    lo, hi = window_box(arr, window)

    # certified separation for bounded quadrics
    for a, b in ((pj, pk), (pk, pj)):
        if a.base_kind in (KIND_ELLIPSOID_BODY, KIND_ELLIPSOID_HOLE):
            box_lo, box_hi = ellipsoid_bounding_box(a)
            # pad the box to full dimension: ellipsoid metadata spans its own vars
            if len(box_lo) < arr.n:
                box_lo = box_lo + [Fraction(int(lo[i])) for i in range(len(box_lo), arr.n)]
                box_hi = box_hi + [Fraction(int(hi[i])) for i in range(len(box_hi), arr.n)]
            try:
                if exact_min_on_box(b.f, box_lo, box_hi) > 0:
                    return {
                        "status": "empty",
                        "certified": True,
                        "points": [],
                        "detail": "separated: other constraint strictly positive on bounding box",
                    }
            except InputError:
                pass

    supp_j = [v for v in pj.f.support() if v != 1]
    supp_k = [v for v in pk.f.support() if v != 1]

    if len(supp_j) <= 1 and len(supp_k) <= 1:
        return _pair_intersection_planar(arr, j, k, lo, hi, sweep)
    return _pair_intersection_general(arr, j, k, lo, hi)


def _descriptor_ok(prim: Primitive, point) -> bool:
    if _is_exact_point(point):
        return prim.component.satisfied(point)
    return prim.component.satisfied_float(point)


def _full_point(arr: Arrangement, assign: dict):
    """Complete an exact partial assignment with seed coordinates."""
    exact = all(isinstance(v, (int, Fraction)) for v in assign.values())
    if exact:
        p = list(arr.seed_point)
        for var, value in assign.items():
            p[var - 1] = Fraction(value)
        return tuple(p)
    p = [float(v) for v in arr.seed_point]
    for var, value in assign.items():
        p[var - 1] = float(value)
    return tuple(p)


def _in_window(point, lo, hi) -> bool:
    return all(lo[i] - 1e-9 <= float(v) <= hi[i] + 1e-9 for i, v in enumerate(point))


def _pair_intersection_planar(arr, j, k, lo, hi, sweep) -> dict:
    """Both constraints involve x1 and at most one other variable each."""
    pj, pk = arr.primitives[j], arr.primitives[k]
    vj = _second_var(pj)
    vk = _second_var(pk)

    x1_only_j = pj.f.support() == (1,)
    x1_only_k = pk.f.support() == (1,)

    points = []
    certified_empty = None

    if x1_only_j and x1_only_k:
        roots_j, ej = _exact_roots_univariate(pj.f, 1)
        roots_k, ek = _exact_roots_univariate(pk.f, 1)
        if roots_j == "all" or roots_k == "all":
            return {"status": "not_found", "certified": False, "points": [],
                    "detail": "degenerate constant-zero constraint"}
        common = [r for r in roots_j if any(r == s for s in roots_k)]
        if not common:
            return {
                "status": "empty",
                "certified": ej and ek,
                "points": [],
                "detail": "parallel x1-level sets with distinct levels",
            }
        for r in common:
            points.append(_full_point(arr, {1: r}))
    elif x1_only_j or x1_only_k:
        face, other = (pj, pk) if x1_only_j else (pk, pj)
        roots, exact = _exact_roots_univariate(face.f, 1)
        if roots == "all":
            roots = []
        for r in roots:
            g = other.f.substitute(1, Fraction(r) if exact else Fraction(float(r)))
            if _restrict_to_var(g, _second_var(other)) and g.support():
                var = _second_var(other)
                sols, sol_exact = _exact_roots_univariate(g, var)
                if sols == "all":
                    sols = [Fraction(0)]
                for s in sols:
                    pt = _full_point(arr, {1: r, var: s})
                    if _descriptor_ok(other, pt) and _descriptor_ok(face, pt):
                        points.append(pt)
                if sols and not points and sol_exact and exact:
                    certified_empty = "all zero-set solutions lie on the unselected component"
            elif not g.support():
                if g.coefficient((0,) * arr.n) == 0:
                    # the whole face lies inside the zero set of the other constraint
                    pt = _full_point(arr, {1: r})
                    points.append(pt)
                else:
                    certified_empty = "constraint is a nonzero constant on the face"
    else:
        # both have a genuine second variable
        if vj == vk:
            points, certified_empty = _same_plane_intersections(arr, pj, pk, vj, lo, hi, sweep)
        else:
            # independent second coordinates: one-parameter family; representatives
            x1s = np.linspace(lo[0], hi[0], 25)
            for x1 in x1s:
                sj = _solutions_at_x1_float(pj, float(x1))
                sk = _solutions_at_x1_float(pk, float(x1))
                for aj in sj:
                    for ak in sk:
                        assign = {1: float(x1)}
                        assign.update(aj)
                        assign.update(ak)
                        pt = _full_point(arr, assign)
                        if _descriptor_ok(pj, pt) and _descriptor_ok(pk, pt):
                            points.append(pt)
                if len(points) >= 8:
                    break

    points = [p for p in points if _in_window(p, lo, hi)]
    points = _dedupe_points(points)
    if points:
        return {"status": "found", "certified": True, "points": points, "detail": ""}
    if certified_empty:
        return {"status": "empty", "certified": True, "points": [], "detail": certified_empty}
    return {"status": "not_found", "certified": False, "points": [],
            "detail": "no intersection located within the window"}


def _same_plane_intersections(arr, pj, pk, v, lo, hi, sweep):
    """Common zeros of two constraints in the (x1, x_v) plane."""
    points = []
    certified_empty = None

    # If either is affine, substitute its graph into the other: exact roots.
    for a, b in ((pj, pk), (pk, pj)):
        ca, la, qa = a.f.as_quadratic()
        if not qa:
            if la.get(v, 0) != 0:
                # x_v = -(ca + l1*x1)/lv
                lv = la[v]
                x1p = Polynomial.variable(arr.n, 1)
                graph = Polynomial.constant(arr.n, -ca / lv) - x1p * (la.get(1, Fraction(0)) / lv)
                composed = _substitute_var_poly(b.f, v, graph)
                roots, exact = _exact_roots_univariate(composed, 1)
                if roots == "all":
                    roots = []
                sols = []
                for r in roots:
                    rv = graph.eval([r] + [0] * (arr.n - 1)) if exact else None
                    if rv is None:
                        rv = graph.eval_float([float(r)] + [0.0] * (arr.n - 1))
                    sols.append((r, rv))
                for r, rv in sols:
                    pt = _full_point(arr, {1: r, v: rv})
                    if _descriptor_ok(pj, pt) and _descriptor_ok(pk, pt):
                        points.append(pt)
                if not points and exact:
                    certified_empty = (
                        "no common zeros on the selected components (exact elimination)"
                        if roots
                        else "elimination has no real roots"
                    )
                return points, certified_empty

    # both quadratic in the plane: eliminate via hyperbola form if available
    for a, b in ((pj, pk), (pk, pj)):
        if a.base_kind == KIND_HYPERBOLA:
            aa, bb, cc = a.metadata["a"], a.metadata["b"], a.metadata["c"]
            # On {f_a = 0}: (x1 - aa)(x_v - bb) = cc. Substitute x_v = bb + cc/(x1 - aa)
            # and clear the denominator: examine b.f * (x1 - aa)^2 as poly in x1.
            composed = _compose_hyperbola(b.f, arr.n, v, aa, bb, cc)
            roots, exact = _exact_roots_from_poly(composed)
            if roots == "all":
                return points, None
            got = False
            for r in roots:
                denom = (Fraction(r) if exact else float(r)) - (aa if exact else float(aa))
                if denom == 0:
                    continue
                rv = (bb if exact else float(bb)) + (cc if exact else float(cc)) / denom
                pt = _full_point(arr, {1: r, v: rv})
                if abs(pj.f.eval_float([float(x) for x in pt])) < 1e-7 and abs(
                    pk.f.eval_float([float(x) for x in pt])
                ) < 1e-7:
                    got = True
                    if _descriptor_ok(pj, pt) and _descriptor_ok(pk, pt):
                        points.append(pt)
            if exact and not points:
                certified_empty = (
                    "all common zeros lie on unselected components (exact elimination)"
                    if got or roots
                    else "elimination has no real roots"
                )
            return points, certified_empty

    # e.g. two ellipse boundaries in the same plane: subtract and retry,
    # falling back to a float sweep with bisection.
    diff = pj.f - pk.f
    cd, ld, qd = diff.as_quadratic()
    if not qd and (ld.get(v, 0) != 0 or ld.get(1, 0) != 0):
        if ld.get(v, 0) != 0:
            lv = ld[v]
            x1p = Polynomial.variable(arr.n, 1)
            graph = Polynomial.constant(arr.n, -cd / lv) - x1p * (ld.get(1, Fraction(0)) / lv)
            composed = _substitute_var_poly(pj.f, v, graph)
            roots, exact = _exact_roots_univariate(composed, 1)
            if roots == "all":
                roots = []
            for r in roots:
                if exact:
                    rv = graph.eval([r] + [Fraction(0)] * (arr.n - 1))
                else:
                    rv = graph.eval_float([float(r)] + [0.0] * (arr.n - 1))
                pt = _full_point(arr, {1: r, v: rv})
                if _descriptor_ok(pj, pt) and _descriptor_ok(pk, pt):
                    points.append(pt)
            if not points and exact:
                certified_empty = "no common zeros (exact elimination via difference line)"
            return points, certified_empty
        else:
            lv1 = ld[1]
            r = -cd / lv1
            g = pj.f.substitute(1, r)
            if _restrict_to_var(g, v):
                sols, exact = _exact_roots_univariate(g, v)
                if sols == "all":
                    sols = []
                for s in sols:
                    pt = _full_point(arr, {1: r, v: s})
                    if abs(pk.f.eval_float([float(x) for x in pt])) < 1e-7:
                        if _descriptor_ok(pj, pt) and _descriptor_ok(pk, pt):
                            points.append(pt)
                if not points and exact:
                    certified_empty = "no common zeros (exact elimination via difference level)"
                return points, certified_empty

    # float sweep fallback
    x1s = np.linspace(lo[0], hi[0], sweep)
    prev = {}
    for x1 in x1s:
        sj = _solutions_at_x1_float(pj, float(x1))
        sk = _solutions_at_x1_float(pk, float(x1))
        for aj in sj:
            for ak in sk:
                gap = aj[v] - ak[v]
                key = (round(aj[v], 2), round(ak[v], 2))
                if key in prev and prev[key][0] * gap <= 0:
                    x1r, vr = _bisect_pair(pj, pk, v, prev[key][1], float(x1))
                    if x1r is not None:
                        pt = _full_point(arr, {1: x1r, v: vr})
                        if _descriptor_ok(pj, pt) and _descriptor_ok(pk, pt):
                            points.append(pt)
                prev[key] = (gap, float(x1))
    return points, certified_empty


def _bisect_pair(pj, pk, v, x1_lo, x1_hi):
    """Bisect the matched-root gap of two constraints between two x1 values."""

    def gap(x1):
        sj = _solutions_at_x1_float(pj, x1)
        sk = _solutions_at_x1_float(pk, x1)
        if not sj or not sk:
            return None, None
        best = None
        for aj in sj:
            for ak in sk:
                g = aj[v] - ak[v]
                if best is None or abs(g) < abs(best[0]):
                    best = (g, 0.5 * (aj[v] + ak[v]))
        return best

    g_lo = gap(x1_lo)
    g_hi = gap(x1_hi)
    if g_lo is None or g_hi is None or g_lo[0] is None or g_hi[0] is None:
        return None, None
    if g_lo[0] * g_hi[0] > 0 and min(abs(g_lo[0]), abs(g_hi[0])) > 1e-9:
        return None, None
    lo_t, hi_t = x1_lo, x1_hi
    for _ in range(80):
        mid = 0.5 * (lo_t + hi_t)
        g_mid = gap(mid)
        if g_mid is None or g_mid[0] is None:
            return None, None
        if g_lo[0] * g_mid[0] <= 0:
            hi_t = mid
            g_hi = g_mid
        else:
            lo_t = mid
            g_lo = g_mid
    final = gap(0.5 * (lo_t + hi_t))
    if final is None or final[0] is None or abs(final[0]) > 1e-6:
        return None, None
    return 0.5 * (lo_t + hi_t), final[1]


def _substitute_var_poly(f: Polynomial, var: int, replacement: Polynomial) -> Polynomial:
    """Substitute a polynomial for one variable (exact)."""
    out = Polynomial.zero(f.num_vars)
    for exps, coeff in f.terms_grlex():
        term = Polynomial.constant(f.num_vars, coeff)
        for i, e in enumerate(exps):
            if e == 0:
                continue
            base = replacement if (i + 1) == var else Polynomial.variable(f.num_vars, i + 1)
            term = term * base ** e
        out = out + term
    return out


def _compose_hyperbola(f: Polynomial, n: int, v: int, a, b, c) -> Polynomial:
    """f with x_v = b + c/(x1 - a) substituted, cleared by (x1 - a)^2."""
    x1 = Polynomial.variable(n, 1)
    den = x1 - a
    num = den * b + Polynomial.constant(n, c)  # x_v * (x1 - a)
    out = Polynomial.zero(n)
    for exps, coeff in f.terms_grlex():
        term = Polynomial.constant(n, coeff)
        deg_v = exps[v - 1]
        for i, e in enumerate(exps):
            if e == 0 or (i + 1) == v:
                continue
            term = term * Polynomial.variable(n, i + 1) ** e
        term = term * num ** deg_v * den ** (2 - deg_v)
        out = out + term
    return out


def _exact_roots_from_poly(g: Polynomial):
    """Real roots of a univariate (in x1) polynomial of degree <= 4."""
    if g.is_zero:
        return "all", True
    supp = g.support()
    if not supp:
        return [], True
    if supp != (1,):
        return [], False
    if g.degree() <= 2:
        roots, exact = _exact_roots_univariate(g, 1)
        return (roots if roots != "all" else []), exact
    coeffs = [0.0] * (g.degree() + 1)
    for exps, coeff in g.terms_grlex():
        coeffs[g.degree() - exps[0]] = float(coeff)
    roots = np.roots(coeffs)
    real = [float(r.real) for r in roots if abs(r.imag) < 1e-9]
    return sorted(set(real)), False


def _solve_on_quadric(arr: Arrangement, prim: Primitive, fixed: dict):
    """Zero points of a quadric after fixing some coordinates.

    Remaining free coordinates are pinned to the quadric's center (or the
    seed) except one, which is solved exactly where possible.
    """
    g = prim.f
    for var, value in fixed.items():
        g = g.substitute(var, Fraction(value))
    supp = g.support()
    if not supp:
        return []
    centers = prim.metadata.get("centers")
    assign = dict(fixed)
    const, lin, quad = g.as_quadratic()
    solve_var = next((v for v in supp if (v, v) in quad), supp[0])
    for v in supp:
        if v == solve_var:
            continue
        value = centers[v - 1] if centers and len(centers) >= v else arr.seed_point[v - 1]
        assign[v] = Fraction(value)
        g = g.substitute(v, Fraction(value))
    sols, _ = _exact_roots_univariate(g, solve_var)
    if sols == "all":
        sols = [Fraction(0)]
    points = []
    for s in sols:
        full = dict(assign)
        full[solve_var] = s
        points.append(_full_point(arr, full))
    return points


def _pair_intersection_general(arr: Arrangement, j: int, k: int, lo, hi) -> dict:
    """Intersection search when a constraint involves several coordinates.

    Reached only when the exact separation certificate failed, so a genuine
    crossing is likely; failure to locate one is reported as not_found.
    """
    pj, pk = arr.primitives[j], arr.primitives[k]
    a, b = (pj, pk) if len(pj.f.support()) >= len(pk.f.support()) else (pk, pj)
    points = []
    supp_b = b.f.support()
    fixings: list[dict] = []
    if supp_b == (1,):
        roots, _ = _exact_roots_univariate(b.f, 1)
        if roots != "all":
            fixings = [{1: r} for r in roots]
    elif len(supp_b) == 1:
        v = supp_b[0]
        const, lin, quad = b.f.as_quadratic()
        if not quad:
            fixings = [{v: -const / lin[v]}]
        else:
            roots, _ = _exact_roots_univariate(b.f, v)
            if roots != "all":
                fixings = [{v: r} for r in roots]
    elif len(supp_b) == 2 and 1 in supp_b:
        v = _second_var(b)
        for x1 in np.linspace(lo[0], hi[0], 61):
            for sol in _solutions_at_x1_float(b, float(x1)):
                fixings.append({1: float(x1), v: sol[v]})
    else:
        # both constraints genuinely multi-coordinate: walk a's boundary
        fixings = []
        pts = _quadric_pair_search(arr, a, b)
        points.extend(pts)

    for fixed in fixings:
        for pt in _solve_on_quadric(arr, a, fixed):
            fpt = [float(x) for x in pt]
            if abs(a.f.eval_float(fpt)) < 1e-7 and abs(b.f.eval_float(fpt)) < 1e-7:
                if _descriptor_ok(pj, pt) and _descriptor_ok(pk, pt):
                    points.append(pt)
        if len(points) >= 8:
            break

    points = [p for p in points if _in_window(p, lo, hi)]
    points = _dedupe_points(points)
    if points:
        return {"status": "found", "certified": False, "points": points, "detail": ""}
    return {"status": "not_found", "certified": False, "points": [],
            "detail": "no intersection located (multi-coordinate constraints)"}


def _quadric_pair_search(arr: Arrangement, a: Primitive, b: Primitive, samples: int = 512):
    """Sign-change search for {b = 0} along the boundary of quadric ``a``."""
    centers = a.metadata.get("centers")
    radii = a.metadata.get("radii_sq")
    if centers is None or radii is None:
        return []
    k = len(centers)
    rng = np.random.default_rng(1234)
    dirs = rng.normal(size=(samples, k))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    roots = np.sqrt(np.array([float(r) for r in radii]))
    base = np.array([float(c) for c in centers])
    pts_k = base[None, :] + dirs * roots[None, :]
    pts = np.repeat(np.array([[float(v) for v in arr.seed_point]]), samples, axis=0)
    pts[:, :k] = pts_k
    vals = b.f.eval_batch(pts)
    out = []
    for i in range(samples - 1):
        if vals[i] == 0.0:
            out.append(tuple(pts[i]))
        if vals[i] * vals[i + 1] < 0:
            d1, d2 = dirs[i], dirs[i + 1]
            lo_d, hi_d = d1, d2
            for _ in range(60):
                mid = lo_d + hi_d
                mid /= np.linalg.norm(mid)
                p = np.array([float(v) for v in arr.seed_point])
                p[:k] = base + mid * roots
                v = b.f.eval_float(p)
                if v * vals[i] > 0:
                    lo_d = mid
                else:
                    hi_d = mid
            p = np.array([float(v) for v in arr.seed_point])
            mid = lo_d + hi_d
            mid /= np.linalg.norm(mid)
            p[:k] = base + mid * roots
            if abs(b.f.eval_float(p)) < 1e-6:
                out.append(tuple(p))
        if len(out) >= 4:
            break
    return out


def _dedupe_points(points, digits: int = 9):
    seen = {}
    for p in points:
        key = tuple(round(float(v), digits) for v in p)
        if key not in seen:
            seen[key] = p
    return list(seen.values())


# ---------------------------------------------------------------------------
# the aggregated domain check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NcdBudget:
    """Sample counts and resolutions for check_ncd."""

    grid_step: float = 0.02
    window: Fraction | None = None
    interior_samples: int = 200
    boundary_samples: int = 200
    zero_samples: int = 120
    sweep_points: int = 241
    max_witnesses: int = 5


def _plane_coeff_matrix(f: Polynomial, axes: tuple[int, int], fixed: dict) -> np.ndarray:
    g = f
    for var, val in fixed.items():
        g = g.substitute(var, Fraction(val))
    C = np.zeros((3, 3))
    for exps, coeff in g.terms_grlex():
        ei = exps[axes[0] - 1]
        ej = exps[axes[1] - 1]
        if sum(exps) != ei + ej:
            raise InputError("restricted polynomial has stray variables")
        C[ei, ej] += float(coeff)
    return C


def _grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def plane_min_values(arr: Arrangement, axes, fixed, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """min_j f_j on the (axes[0], axes[1]) coordinate-plane grid u x v.

    The other coordinates are fixed (exact substitution); each degree <= 2
    restriction evaluates as a 3x3 coefficient matrix sandwiched between
    Vandermonde factors, so the grid cost is a few small matmuls.
    """
    U = np.stack([np.ones_like(u), u, u * u], axis=1)
    V = np.stack([np.ones_like(v), v, v * v], axis=1)
    out = None
    for prim in arr.primitives:
        C = _plane_coeff_matrix(prim.f, axes, fixed)
        vals = (U @ C) @ V.T
        out = vals if out is None else np.minimum(out, vals)
    return out


def _plane_masks(arr: Arrangement, axes, fixed, lo, hi, step):
    """(all >= 0 mask, all > 0 mask, axis arrays) on a coordinate plane."""
    u = _grid_axis(lo[axes[0] - 1], hi[axes[0] - 1], step)
    v = _grid_axis(lo[axes[1] - 1], hi[axes[1] - 1], step)
    vals = plane_min_values(arr, axes, fixed, u, v)
    return vals >= 0, vals > 0, u, v


def check_ncd(arr: Arrangement, budget: NcdBudget | None = None, seed: int = 0) -> dict:
    """Aggregate domain check; returns a deterministic, JSON-able report.

    Conditions: (a) closure consistency on grids, (b) off-component
    separation, (c) transversality at located intersections (missed
    intersections are reported as not_found, never as empty), (d)
    connectivity from the seed point, plus seed interiority and exact
    separation of ellipsoid boundaries from every other hypersurface.
    """
    budget = budget or NcdBudget()
    lo, hi = window_box(arr, budget.window)
    checks: list[dict] = []

    # seed interiority (exact)
    seed_status, _ = membership(arr, arr.seed_point)
    checks.append(
        {
            "id": "seed_interior",
            "passed": seed_status == "interior",
            "detail": f"seed point classified as {seed_status}",
        }
    )

    # (a) closure consistency + (d) connectivity on plane grids
    fixed_all = {i + 1: arr.seed_point[i] for i in range(arr.n)}
    planes = [(1, i) for i in range(2, arr.n + 1)]
    closure_failures = []
    component_counts = []
    for axes in planes:
        fixed = {v: val for v, val in fixed_all.items() if v not in axes}
        ge, gt, u, v = _plane_masks(arr, axes, fixed, lo, hi, budget.grid_step)
        dilated = ndimage.binary_dilation(gt, structure=np.ones((3, 3), bool), iterations=2)
        bad = ge & ~dilated
        if bad.any():
            iu, iv = np.argwhere(bad)[0]
            closure_failures.append(
                {"plane": list(axes), "point": [float(u[iu]), float(v[iv])]}
            )
        if gt.any():
            labels, ncomp = ndimage.label(gt)
            component_counts.append({"plane": list(axes), "components": int(ncomp)})
        else:
            component_counts.append({"plane": list(axes), "components": 0})
    checks.append(
        {
            "id": "closure_consistency",
            "passed": not closure_failures,
            "grid_step": budget.grid_step,
            "planes": [list(a) for a in planes],
            "failures": closure_failures[: budget.max_witnesses],
        }
    )
    conn_ok = all(c["components"] == 1 for c in component_counts)
    checks.append(
        {
            "id": "connectivity",
            "passed": conn_ok,
            "component_counts": component_counts,
        }
    )

    # (b) off-component separation
    separation_failures = []
    for j, prim in enumerate(arr.primitives):
        if prim.component.is_empty:
            continue
        zero_pts = sample_zero_set(arr, j, budget.zero_samples, seed + 101 + j, budget.window)
        for point, on_comp in zero_pts:
            if on_comp:
                continue
            others_ok = all(
                arr.primitives[k].f.eval_float(point) >= -ACTIVATION_TOL
                for k in range(arr.l)
                if k != j
            )
            if others_ok:
                separation_failures.append(
                    {"constraint": j, "point": [float(x) for x in point]}
                )
    checks.append(
        {
            "id": "off_component_separation",
            "passed": not separation_failures,
            "failures": separation_failures[: budget.max_witnesses],
        }
    )

    # ellipsoid boundaries must avoid every other hypersurface (exact)
    ell_failures = []
    ell_pairs = 0
    for j, prim in enumerate(arr.primitives):
        # only full-dimensional ellipsoid boundaries must avoid the other
        # hypersurfaces; cylinders over lower-dimensional ellipsoids may meet them
        if prim.kind not in (KIND_ELLIPSOID_BODY, KIND_ELLIPSOID_HOLE):
            continue
        if len(prim.metadata["centers"]) != arr.n:
            continue
        box_lo, box_hi = ellipsoid_bounding_box(prim)
        for k, other in enumerate(arr.primitives):
            if k == j:
                continue
            ell_pairs += 1
            try:
                m = exact_min_on_box(other.f, box_lo, box_hi)
                ok = m > 0
                witness = None
            except InputError:
                ok, m, witness = False, None, None
            if not ok:
                res = pair_intersection(arr, j, k, budget.window, budget.sweep_points)
                if res["status"] == "found":
                    witness = [float(x) for x in res["points"][0]]
                    ell_failures.append(
                        {"ellipsoid": j, "other": k, "witness": witness,
                         "detail": "boundary meets another hypersurface"}
                    )
                elif res["status"] == "not_found":
                    ell_failures.append(
                        {"ellipsoid": j, "other": k, "witness": None,
                         "detail": "separation not certified and no witness located"}
                    )
    checks.append(
        {
            "id": "ellipsoid_separation",
            "passed": not ell_failures,
            "pairs_checked": ell_pairs,
            "failures": ell_failures[: budget.max_witnesses],
        }
    )

    # (c) transversality at located pairwise/tuple intersections
    trans_failures = []
    pair_records = []
    rank_points = []
    for j in range(arr.l):
        for k in range(j + 1, arr.l):
            res = pair_intersection(arr, j, k, budget.window, budget.sweep_points)
            pair_records.append(
                {"pair": [j, k], "status": res["status"], "detail": res["detail"],
                 "points": [[float(x) for x in p] for p in res["points"][:3]]}
            )
            rank_points.extend(res["points"][: budget.max_witnesses])
    boundary = sample_boundary(arr, budget.boundary_samples, seed + 7, budget.window)
    for point, active in boundary:
        rank_points.append(tuple(point))
    seen_sets = set()
    tuples_checked = 0
    for point in _dedupe_points(rank_points):
        status, active = membership(arr, point, tol=1e-7)
        if status != "boundary" or not active:
            continue
        report = check_transversality_at(arr, point, active, tol=1e-7)
        tuples_checked += 1
        key = active
        if key not in seen_sets:
            seen_sets.add(key)
        if not report["passed"]:
            trans_failures.append(report)
    checks.append(
        {
            "id": "transversality",
            "passed": not trans_failures,
            "points_checked": tuples_checked,
            "active_sets_seen": sorted(list(s) for s in seen_sets),
            "pairs": pair_records,
            "failures": trans_failures[: budget.max_witnesses],
        }
    )

    # boundary sample sanity: nonempty active sets that pass the rank test
    bnd_fail = []
    for point, active in boundary:
        if not active:
            bnd_fail.append({"point": [float(x) for x in point], "detail": "empty active set"})
    checks.append(
        {
            "id": "boundary_samples",
            "passed": not bnd_fail,
            "count": len(boundary),
            "failures": bnd_fail[: budget.max_witnesses],
        }
    )

    passed = all(c["passed"] for c in checks)
    return {
        "id": "check_ncd",
        "passed": passed,
        "seed": seed,
        "grid_step": budget.grid_step,
        "checks": checks,
    }
