"""Verification of the claimed properties of a lifted arrangement.

Checks: Jacobian rank of the defining equations (non-singularity), the image
interval of the coordinate function f = x1, its singular values, slice
boundedness against the labels, and fiber structure.

Slice boundedness is decided twice and the two verdicts must agree:

* analytically, from the restriction of each degree <= 2 constraint to the
  hyperplane x1 = t (exact rational arithmetic; the slice is an intersection
  of per-coordinate intervals, convex bodies and removed blobs, so a missing
  bound is a genuine recession direction);
* empirically, by membership evaluation at escape probes 2x, 4x and 8x the
  window radius from a feasible slice point.

Compactness of the preimage f^-1(t) on the manifold reduces to boundedness
of the base slice: each ||y_j||^2 = f_j(x) is continuous, so the preimage of
a bounded closed slice is closed and bounded, and an unbounded slice lifts
to an unbounded preimage.

A point of the manifold is singular for f exactly when e1 lies in the span
of the gradients of the constraints active at its base point: slack blocks
with y_j != 0 force their multiplier to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .arrangement import (
    ACTIVATION_TOL,
    Arrangement,
    NcdBudget,
    check_ncd,
    check_transversality_at,
    membership,
    pair_intersection,
    sample_boundary,
    window_box,
)
from .errors import ClassifierDisagreement, InputError
from .lift import LiftedManifold, embed_fiber_point, fiber_at, jacobian_batch, sample_manifold
from .linalg import exact_rank, sqrt_bounds, sqrt_fraction
from .poly import Polynomial

RANK_RATIO = 1e-8
IMAGE_TOL = 1e-12
SINGULAR_TOL = 1e-6
SPAN_RESIDUAL_TOL = 1e-8
MEMBER_TOL = 1e-9
ESCAPE_SCALES = (2, 4, 8)


@dataclass(frozen=True)
class VerifyConfig:
    samples: int = 2000
    seed: int = 42
    window: Fraction | None = None
    slice_points_per_interval: int = 5
    ncd_budget: NcdBudget = field(default_factory=NcdBudget)
    include_ncd: bool = True


# ---------------------------------------------------------------------------
# exact slice analysis
# ---------------------------------------------------------------------------


@dataclass
class SliceAnalysis:
    empty: bool
    reason: str
    # per variable (1-based, >= 2): [lo, hi] with None for unbounded sides
    lower: dict
    upper: dict
    bounded_vars: set
    unbounded_dirs: list

    def var_interval(self, i):
        return self.lower.get(i), self.upper.get(i)


def _analyze_slice(arr: Arrangement, t: Fraction) -> SliceAnalysis:
    """Exact per-coordinate interval analysis of the restriction to x1 = t."""
    t = Fraction(t)
    lower: dict[int, Fraction] = {}
    upper: dict[int, Fraction] = {}
    bounded_vars: set[int] = set()
    bodies: list[tuple[dict, dict, Fraction]] = []

    def tighten_lower(i, v):
        if i not in lower or v > lower[i]:
            lower[i] = v

    def tighten_upper(i, v):
        if i not in upper or v < upper[i]:
            upper[i] = v

    for prim in arr.primitives:
        g = prim.f.substitute(1, t)
        if g.is_zero:
            continue  # constraint vanishes identically on the slice
        const, lin, quad = g.as_quadratic()
        if not lin and not quad:
            if const < 0:
                return SliceAnalysis(
                    True, f"constraint {prim.f.to_text()} is {const} < 0 at x1 = {t}",
                    {}, {}, set(), [],
                )
            continue
        if not quad:
            supp = [i for i, c in lin.items() if c != 0]
            if len(supp) != 1:
                raise InputError(
                    "restricted affine constraint involves several variables; "
                    "the analytic slice classifier does not support this shape"
                )
            i = supp[0]
            bound = -const / lin[i]
            if lin[i] > 0:
                tighten_lower(i, bound)
            else:
                tighten_upper(i, bound)
            continue
        diag = {i: c for (i, j), c in quad.items() if i == j}
        if any(i != j for (i, j) in quad):
            raise InputError("restricted constraint has a bilinear term; unsupported")
        if all(c < 0 for c in diag.values()):
            # convex body: every participating variable is bounded
            bodies.append((diag, lin, const))
            bounded_vars.update(diag.keys())
        elif all(c > 0 for c in diag.values()):
            continue  # removed blob: never bounds, never empties the slice
        else:
            raise InputError("restricted constraint has mixed quadratic signs")

    # emptiness and per-variable intervals from bodies
    for diag, lin, const in bodies:
        # peak of sum_j (d_j x^2 + l_j x) is attained coordinatewise at vertices
        peak = const
        for i, d in diag.items():
            li = lin.get(i, Fraction(0))
            peak += -li * li / (4 * d)
        if peak < 0:
            return SliceAnalysis(
                True, f"a convex body constraint is empty at x1 = {t}",
                {}, {}, set(), [],
            )
        for i, d in diag.items():
            li = lin.get(i, Fraction(0))
            others = peak - const - (-li * li / (4 * d))
            # d x^2 + l x + (const + others) >= 0, d < 0
            c_eff = const + others
            disc = li * li - 4 * d * c_eff
            if disc < 0:
                return SliceAnalysis(
                    True, f"body interval empty for x{i} at x1 = {t}", {}, {}, set(), [],
                )
            root_lo, _ = sqrt_bounds(disc)
            lo = (-li + root_lo) / (2 * d)
            hi = (-li - root_lo) / (2 * d)
            if lo > hi:
                lo, hi = hi, lo
            tighten_lower(i, lo)
            tighten_upper(i, hi)

    for i in range(2, arr.n + 1):
        lo, hi = lower.get(i), upper.get(i)
        if lo is not None and hi is not None and lo > hi:
            return SliceAnalysis(
                True, f"interval for x{i} is empty at x1 = {t}", {}, {}, set(), [],
            )

    unbounded = []
    for i in range(2, arr.n + 1):
        if i not in bounded_vars:
            if i not in upper:
                unbounded.append((i, +1))
            if i not in lower:
                unbounded.append((i, -1))
    return SliceAnalysis(False, "", lower, upper, bounded_vars, unbounded)


def exact_slice_point(arr: Arrangement, t: Fraction):
    """An exact point of the closed domain on the hyperplane x1 = t, or None."""
    t = Fraction(t)
    analysis = _analyze_slice(arr, t)
    if analysis.empty:
        return None
    point = [t]
    for i in range(2, arr.n + 1):
        lo, hi = analysis.var_interval(i)
        if lo is None and hi is None:
            point.append(Fraction(0))
        elif lo is None:
            point.append(hi - 1)
        elif hi is None:
            point.append(lo + 1)
        else:
            point.append((lo + hi) / 2)
    status, _ = membership(arr, tuple(point))
    if status == "exterior":
        return None
    return tuple(point)


# ---------------------------------------------------------------------------
# empirical slice classification
# ---------------------------------------------------------------------------


def _min_value_batch(arr: Arrangement, points: np.ndarray) -> np.ndarray:
    vals = np.stack([prim.f.eval_batch(points) for prim in arr.primitives])
    return vals.min(axis=0)


def _slice_feasible_point(arr: Arrangement, t: float, window=None):
    """Deterministic coordinate-ascent search for a point of D-bar on x1 = t."""
    exact = exact_slice_point(arr, Fraction(t))
    if exact is not None:
        return np.array([float(v) for v in exact])
    lo, hi = window_box(arr, window)
    point = np.array([float(v) for v in arr.seed_point])
    point[0] = t
    for _ in range(3):
        for i in range(1, arr.n):
            cands = np.linspace(lo[i], hi[i], 193)
            pts = np.repeat(point[None, :], len(cands) + 1, axis=0)
            pts[:-1, i] = cands
            vals = _min_value_batch(arr, pts)
            point = pts[int(np.argmax(vals))]
        if _min_value_batch(arr, point[None, :])[0] >= -MEMBER_TOL:
            break
    if _min_value_batch(arr, point[None, :])[0] >= -MEMBER_TOL:
        return point
    return None


@dataclass
class SliceClass:
    t: float
    boundedness: str  # "bounded" | "unbounded" | "empty"
    witness: dict
    component_count: int | None
    analytic: dict
    empirical: dict
    consistent: bool


def classify_slice(arr: Arrangement, t, window=None, seed: int = 0) -> SliceClass:
    """Classify the slice x1 = t by both routes; raises on disagreement."""
    t_frac = Fraction(t)
    analysis = _analyze_slice(arr, t_frac)
    if analysis.empty:
        analytic = {"verdict": "empty", "reason": analysis.reason}
    elif analysis.unbounded_dirs:
        analytic = {
            "verdict": "unbounded",
            "directions": [[i, s] for i, s in analysis.unbounded_dirs],
        }
    else:
        analytic = {"verdict": "bounded"}

    lo, hi = window_box(arr, window)
    w = float(max(abs(lo[1:]).max(), abs(hi[1:]).max()))
    base = _slice_feasible_point(arr, float(t), window)
    witness: dict = {}
    component_count = None
    if base is None:
        empirical = {"verdict": "empty"}
    else:
        rng = np.random.default_rng(seed)
        rand_dirs = []
        for _ in range(8):
            d = rng.normal(size=arr.n)
            d[0] = 0.0
            norm = np.linalg.norm(d)
            if norm > 0:
                rand_dirs.append(d / norm)
        scale_hits = {}
        for scale in ESCAPE_SCALES:
            r = scale * w
            probes = []
            # axis probes sit exactly at coordinate value +-r
            for i in range(1, arr.n):
                for sgn in (+1, -1):
                    p = base.copy()
                    p[i] = sgn * r
                    probes.append(p)
            probes.extend(base + r * d for d in rand_dirs)
            probes = np.array(probes)
            probes[:, 0] = float(t)
            vals = _min_value_batch(arr, probes)
            idx = np.where(vals >= -MEMBER_TOL)[0]
            scale_hits[scale] = probes[idx[0]] if len(idx) else None
        if all(h is not None for h in scale_hits.values()):
            empirical = {"verdict": "unbounded"}
            witness = {"escape_point": [float(v) for v in scale_hits[ESCAPE_SCALES[-1]]]}
        else:
            empirical = {"verdict": "bounded"}
            witness = {"enclosing_radius": _enclosing_radius(arr, base, w)}
        component_count = _slice_component_count(arr, float(t), base, lo, hi)
        empirical["component_count"] = component_count

    consistent = analytic["verdict"] == empirical["verdict"]
    if not consistent:
        raise ClassifierDisagreement(
            f"slice x1 = {t}: analytic says {analytic['verdict']}, "
            f"empirical says {empirical['verdict']}"
        )
    return SliceClass(
        t=float(t),
        boundedness=analytic["verdict"],
        witness=witness,
        component_count=component_count,
        analytic=analytic,
        empirical=empirical,
        consistent=consistent,
    )


def _enclosing_radius(arr: Arrangement, base: np.ndarray, w: float) -> float:
    """Max feasible coordinate deviation from the base slice point."""
    radius = 0.0
    for i in range(1, arr.n):
        for sgn in (+1, -1):
            lo_s, hi_s = 0.0, 2.05 * w

            def feasible(s):
                p = base.copy()
                p[i] += sgn * s
                return _min_value_batch(arr, p[None, :])[0] >= -MEMBER_TOL

            if feasible(hi_s):
                radius = max(radius, hi_s)
                continue
            for _ in range(60):
                mid = 0.5 * (lo_s + hi_s)
                if feasible(mid):
                    lo_s = mid
                else:
                    hi_s = mid
            radius = max(radius, lo_s)
    return radius


def _slice_component_count(arr: Arrangement, t: float, base: np.ndarray, lo, hi) -> int:
    """Grid component count of the slice within the window.

    Full grid for slice dimension <= 2; for higher dimensions, 2-D sections
    through the feasible point (the components expected is 1 either way).
    """
    if arr.n == 2:
        axis = np.arange(lo[1], hi[1] + 1e-12, 0.01)
        pts = np.column_stack([np.full_like(axis, t), axis])
        mask = _min_value_batch(arr, pts) >= 0
        return int(np.count_nonzero(np.diff(np.concatenate(([False], mask)).astype(int)) == 1))
    counts = []
    pairs = [(i, j) for i in range(1, arr.n) for j in range(i + 1, arr.n)]
    if arr.n > 3:
        pairs = [(1, j) for j in range(2, arr.n)]
    from .arrangement import plane_min_values

    for i, j in pairs:
        axes = (i + 1, j + 1)
        fixed = {1: Fraction(t)}
        for k in range(1, arr.n):
            if (k + 1) not in axes:
                fixed[k + 1] = Fraction(float(base[k]))
        u = np.arange(lo[i], hi[i] + 1e-12, 0.05)
        v = np.arange(lo[j], hi[j] + 1e-12, 0.05)
        mask = plane_min_values(arr, axes, fixed, u, v) >= 0
        if mask.any():
            _, ncomp = ndimage.label(mask)
            counts.append(int(ncomp))
    return max(counts) if counts else 0


# ---------------------------------------------------------------------------
# stressed base points (boundary strata, poles, corners)
# ---------------------------------------------------------------------------


def stressed_base_points(arr: Arrangement, seed: int, window=None, boundary_count: int = 120):
    """Boundary points covering every stratum the checks care about.

    Includes per-face exact points at x1 = t_1, t_l, ellipsoid poles, exact
    pairwise-intersection corners, and sampled boundary points.
    """
    points = []
    if arr.t_values:
        for t in (arr.t_values[0], arr.t_values[-1]):
            p = exact_slice_point(arr, t)
            if p is not None:
                points.append(p)
    for prim in arr.primitives:
        if "centers" not in prim.metadata:
            continue
        centers = prim.metadata["centers"]
        radii = prim.metadata["radii_sq"]
        root = sqrt_fraction(radii[0])
        if root is None:
            continue
        for sgn in (1, -1):
            pole = [centers[0] + sgn * root] + list(centers[1:])
            if len(pole) < arr.n:
                completion = exact_slice_point(arr, pole[0])
                if completion is None:
                    continue
                pole = list(pole) + list(completion[len(pole):])
            status, _ = membership(arr, tuple(pole))
            if status == "boundary":
                points.append(tuple(pole))
    for j in range(arr.l):
        for k in range(j + 1, arr.l):
            res = pair_intersection(arr, j, k, window)
            for p in res["points"][:4]:
                status, _ = membership(arr, tuple(p), tol=1e-7)
                if status == "boundary":
                    points.append(tuple(p))
    for p, _active in sample_boundary(arr, boundary_count, seed, window):
        points.append(tuple(p))
    return points


# ---------------------------------------------------------------------------
# non-singularity of the lifted manifold
# ---------------------------------------------------------------------------


def verify_nonsingular(lifted: LiftedManifold, samples: int = 2000, seed: int = 42, window=None) -> dict:
    """Jacobian rank = l at sampled manifold points, stressed strata included."""
    arr = lifted.arrangement
    rng = np.random.default_rng(seed)
    pts = sample_manifold(lifted, samples, seed, window)
    stressed = stressed_base_points(arr, seed + 3, window)
    stressed_pts = [embed_fiber_point(lifted, p, rng=rng) for p in stressed]
    if stressed_pts:
        pts = np.vstack([pts, np.array(stressed_pts)])
    J = jacobian_batch(lifted, pts)
    svals = np.linalg.svd(J, compute_uv=False)
    smax = svals[:, 0]
    k = min(J.shape[1], J.shape[2])
    ranks = (svals > RANK_RATIO * np.maximum(smax[:, None], 1e-300)).sum(axis=1)
    failures = []
    for i in np.where(ranks < lifted.l)[0][:5]:
        failures.append(
            {
                "point": [float(v) for v in pts[i]],
                "rank": int(ranks[i]),
                "smin": float(svals[i, k - 1]),
                "smax": float(svals[i, 0]),
            }
        )
    # exact spot check at rational stressed points: by the block structure,
    # the full Jacobian has rank l iff the active gradients are independent
    exact_checked = 0
    exact_failures = []
    for p in stressed:
        if not all(isinstance(v, (int, Fraction)) for v in p):
            continue
        status, active = membership(arr, p)
        if status != "boundary":
            continue
        rows = [[g.eval(p) for g in arr.primitives[j].f.gradient()] for j in active]
        exact_checked += 1
        if exact_rank(rows) != len(active):
            exact_failures.append({"point": [float(v) for v in p], "active": list(active)})
    return {
        "id": "nonsingular",
        "passed": not failures and not exact_failures,
        "points_checked": int(pts.shape[0]),
        "stressed_points": len(stressed),
        "exact_points_checked": exact_checked,
        "rank_required": lifted.l,
        "tolerance": RANK_RATIO,
        "failures": failures + exact_failures,
    }


# ---------------------------------------------------------------------------
# singular values of f = x1
# ---------------------------------------------------------------------------


def _e1_in_span(rows, point) -> tuple[bool, float]:
    exact = all(isinstance(v, (int, Fraction)) for v in point) and all(
        isinstance(v, (int, Fraction)) for row in rows for v in row
    )
    n = len(rows[0])
    e1 = [1] + [0] * (n - 1)
    if exact:
        base = exact_rank(rows)
        extended = exact_rank(rows + [e1])
        return base == extended, 0.0
    G = np.array(rows, dtype=float)
    lam, res, _, _ = np.linalg.lstsq(G.T, np.array(e1, dtype=float), rcond=None)
    resid = float(np.linalg.norm(G.T @ lam - np.array(e1, dtype=float)))
    return resid < SPAN_RESIDUAL_TOL, resid


def detect_singular_values(lifted: LiftedManifold, budget: int = 400, seed: int = 42, window=None) -> dict:
    """Collect f-values of detected singular points, clustered at 1e-6.

    A base boundary point is a singular witness iff e1 lies in the span of
    its active constraint gradients.  Exact candidates (poles, faces, exact
    corners) are tested with exact rank arithmetic.
    """
    arr = lifted.arrangement
    candidates = stressed_base_points(arr, seed, window, boundary_count=budget)
    hits = []
    for p in candidates:
        status, active = membership(arr, p, tol=1e-7)
        if status != "boundary" or not active:
            continue
        exact_pt = all(isinstance(v, (int, Fraction)) for v in p)
        if exact_pt:
            rows = [[g.eval(p) for g in arr.primitives[j].f.gradient()] for j in active]
        else:
            rows = [[g.eval_float(p) for g in arr.primitives[j].f.gradient()] for j in active]
        if all(all(v == 0 for v in row) for row in rows):
            continue
        in_span, resid = _e1_in_span(rows, p)
        if in_span:
            hits.append(
                {
                    "value": p[0],
                    "point": [float(v) for v in p],
                    "active": list(active),
                    "exact": exact_pt,
                    "residual": resid,
                }
            )
    # cluster values at SINGULAR_TOL, preferring exact representatives
    hits.sort(key=lambda h: float(h["value"]))
    clusters = []
    for h in hits:
        v = float(h["value"])
        if clusters and v - clusters[-1]["max"] <= SINGULAR_TOL:
            clusters[-1]["max"] = v
            clusters[-1]["hits"].append(h)
            if h["exact"] and not clusters[-1]["exact"]:
                clusters[-1]["value"] = v
                clusters[-1]["exact"] = True
        else:
            clusters.append({"value": v, "max": v, "exact": h["exact"], "hits": [h]})
    detected = [c["value"] for c in clusters]

    record = {
        "id": "singular_values",
        "detected": detected,
        "witnesses": [
            {
                "value": float(c["value"]),
                "exact": c["exact"],
                "point": c["hits"][0]["point"],
                "active": c["hits"][0]["active"],
            }
            for c in clusters
        ],
        "tolerance": SINGULAR_TOL,
    }
    if arr.t_values is not None:
        expected = [float(t) for t in arr.t_values]
        missing = [
            t for t in expected if not any(abs(t - d) <= SINGULAR_TOL for d in detected)
        ]
        spurious = [
            d for d in detected if not any(abs(t - d) <= SINGULAR_TOL for t in expected)
        ]
        record.update(
            expected=expected,
            missing_flagged_not_found=missing,
            spurious=spurious,
            passed=not missing and not spurious,
        )
    else:
        record["passed"] = True
    return record


# ---------------------------------------------------------------------------
# image interval
# ---------------------------------------------------------------------------


def verify_image_interval(lifted: LiftedManifold, samples: int = 2000, seed: int = 42, window=None) -> dict:
    """Sampled f(M) inside [t1, tl]; endpoints attained; 100-bucket sweep covered."""
    arr = lifted.arrangement
    if arr.t_values is None:
        raise InputError("image check needs t values on the arrangement")
    t1, tl = arr.t_values[0], arr.t_values[-1]
    pts = sample_manifold(lifted, samples, seed, window)
    values = pts[:, 0]
    out_of_range = values[(values < float(t1) - IMAGE_TOL) | (values > float(tl) + IMAGE_TOL)]
    endpoint_witnesses = {}
    for name, t in (("low", t1), ("high", tl)):
        p = exact_slice_point(arr, t)
        endpoint_witnesses[name] = None if p is None else [float(v) for v in p]
    width = (tl - t1) / 100
    buckets_missing = []
    for b in range(100):
        lo_b = float(t1 + b * width)
        hi_b = float(t1 + (b + 1) * width)
        if np.any((values >= lo_b) & (values <= hi_b)):
            continue
        mid = t1 + width * Fraction(2 * b + 1, 2)
        if exact_slice_point(arr, mid) is None and _slice_feasible_point(arr, float(mid), window) is None:
            buckets_missing.append(b)
    passed = (
        len(out_of_range) == 0
        and endpoint_witnesses["low"] is not None
        and endpoint_witnesses["high"] is not None
        and not buckets_missing
    )
    return {
        "id": "image_interval",
        "passed": passed,
        "samples": int(pts.shape[0]),
        "range": [float(t1), float(tl)],
        "tolerance": IMAGE_TOL,
        "out_of_range": [float(v) for v in out_of_range[:5]],
        "endpoint_witnesses": endpoint_witnesses,
        "buckets_missing": buckets_missing,
    }


# ---------------------------------------------------------------------------
# the aggregated suite
# ---------------------------------------------------------------------------


def _check_slices(arr: Arrangement, config: VerifyConfig) -> dict:
    expected = arr.expected or {}
    intervals = expected.get("intervals")
    if not intervals:
        return {"id": "slices", "passed": True, "skipped": "no expected profile"}
    rows = []
    failures = []
    k = config.slice_points_per_interval
    for interval in intervals:
        lo, hi = Fraction(interval["lo"]), Fraction(interval["hi"])
        want_bounded = bool(interval["slice_bounded"])
        for step in range(1, k + 1):
            t = lo + (hi - lo) * Fraction(step, k + 1)
            try:
                sc = classify_slice(arr, t, config.window, config.seed)
            except ClassifierDisagreement as exc:
                failures.append({"t": float(t), "error": str(exc)})
                continue
            ok = (sc.boundedness == "bounded") == want_bounded
            comp_ok = sc.component_count == 1
            rows.append(
                {
                    "t": float(t),
                    "boundedness": sc.boundedness,
                    "expected_bounded": want_bounded,
                    "component_count": sc.component_count,
                    "witness": sc.witness,
                    "passed": ok and comp_ok,
                }
            )
            if not (ok and comp_ok):
                failures.append(rows[-1])
    return {
        "id": "slices",
        "passed": not failures,
        "points_per_interval": k,
        "rows": rows,
        "failures": failures[:5],
    }


def _check_fibers(lifted: LiftedManifold, config: VerifyConfig) -> dict:
    arr = lifted.arrangement
    pts = sample_manifold(lifted, min(config.samples, 500), config.seed + 5, config.window)
    failures = []
    for i in range(pts.shape[0]):
        q = pts[i]
        for j, eq in enumerate(lifted.equations):
            v = eq.eval_float(q)
            if abs(v) > 1e-10:
                failures.append({"point_index": int(i), "equation": j, "value": float(v)})
                break
    base_grid = []
    if arr.t_values:
        t1, tl = arr.t_values[0], arr.t_values[-1]
        for b in range(0, 21):
            t = t1 + (tl - t1) * Fraction(b, 20)
            p = exact_slice_point(arr, t)
            if p is not None:
                base_grid.append(p)
    fiber_issues = []
    for p in base_grid:
        fib = fiber_at(lifted, p)
        if fib["empty"]:
            fiber_issues.append({"base": [float(v) for v in p], "issue": "empty fiber"})
            continue
        if fib["dim"] > lifted.m - arr.n:
            fiber_issues.append({"base": [float(v) for v in p], "issue": "fiber dim too large"})
        if any(f.sphere_dim == 0 for f in fib["factors"]):
            fiber_issues.append({"base": [float(v) for v in p], "issue": "S^0 factor"})
    return {
        "id": "fibers",
        "passed": not failures and not fiber_issues and all(d >= 2 for d in lifted.block_sizes),
        "pullback_failures": failures[:5],
        "fiber_issues": fiber_issues[:5],
        "base_grid_points": len(base_grid),
        "block_sizes": list(lifted.block_sizes),
        "max_fiber_dim": lifted.m - arr.n,
    }


def run_suite(lifted: LiftedManifold, config: VerifyConfig | None = None) -> dict:
    """Run every check; the global verdict is their conjunction.

    The returned structure is deterministic for a fixed seed; wall-clock
    timings are intentionally kept out of it.
    """
    config = config or VerifyConfig()
    arr = lifted.arrangement
    checks = []
    if config.include_ncd:
        checks.append(check_ncd(arr, config.ncd_budget, config.seed))
    checks.append(verify_nonsingular(lifted, config.samples, config.seed, config.window))
    checks.append(verify_image_interval(lifted, config.samples, config.seed, config.window))
    checks.append(detect_singular_values(lifted, min(config.samples, 400), config.seed, config.window))
    checks.append(_check_slices(arr, config))
    checks.append(_check_fibers(lifted, config))
    passed = all(c.get("passed", False) for c in checks)
    return {
        "version": 1,
        "seed": config.seed,
        "provenance": arr.provenance,
        "m": lifted.m,
        "n": arr.n,
        "num_constraints": arr.l,
        "global_verdict": "pass" if passed else "fail",
        "checks": checks,
    }
