"""Case machines turning interval data into explicit arrangements.

Given a strictly increasing sequence ``t_1 < ... < t_l`` and a 0/1 label per
gap, ``build`` produces an arrangement whose x1-slices are bounded exactly
over the label-0 gaps.  Two families exist:

* ``mt2``: a box ``[t_1, t_l] x [0, 1]``, one hyperbola corridor per label-1
  gap, a bounding strip, and one removed ellipsoid per interior gap whose
  poles pin the interior transition values.
* ``mt3``: the box is replaced by ellipsoids (a plain ellipse for l = 2,
  a large ellipsoid or an ellipse cylinder otherwise); l = 3 is unsupported
  in this family.

Small cases (l = 2, 3) are transcribed directly as line/corridor pictures in
the plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arrangement import Arrangement, exact_min_on_box, membership
from .errors import ConstructionError, InputError
from .geom import (
    VARIANT_LEFT,
    VARIANT_RIGHT,
    Primitive,
    ellipsoid,
    embed_plane_primitive,
    half_plane,
    hyperbola_region,
    pad_primitive,
    region_R,
)
from .linalg import sqrt_fraction
from .poly import Polynomial

VARIANT_MT2 = "mt2"
VARIANT_MT3 = "mt3"


@dataclass(frozen=True)
class ConstructionInput:
    """Validated build request."""

    t: tuple[Fraction, ...]
    labels: tuple[int, ...]
    variant: str
    R: Fraction = Fraction(1)
    hole_shrink: Fraction = Fraction(1, 4)

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(Fraction(v) for v in self.t))
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        object.__setattr__(self, "R", Fraction(self.R))
        object.__setattr__(self, "hole_shrink", Fraction(self.hole_shrink))
        if len(self.t) < 2:
            raise InputError("need at least two t values")
        if any(a >= b for a, b in zip(self.t, self.t[1:])):
            raise InputError(f"t values must be strictly increasing, got {self.t}")
        if len(self.labels) != len(self.t) - 1:
            raise InputError(
                f"expected {len(self.t) - 1} labels for {len(self.t)} t values, "
                f"got {len(self.labels)}"
            )
        if any(v not in (0, 1) for v in self.labels):
            raise InputError("labels must be 0 or 1")
        if self.variant not in (VARIANT_MT2, VARIANT_MT3):
            raise InputError(f"variant must be 'mt2' or 'mt3', got {self.variant!r}")
        if self.variant == VARIANT_MT3 and len(self.t) == 3:
            raise InputError("variant mt3 requires l != 3")
        if self.R <= 0:
            raise InputError("strip half-width R must be positive")
        if not 0 < self.hole_shrink < 1:
            raise InputError("hole_shrink must lie in (0, 1)")

    @property
    def l(self) -> int:
        return len(self.t)


def predicted_profile(inp: ConstructionInput) -> dict:
    """Per-gap expectations consumed by the verification suite."""
    intervals = [
        {
            "lo": inp.t[j],
            "hi": inp.t[j + 1],
            "label": inp.labels[j],
            "slice_bounded": inp.labels[j] == 0,
        }
        for j in range(inp.l - 1)
    ]
    return {
        "image": [inp.t[0], inp.t[-1]],
        "singular_values": list(inp.t),
        "intervals": intervals,
    }


def build(inp: ConstructionInput) -> Arrangement:
    """Produce the arrangement for the requested case."""
    if inp.variant == VARIANT_MT2:
        if inp.l == 2:
            arr = _mt2_l2(inp)
        elif inp.l == 3:
            arr = _mt2_l3(inp)
        else:
            arr = _general(inp, box_base=True)
    else:
        if inp.l == 2:
            arr = _mt3_l2(inp)
        elif all(v == 0 for v in inp.labels):
            arr = _mt3_all_bounded(inp)
        else:
            arr = _general(inp, box_base=False)
    status, _ = membership(arr, arr.seed_point)
    if status != "interior":
        raise ConstructionError(
            f"internal error: seed point {arr.seed_point} is {status}"
        )
    return arr


def _finish(inp, n, prims, seed, provenance) -> Arrangement:
    return Arrangement(
        n=n,
        primitives=tuple(prims),
        seed_point=tuple(seed),
        provenance=provenance,
        t_values=inp.t,
        labels=inp.labels,
        variant=inp.variant,
        expected=predicted_profile(inp),
    )


# ---------------------------------------------------------------------------
# small cases
# ---------------------------------------------------------------------------


def _mt2_l2(inp: ConstructionInput) -> Arrangement:
    t1, t2 = inp.t
    prims = [
        half_plane((t1, 0), (t1, 1), "+"),
        half_plane((t1, 0), (t2, 0), "+"),
        half_plane((t2, 0), (t2, 1), "-"),
    ]
    if inp.labels[0] == 0:
        prims.append(half_plane((t1, 1), (t2, 1), "-"))
    mid = (t1 + t2) / 2
    return _finish(inp, 2, prims, (mid, Fraction(1, 2)), f"mt2:l=2:label={inp.labels[0]}")


def _mt2_l3(inp: ConstructionInput) -> Arrangement:
    t1, t2, t3 = inp.t
    la, lb = inp.labels
    if (la, lb) == (0, 0):
        prims = [
            half_plane((t1, 0), (t1, 1), "+"),
            half_plane((t1, 0), (t2, 0), "+"),
            half_plane((t2, 0), (t3, 1), "+"),
            half_plane((t1, 1), (t3, 1), "-"),
        ]
        seed = ((t1 + t2) / 2, Fraction(1, 2))
    elif (la, lb) == (1, 1):
        prims = [
            half_plane((t1, 0), (t1, 1), "+"),
            half_plane((t1, 1), (t2, 0), "+"),
            half_plane((t2, 0), (t3, 1), "+"),
            half_plane((t3, 0), (t3, 1), "-"),
        ]
        seed = (t2, Fraction(1))
    elif (la, lb) == (1, 0):
        # slanted edge meets the hyperbola where (t3 - t2) * s2 = s
        s = Fraction(1)
        s2 = s / (t3 - t2)
        prims = region_R("plus", (t1, t2, t3), s2, s)
        seed = (t2, s2 / 2)
    else:
        s = Fraction(1)
        s2 = s / (t2 - t1)
        prims = region_R("minus", (t1, t2, t3), s2, s)
        seed = (t2, s2 / 2)
    return _finish(inp, 2, prims, seed, f"mt2:l=3:{(la, lb)}")


def _mt3_l2(inp: ConstructionInput) -> Arrangement:
    t1, t2 = inp.t
    center = (t1 + t2) / 2
    r1 = (t2 - t1) ** 2 / 4
    if inp.labels[0] == 0:
        prim = ellipsoid((center, 0), (r1, Fraction(1)), "body")
        seed = (center, Fraction(0))
    else:
        prim = pad_primitive(ellipsoid((center,), (r1,), "body"), 2)
        seed = (center, Fraction(0))
    return _finish(inp, 2, [prim], seed, f"mt3:l=2:label={inp.labels[0]}")


def _mt3_all_bounded(inp: ConstructionInput) -> Arrangement:
    t = inp.t
    n = 3
    center1 = (t[0] + t[-1]) / 2
    r1 = (t[-1] - t[0]) ** 2 / 4
    # the transverse squared semi-axes only need to leave room for the holes
    body = ellipsoid((center1, 0, 0), (r1, r1, r1), "body")
    prims = [body]
    holes = _place_holes(inp, prims, n, levels=_alternating_levels(inp, Fraction(0), Fraction(1, 4)))
    prims.extend(holes)
    seed = ((t[0] + t[1]) / 2, Fraction(0), Fraction(0))
    return _finish(inp, n, prims, seed, "mt3:l>=4:all_bounded")


# ---------------------------------------------------------------------------
# the general corridor construction (box or ellipse base)
# ---------------------------------------------------------------------------


def _general(inp: ConstructionInput, box_base: bool) -> Arrangement:
    t = inp.t
    corridor_gaps = [j for j, v in enumerate(inp.labels) if v == 1]
    lp = len(corridor_gaps)
    n = lp + 3

    prims: list[Primitive] = []
    if box_base:
        base2d = [
            half_plane((t[0], 0), (t[0], 1), "+"),
            half_plane((t[0], 0), (t[-1], 0), "+"),
            half_plane((t[-1], 0), (t[-1], 1), "-"),
            half_plane((t[0], 1), (t[-1], 1), "-"),
        ]
        x2_seed = Fraction(1, 2)
        levels = _alternating_levels(inp, Fraction(1, 2), Fraction(1, 6))
    else:
        center1 = (t[0] + t[-1]) / 2
        r1 = (t[-1] - t[0]) ** 2 / 4
        base2d = [ellipsoid((center1, 0), (r1, Fraction(1)), "body")]
        x2_seed = Fraction(0)
        levels = _alternating_levels(inp, Fraction(0), Fraction(1, 4))
    prims.extend(pad_primitive(p, n) for p in base2d)

    for idx, gap in enumerate(corridor_gaps):
        coord = idx + 3
        flat = region_R("flat", (t[gap], t[gap + 1]), 0, Fraction(1))
        prims.extend(embed_plane_primitive(p, n, coord) for p in flat)

    prims.append(_axis_face(n, n, -inp.R, "+"))
    prims.append(_axis_face(n, n, inp.R, "-"))

    seed_x1 = (t[0] + t[1]) / 2
    seed = [seed_x1, x2_seed] + [Fraction(0)] * (n - 2)
    for idx, gap in enumerate(corridor_gaps):
        seed[idx + 2] = _corridor_value(t[gap], t[gap + 1], seed_x1)

    holes = _place_holes(inp, list(prims), n, levels=levels, corridor_gaps=corridor_gaps)
    prims.extend(holes)

    base = "box" if box_base else "ellipse"
    return _finish(
        inp, n, prims, seed, f"{inp.variant}:l>=4:{base}+{lp}corridors+{inp.l - 3}holes"
    )


def _axis_face(n: int, coord: int, bound: Fraction, side: str) -> Primitive:
    """Affine face x_coord >= bound ('+') or x_coord <= bound ('-') in n variables."""
    from .geom import KIND_HALF_PLANE, ComponentDescriptor

    bound = Fraction(bound)
    xc = Polynomial.variable(n, coord)
    f = xc - bound if side == "+" else bound - xc
    witness = [Fraction(0)] * n
    witness[coord - 1] = bound + 1 if side == "+" else bound - 1
    meta = {"form": "axis", "coord": coord, "bound": bound, "side": side}
    return Primitive(KIND_HALF_PLANE, f, ComponentDescriptor(), meta, tuple(witness))


def _corridor_value(a: Fraction, b: Fraction, x1: Fraction) -> Fraction:
    """A height strictly inside the corridor slice over x1 (constraints:
    x > 0, (x1-a)x + 1 > 0, 1 - (x1-b)x > 0)."""
    hi = None
    if x1 > b:
        hi = 1 / (x1 - b)
    if x1 < a:
        cap = 1 / (a - x1)
        hi = cap if hi is None else min(hi, cap)
    if hi is None:
        return Fraction(1)
    return min(Fraction(1), hi / 2)


# ---------------------------------------------------------------------------
# hole placement
# ---------------------------------------------------------------------------


def _alternating_levels(inp: ConstructionInput, mid: Fraction, offset: Fraction) -> list[Fraction]:
    """x2-levels for the hole centers.

    A single hole sits on the mid-height section; multiple holes alternate
    around it so that adjacent holes, which are tangent to a common plane
    x1 = t_j at their poles, have strictly separated centers.
    """
    count = inp.l - 3
    if count <= 1:
        return [mid] * max(count, 0)
    return [mid + offset if j % 2 == 0 else mid - offset for j in range(count)]


def _segment_min(prim: Primitive, center: list[Fraction], x1_lo: Fraction, x1_hi: Fraction) -> Fraction:
    """Exact min of a constraint along the axial segment through a candidate center."""
    lo = list(center)
    hi = list(center)
    lo[0], hi[0] = x1_lo, x1_hi
    return exact_min_on_box(prim.f, lo, hi)


def choose_hole_geometry(
    prims: list[Primitive],
    n: int,
    x1_lo: Fraction,
    x1_hi: Fraction,
    level: Fraction,
    hole_shrink: Fraction,
    placed: list[Primitive],
    corridor_coords: list[int],
) -> tuple[list[Fraction], Fraction, dict]:
    """Center and minor semi-axis for one removed ellipsoid.

    The x1 data is fixed (poles at x1_lo/x1_hi); the x2 level is prescribed;
    corridor coordinates are picked from a deterministic candidate list
    maximizing the exact clearance along the pole segment; the minor
    semi-axis is hole_shrink times the overall margin, further capped by
    half the center distance to already placed holes.
    """
    center = [Fraction(0)] * n
    center[0] = (x1_lo + x1_hi) / 2
    center[1] = level

    diag = {}
    for coord in corridor_coords:
        candidates = [Fraction(1), Fraction(3, 4), Fraction(1, 2), Fraction(1, 4)]
        extra = _corridor_value_min(prims, coord, x1_lo, x1_hi)
        if extra is not None:
            candidates.append(extra)
        best = None
        for cand in candidates:
            trial = list(center)
            trial[coord - 1] = cand
            clear = min(
                _segment_min(p, trial, x1_lo, x1_hi)
                for p in prims
                if coord in p.f.support()
            )
            if best is None or clear > best[1]:
                best = (cand, clear)
        center[coord - 1] = best[0]
        diag[f"coord{coord}"] = {"value": best[0], "clearance": best[1]}

    margin = None
    for p in prims:
        m = _segment_min(p, center, x1_lo, x1_hi)
        margin = m if margin is None else min(margin, m)
    for p in placed:
        other_lo = p.metadata["centers"][0] - sqrt_fraction(p.metadata["radii_sq"][0])
        other_hi = p.metadata["centers"][0] + sqrt_fraction(p.metadata["radii_sq"][0])
        if other_hi < x1_lo or other_lo > x1_hi:
            continue  # x1-separated; no extra cap needed
        gap = max(abs(center[i] - p.metadata["centers"][i]) for i in range(1, n))
        margin = min(margin, gap)
    if margin is None or margin <= 0:
        raise ConstructionError(
            f"no feasible hole center on segment x1 in [{x1_lo}, {x1_hi}]: "
            f"margin {margin} at center {center}"
        )
    rho = hole_shrink * margin
    diag["margin"] = margin
    return center, rho, diag


def _corridor_value_min(prims, coord, x1_lo, x1_hi) -> Fraction | None:
    """Half the tightest corridor upper bound over the segment, if any."""
    best = None
    for p in prims:
        if p.base_kind != "hyperbola_region" or coord not in p.f.support():
            continue
        if p.metadata["variant"] == VARIANT_LEFT:
            b = p.metadata["a"]
            if x1_hi > b:
                cap = Fraction(1) / (x1_hi - b)
                best = cap if best is None else min(best, cap)
        else:
            a = p.metadata["a"]
            if x1_lo < a:
                cap = Fraction(1) / (a - x1_lo)
                best = cap if best is None else min(best, cap)
    return None if best is None else best / 2


def _place_holes(
    inp: ConstructionInput,
    prims: list[Primitive],
    n: int,
    levels: list[Fraction],
    corridor_gaps: list[int] | None = None,
) -> list[Primitive]:
    """Removed ellipsoids with exact pole data, certified disjoint."""
    t = inp.t
    corridor_gaps = corridor_gaps or []
    corridor_coords = [idx + 3 for idx in range(len(corridor_gaps))]
    holes: list[Primitive] = []
    for j in range(inp.l - 3):
        x1_lo, x1_hi = t[j + 1], t[j + 2]
        center, rho, diag = choose_hole_geometry(
            prims, n, x1_lo, x1_hi, levels[j], inp.hole_shrink, holes, corridor_coords
        )
        r1 = (x1_hi - x1_lo) ** 2 / 4
        for attempt in range(6):
            radii = [r1] + [rho * rho] * (n - 1)
            hole = ellipsoid(center, radii, "hole")
            problem = _certify_hole(hole, prims, holes, n)
            if problem is None:
                holes.append(hole)
                break
            rho = rho / 2
        else:
            raise ConstructionError(
                f"hole {j} over x1 in [{x1_lo}, {x1_hi}] could not be certified "
                f"disjoint: {problem}"
            )
    return holes


def _hole_box(hole: Primitive) -> tuple[list[Fraction], list[Fraction]]:
    centers = hole.metadata["centers"]
    radii = hole.metadata["radii_sq"]
    lo, hi = [], []
    for c, r in zip(centers, radii):
        root = sqrt_fraction(r)
        if root is None:
            raise ConstructionError("hole squared semi-axis is not a perfect square")
        lo.append(c - root)
        hi.append(c + root)
    return lo, hi


def _certify_hole(hole: Primitive, prims: list[Primitive], placed: list[Primitive], n: int):
    """Exact disjointness certificates; returns a diagnostic string on failure."""
    lo, hi = _hole_box(hole)
    for p in prims:
        m = exact_min_on_box(p.f, lo, hi)
        if m <= 0:
            return f"constraint {p.kind} ({p.f.to_text()}) reaches {m} on the hole box"
    for other in placed:
        c1, r1 = hole.metadata["centers"], hole.metadata["radii_sq"]
        c2, r2 = other.metadata["centers"], other.metadata["radii_sq"]
        separated = False
        for i in range(n):
            gap = abs(c1[i] - c2[i])
            s1 = sqrt_fraction(r1[i])
            s2 = sqrt_fraction(r2[i])
            if s1 is None or s2 is None:
                continue
            if gap > s1 + s2:
                separated = True
                break
        if not separated:
            return (
                f"holes centered {c1} and {c2} lack a separating coordinate"
            )
    return None
