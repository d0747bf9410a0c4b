"""Boundary primitives: half-planes, hyperbola regions, ellipsoids, cylinders.

Every primitive carries a defining polynomial ``f`` signed so that ``f > 0``
on the open region it contributes to the domain intersection
(inside-positive convention), a component descriptor selecting the boundary
piece inside the zero set of ``f``, exact construction metadata, and an
interior witness point with ``f(witness) > 0`` exactly.

Note on hyperbola regions: the plane minus the full hyperbola has three
connected components (two convex sides and the region between the branches);
we always take ``{f > 0}`` to be the middle region, whose closure touches
both branches.  The selected boundary piece is a single branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError
from .poly import Polynomial

KIND_HALF_PLANE = "half_plane"
KIND_HYPERBOLA = "hyperbola_region"
KIND_ELLIPSOID_BODY = "ellipsoid_body"
KIND_ELLIPSOID_HOLE = "ellipsoid_hole"
KIND_CYLINDER = "cylinder"

# Hyperbola variants, named by the x1-ray on which the region imposes no
# bound on the second coordinate: "left" is the c > 0 family (open for
# x1 <= a), "right" the c < 0 family (open for x1 >= a).
VARIANT_LEFT = "left"
VARIANT_RIGHT = "right"


@dataclass(frozen=True)
class ComponentDescriptor:
    """Conjunction of strict sign conditions carving one component of {f = 0}.

    Each condition is ``(polynomial, sign)`` with sign +1 meaning ``> 0`` and
    -1 meaning ``< 0``.  The empty descriptor selects the whole zero set.
    """

    conditions: tuple[tuple[Polynomial, int], ...] = ()

    def satisfied(self, point) -> bool:
        """Exact membership test at a rational point."""
        for p, sign in self.conditions:
            if sign * p.eval(point) <= 0:
                return False
        return True

    def satisfied_float(self, point, margin: float = 0.0) -> bool:
        for p, sign in self.conditions:
            if sign * p.eval_float(point) <= margin:
                return False
        return True

    @property
    def is_empty(self) -> bool:
        return not self.conditions


@dataclass(eq=False)
class Primitive:
    """One boundary constraint of an arrangement."""

    kind: str
    f: Polynomial
    component: ComponentDescriptor
    metadata: dict
    witness: tuple[Fraction, ...]
    branches: dict[str, ComponentDescriptor] = field(default_factory=dict)

    @property
    def base_kind(self) -> str:
        return self.metadata.get("base_kind", self.kind)

    @property
    def num_vars(self) -> int:
        return self.f.num_vars


def _frac_point(*vals) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in vals)


def half_plane(p1, p2, side: str) -> Primitive:
    """Closed half-plane bounded by the line through two distinct points.

    The defining polynomial is the canonical affine form: ``x1 - a`` for a
    vertical line, else ``x2 - a1*x1 - a2``; ``side`` "+" keeps that sign,
    "-" negates it.
    """
    p1 = _frac_point(*p1)
    p2 = _frac_point(*p2)
    if len(p1) != 2 or len(p2) != 2:
        raise InputError("half_plane expects 2-dimensional points")
    if p1 == p2:
        raise InputError("half_plane requires two distinct points")
    if side not in ("+", "-"):
        raise InputError(f"side must be '+' or '-', got {side!r}")

    x1 = Polynomial.variable(2, 1)
    x2 = Polynomial.variable(2, 2)
    if p1[0] == p2[0]:
        a = p1[0]
        f = x1 - a
        meta = {"form": "vertical", "a": a}
        witness = (a + 1, Fraction(0))
    else:
        a1 = (p2[1] - p1[1]) / (p2[0] - p1[0])
        a2 = p1[1] - a1 * p1[0]
        f = x2 - a1 * x1 - a2
        meta = {"form": "graph", "a1": a1, "a2": a2}
        witness = (Fraction(0), a2 + 1)
    if side == "-":
        f = -f
        witness = _reflect_witness(meta, witness)
    meta.update({"p1": p1, "p2": p2, "side": side})
    return Primitive(KIND_HALF_PLANE, f, ComponentDescriptor(), meta, witness)


def _reflect_witness(meta, witness):
    if meta["form"] == "vertical":
        return (meta["a"] - 1, Fraction(0))
    return (Fraction(0), meta["a2"] - 1)


def hyperbola_region(variant: str, a, b, c, branch: str = "plus") -> Primitive:
    """Region between the two branches of ``(x1 - a)(x2 - b) = c``.

    variant "left" requires c > 0 and gives ``f = c - (x1-a)(x2-b)``;
    variant "right" requires c < 0 and gives ``f = (x1-a)(x2-b) - c``.
    Both branch descriptors are recorded; ``branch`` selects which one is the
    boundary piece S_j.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    x1 = Polynomial.variable(2, 1)
    x2 = Polynomial.variable(2, 2)
    prod = (x1 - a) * (x2 - b)
    if variant == VARIANT_LEFT:
        if c <= 0:
            raise InputError(f"variant 'left' requires c > 0, got {c}")
        f = c - prod
        branches = {
            "plus": ComponentDescriptor(((x1 - a, 1), (x2 - b, 1))),
            "minus": ComponentDescriptor(((x1 - a, -1), (x2 - b, -1))),
        }
    elif variant == VARIANT_RIGHT:
        if c >= 0:
            raise InputError(f"variant 'right' requires c < 0, got {c}")
        f = prod - c
        branches = {
            "plus": ComponentDescriptor(((x1 - a, -1), (x2 - b, 1))),
            "minus": ComponentDescriptor(((x1 - a, 1), (x2 - b, -1))),
        }
    else:
        raise InputError(f"unknown hyperbola variant {variant!r}")
    if branch not in branches:
        raise InputError(f"branch must be 'plus' or 'minus', got {branch!r}")
    meta = {"variant": variant, "a": a, "b": b, "c": c, "branch": branch}
    return Primitive(
        KIND_HYPERBOLA, f, branches[branch], meta, (a, b), branches=dict(branches)
    )


def ellipsoid(centers, radii_sq, orientation: str) -> Primitive:
    """Axis-aligned ellipsoid boundary with squared semi-axes ``radii_sq``.

    orientation "body" gives the inside-positive form
    ``1 - sum (x_i - a_i)^2 / r_i``; "hole" the outside-positive negation,
    used for removed ellipsoids.
    """
    centers = _frac_point(*centers)
    radii = _frac_point(*radii_sq)
    if len(centers) != len(radii):
        raise InputError("centers and squared semi-axes must have equal length")
    if any(r <= 0 for r in radii):
        raise InputError("all squared semi-axes must be positive")
    if orientation not in ("body", "hole"):
        raise InputError(f"orientation must be 'body' or 'hole', got {orientation!r}")
    k = len(centers)
    f = Polynomial.constant(k, 1)
    for i, (ai, ri) in enumerate(zip(centers, radii)):
        xi = Polynomial.variable(k, i + 1)
        f = f - (xi - ai) * (xi - ai) * (Fraction(1) / ri)
    if orientation == "body":
        kind = KIND_ELLIPSOID_BODY
        witness = centers
    else:
        kind = KIND_ELLIPSOID_HOLE
        f = -f
        shift = radii[0].numerator // radii[0].denominator + 1
        witness = (centers[0] + shift,) + centers[1:]
    meta = {"centers": centers, "radii_sq": radii, "orientation": orientation}
    return Primitive(kind, f, ComponentDescriptor(), meta, witness)


def _remap_descriptor(desc: ComponentDescriptor, mapping, n) -> ComponentDescriptor:
    return ComponentDescriptor(
        tuple((p.remap_vars(mapping, n), s) for p, s in desc.conditions)
    )


def embed_plane_primitive(prim: Primitive, n: int, coord: int) -> Primitive:
    """Cylinder over a 2-D primitive: x2 is renamed to x_coord, x1 is kept.

    The first coordinate carries the function value and is never remapped,
    so ``coord = 1`` is rejected.
    """
    if prim.num_vars != 2:
        raise InputError("embed_plane_primitive expects a 2-variable primitive")
    if coord == 1:
        raise InputError("coordinate 1 is reserved and cannot be a cylinder axis")
    if n < 2 or not 2 <= coord <= n:
        raise InputError(f"target coordinate {coord} out of range 2..{n}")
    if n == 2 and coord == 2:
        return prim
    mapping = {1: 1, 2: coord}
    f = prim.f.remap_vars(mapping, n)
    comp = _remap_descriptor(prim.component, mapping, n)
    branches = {
        name: _remap_descriptor(d, mapping, n) for name, d in prim.branches.items()
    }
    witness = [Fraction(0)] * n
    witness[0] = prim.witness[0]
    witness[coord - 1] = prim.witness[1]
    meta = dict(prim.metadata)
    meta.update({"base_kind": prim.base_kind, "plane_coord": coord})
    return Primitive(KIND_CYLINDER, f, comp, meta, tuple(witness), branches=branches)


def pad_primitive(prim: Primitive, n: int) -> Primitive:
    """Cylinder over a k-variable primitive along the remaining n-k coordinates."""
    k = prim.num_vars
    if n < k:
        raise InputError(f"cannot pad a {k}-variable primitive into {n} variables")
    if n == k:
        return prim
    mapping = {i: i for i in range(1, k + 1)}
    f = prim.f.remap_vars(mapping, n)
    comp = _remap_descriptor(prim.component, mapping, n)
    branches = {
        name: _remap_descriptor(d, mapping, n) for name, d in prim.branches.items()
    }
    witness = tuple(prim.witness) + (Fraction(0),) * (n - k)
    meta = dict(prim.metadata)
    meta.update({"base_kind": prim.base_kind, "padded_from": k})
    return Primitive(KIND_CYLINDER, f, comp, meta, witness, branches=branches)


def region_R(kind: str, s1, s2, s) -> list[Primitive]:
    """Primitive families whose closed intersection is one of the R-regions.

    kind "plus"/"minus" take three increasing abscissas and need the exact
    incidence (s13 - s12) * s2 = s resp. (s12 - s11) * s2 = s so that the
    slanted edge meets the hyperbola branch at a corner; kind "flat" takes
    two abscissas and returns the half-plane above the x1-axis plus the two
    hyperbola regions opening over [s11, inf) and (-inf, s12].
    """
    s = Fraction(s)
    s2 = Fraction(s2)
    if s <= 0:
        raise InputError(f"parameter s must be positive, got {s}")
    s1 = _frac_point(*s1)
    if any(u >= v for u, v in zip(s1, s1[1:])):
        raise InputError(f"abscissas must be strictly increasing, got {s1}")

    if kind == "flat":
        if len(s1) != 2:
            raise InputError("flat region takes exactly 2 abscissas")
        s11, s12 = s1
        return [
            half_plane((s11, 0), (s12, 0), "+"),
            hyperbola_region(VARIANT_RIGHT, s11, 0, -s, branch="plus"),
            hyperbola_region(VARIANT_LEFT, s12, 0, s, branch="plus"),
        ]

    if len(s1) != 3:
        raise InputError(f"region kind {kind!r} takes exactly 3 abscissas")
    s11, s12, s13 = s1
    if s2 <= 0:
        raise InputError(f"parameter s2 must be positive, got {s2}")

    if kind == "plus":
        residual = (s13 - s12) * s2 - s
        if residual != 0:
            raise InputError(
                f"corner ({s13}, {s2}) is not on the hyperbola branch: "
                f"(s13 - s12) * s2 - s = {residual} != 0"
            )
        return [
            half_plane((s11, 0), (s11, 1), "+"),
            half_plane((s11, 0), (s12, 0), "+"),
            half_plane((s12, 0), (s13, s2), "+"),
            hyperbola_region(VARIANT_LEFT, s12, 0, s, branch="plus"),
        ]
    if kind == "minus":
        residual = (s12 - s11) * s2 - s
        if residual != 0:
            raise InputError(
                f"corner ({s11}, {s2}) is not on the hyperbola branch: "
                f"(s12 - s11) * s2 - s = {residual} != 0"
            )
        return [
            half_plane((s13, 0), (s13, 1), "-"),
            half_plane((s12, 0), (s13, 0), "+"),
            half_plane((s12, 0), (s11, s2), "+"),
            hyperbola_region(VARIANT_RIGHT, s12, 0, -s, branch="plus"),
        ]
    raise InputError(f"unknown region kind {kind!r}")
