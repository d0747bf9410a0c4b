"""Sphere-bundle lift of an arrangement to a manifold in R^{n + sum d_j}.

For each constraint f_j a block of d_j slack variables y_j is introduced and
the manifold is cut out by F_j = f_j(x) - ||y_j||^2.  A point of the zero
set automatically has every f_j(x) = ||y_j||^2 >= 0, so its x-part lies in
the closed domain; fibers of the projection to x are products of spheres of
squared radii f_j(x).

The minimum admissible m is n + l, which forces every block dimension
d_j >= 2; blocks of dimension 1 would contribute two-point sphere factors
and break fiber connectivity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arrangement import Arrangement, membership, sample_boundary, sample_region
from .errors import InputError
from .poly import Polynomial


@dataclass(eq=False)
class LiftedManifold:
    """Defining equations of the lifted manifold plus its block layout."""

    arrangement: Arrangement
    m: int
    block_sizes: tuple[int, ...]
    equations: tuple[Polynomial, ...]

    @property
    def base_dim(self) -> int:
        return self.arrangement.n

    @property
    def ambient_dim(self) -> int:
        return self.base_dim + sum(self.block_sizes)

    @property
    def l(self) -> int:
        return len(self.block_sizes)

    def block_offset(self, j: int) -> int:
        """0-based ambient index where block j (0-based) starts."""
        return self.base_dim + sum(self.block_sizes[:j])


def lift(arr: Arrangement, m: int) -> LiftedManifold:
    """Lift an arrangement at manifold dimension m (requires m >= n + l)."""
    n, l = arr.n, arr.l
    if m < n + l:
        raise InputError(
            f"m = {m} is too small: need m >= n + l = {n + l} so every slack "
            f"block has dimension >= 2"
        )
    total = m - n + l
    q, r = divmod(total, l)
    block_sizes = tuple(q + 1 if j < r else q for j in range(l))
    ambient = n + total
    equations = []
    offset = n
    for j, prim in enumerate(arr.primitives):
        f = prim.f.remap_vars({i: i for i in range(1, n + 1)}, ambient)
        for k in range(block_sizes[j]):
            y = Polynomial.variable(ambient, offset + k + 1)
            f = f - y * y
        equations.append(f)
        offset += block_sizes[j]
    return LiftedManifold(arr, m, block_sizes, tuple(equations))


@dataclass(frozen=True)
class FiberFactor:
    block: int
    sphere_dim: int
    radius_sq: object  # Fraction or float
    degenerate: bool


def fiber_at(lifted: LiftedManifold, point) -> dict:
    """Describe the fiber of the base projection over a point of the closure.

    Exterior points get an empty fiber; otherwise the fiber is the product
    of spheres S^{d_j - 1} of squared radius f_j(point), with radius 0
    factors degenerate to points.
    """
    arr = lifted.arrangement
    status, active = membership(arr, point)
    if status == "exterior":
        return {"empty": True, "factors": [], "dim": 0}
    exact = all(isinstance(v, (int, Fraction)) for v in point)
    factors = []
    dim = 0
    for j, prim in enumerate(arr.primitives):
        if exact:
            r2 = prim.f.eval(point)
            degenerate = r2 == 0
        else:
            degenerate = j in active
            r2 = 0.0 if degenerate else max(prim.f.eval_float(point), 0.0)
        d = lifted.block_sizes[j]
        factors.append(FiberFactor(j, d - 1, r2, degenerate))
        if not degenerate:
            dim += d - 1
    return {"empty": False, "factors": factors, "dim": dim}


def project(lifted: LiftedManifold, point) -> tuple:
    """(base projection, function value) of an ambient point."""
    if len(point) != lifted.ambient_dim:
        raise InputError(
            f"ambient point has dimension {len(point)}, expected {lifted.ambient_dim}"
        )
    base = tuple(point[: lifted.base_dim])
    return base, point[0]


def embed_fiber_point(lifted: LiftedManifold, base_point, unit_dirs=None, rng=None):
    """A manifold point over base_point: y_j on the sphere of radius sqrt(f_j)."""
    arr = lifted.arrangement
    x = [float(v) for v in base_point]
    out = np.zeros(lifted.ambient_dim)
    out[: lifted.base_dim] = x
    for j, prim in enumerate(arr.primitives):
        r2 = prim.f.eval_float(x)
        d = lifted.block_sizes[j]
        off = lifted.block_offset(j)
        if r2 <= 0:
            continue  # active block stays at zero
        if unit_dirs is not None:
            u = np.asarray(unit_dirs[j], dtype=float)
        else:
            u = rng.normal(size=d)
        u = u / np.linalg.norm(u)
        out[off : off + d] = np.sqrt(r2) * u
    return out


def sample_manifold(lifted: LiftedManifold, count: int, seed: int, window=None) -> np.ndarray:
    """Deterministic samples on the manifold (interior and boundary bases)."""
    if count <= 0:
        raise InputError("sample count must be positive")
    arr = lifted.arrangement
    rng = np.random.default_rng(seed)
    n_boundary = count // 4
    n_interior = count - n_boundary
    interior, _ = sample_region(arr, n_interior, seed + 1, window)
    boundary = sample_boundary(arr, n_boundary, seed + 2, window)
    bases = list(interior) + [p for p, _ in boundary]
    if not bases:
        return np.zeros((0, lifted.ambient_dim))
    xs = np.array(bases)
    P = xs.shape[0]
    points = np.zeros((P, lifted.ambient_dim))
    points[:, : lifted.base_dim] = xs
    for j, prim in enumerate(arr.primitives):
        r2 = np.maximum(prim.f.eval_batch(xs), 0.0)
        d = lifted.block_sizes[j]
        off = lifted.block_offset(j)
        u = rng.normal(size=(P, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        points[:, off : off + d] = np.sqrt(r2)[:, None] * u
    return points


def jacobian_at(lifted: LiftedManifold, point) -> np.ndarray:
    """Float Jacobian of (F_1 .. F_l) at an ambient point, shape (l, ambient)."""
    return jacobian_batch(lifted, np.asarray(point, dtype=float)[None, :])[0]


def jacobian_batch(lifted: LiftedManifold, points: np.ndarray) -> np.ndarray:
    """Jacobians at many ambient points, shape (P, l, ambient)."""
    arr = lifted.arrangement
    points = np.asarray(points, dtype=float)
    P = points.shape[0]
    J = np.zeros((P, lifted.l, lifted.ambient_dim))
    xs = points[:, : lifted.base_dim]
    for j, prim in enumerate(arr.primitives):
        for i, g in enumerate(prim.f.gradient()):
            if not g.is_zero:
                J[:, j, i] = g.eval_batch(xs)
        d = lifted.block_sizes[j]
        off = lifted.block_offset(j)
        J[:, j, off : off + d] = -2.0 * points[:, off : off + d]
    return J
