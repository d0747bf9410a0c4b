"""JSON interchange for arrangements, manifolds and reports.

Rationals are written bit-exactly as {"num": "...", "den": "..."} string
pairs; polynomials carry both the sparse exact term list and the canonical
text form.  Serialization is canonical (sorted keys, fixed indentation), so
construct -> serialize -> parse -> re-serialize is byte-identical.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arrangement import Arrangement
from .errors import InputError
from .geom import ComponentDescriptor, Primitive
from .lift import LiftedManifold
from .poly import Polynomial


def frac_to_json(q: Fraction) -> dict:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def _is_frac_json(obj) -> bool:
    return isinstance(obj, dict) and set(obj) == {"num", "den"}


def value_to_json(value):
    if isinstance(value, bool) or value is None or isinstance(value, (str, int, float)):
        return value
    if isinstance(value, Fraction):
        return frac_to_json(value)
    if isinstance(value, (list, tuple)):
        return [value_to_json(v) for v in value]
    if isinstance(value, dict):
        return {str(k): value_to_json(v) for k, v in value.items()}
    if isinstance(value, ComponentDescriptor):
        return descriptor_to_json(value)
    raise InputError(f"cannot serialize value of type {type(value).__name__}")


def value_from_json(obj):
    if _is_frac_json(obj):
        return Fraction(int(obj["num"]), int(obj["den"]))
    if isinstance(obj, list):
        return [value_from_json(v) for v in obj]
    if isinstance(obj, dict):
        return {k: value_from_json(v) for k, v in obj.items()}
    return obj


def poly_to_json(p: Polynomial) -> dict:
    return {
        "num_vars": p.num_vars,
        "text": p.to_text(),
        "terms": [
            {"exponents": list(exps), "coeff": frac_to_json(coeff)}
            for exps, coeff in p.terms_grlex()
        ],
    }


def poly_from_json(obj) -> Polynomial:
    terms = {}
    for term in obj["terms"]:
        coeff = Fraction(int(term["coeff"]["num"]), int(term["coeff"]["den"]))
        terms[tuple(term["exponents"])] = coeff
    return Polynomial(obj["num_vars"], terms)


def descriptor_to_json(desc: ComponentDescriptor) -> list:
    return [
        {"polynomial": poly_to_json(p), "sign": ">" if sign > 0 else "<"}
        for p, sign in desc.conditions
    ]


def descriptor_from_json(obj) -> ComponentDescriptor:
    conditions = tuple(
        (poly_from_json(c["polynomial"]), 1 if c["sign"] == ">" else -1) for c in obj
    )
    return ComponentDescriptor(conditions)


def primitive_to_json(prim: Primitive) -> dict:
    return {
        "kind": prim.kind,
        "polynomial": poly_to_json(prim.f),
        "component_descriptor": descriptor_to_json(prim.component),
        "metadata": value_to_json(prim.metadata),
        "witness": [frac_to_json(v) for v in prim.witness],
        "branches": {
            name: descriptor_to_json(d) for name, d in sorted(prim.branches.items())
        },
    }


def primitive_from_json(obj) -> Primitive:
    return Primitive(
        kind=obj["kind"],
        f=poly_from_json(obj["polynomial"]),
        component=descriptor_from_json(obj["component_descriptor"]),
        metadata=value_from_json(obj["metadata"]),
        witness=tuple(value_from_json(v) for v in obj["witness"]),
        branches={
            name: descriptor_from_json(d) for name, d in obj.get("branches", {}).items()
        },
    )


def arrangement_to_json(arr: Arrangement) -> dict:
    return {
        "version": 1,
        "n": arr.n,
        "t_values": None if arr.t_values is None else [frac_to_json(t) for t in arr.t_values],
        "labels": None if arr.labels is None else list(arr.labels),
        "variant": arr.variant,
        "provenance": arr.provenance,
        "primitives": [primitive_to_json(p) for p in arr.primitives],
        "seed_point": [frac_to_json(v) for v in arr.seed_point],
        "expected": None if arr.expected is None else value_to_json(arr.expected),
    }


def arrangement_from_json(obj, source: str = "<arrangement>") -> Arrangement:
    try:
        if obj.get("version") != 1:
            raise InputError(f"{source}: unsupported version {obj.get('version')!r}")
        return Arrangement(
            n=obj["n"],
            primitives=tuple(primitive_from_json(p) for p in obj["primitives"]),
            seed_point=tuple(value_from_json(v) for v in obj["seed_point"]),
            provenance=obj.get("provenance", ""),
            t_values=None
            if obj.get("t_values") is None
            else tuple(value_from_json(t) for t in obj["t_values"]),
            labels=None if obj.get("labels") is None else tuple(obj["labels"]),
            variant=obj.get("variant"),
            expected=None if obj.get("expected") is None else value_from_json(obj["expected"]),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"{source}: malformed arrangement JSON ({exc})") from exc


def manifold_to_json(lifted: LiftedManifold) -> dict:
    return {
        "version": 1,
        "arrangement": arrangement_to_json(lifted.arrangement),
        "m": lifted.m,
        "block_sizes": list(lifted.block_sizes),
        "base_dim": lifted.base_dim,
        "ambient_dim": lifted.ambient_dim,
        "equations": [poly_to_json(eq) for eq in lifted.equations],
    }


def manifold_from_json(obj, source: str = "<manifold>") -> LiftedManifold:
    try:
        if obj.get("version") != 1:
            raise InputError(f"{source}: unsupported version {obj.get('version')!r}")
        arr = arrangement_from_json(obj["arrangement"], source)
        return LiftedManifold(
            arrangement=arr,
            m=obj["m"],
            block_sizes=tuple(obj["block_sizes"]),
            equations=tuple(poly_from_json(eq) for eq in obj["equations"]),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"{source}: malformed manifold JSON ({exc})") from exc


def canonical_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def dump_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(obj))
