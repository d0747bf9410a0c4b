"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial in ``k`` variables ``x1 .. xk`` is stored as a map from exponent
tuples (length ``k``, non-negative ints) to nonzero ``Fraction`` coefficients.
The zero polynomial has an empty term map.  All arithmetic is exact; floats
only appear in the evaluation twins used for sampling.

Canonical term order is graded lexicographic (total degree first, then the
exponent tuple), descending.  Printing, hashing and the float evaluation
order all follow it, so outputs are byte-stable.

Variable indices in the public API are 1-based, matching the ``x1 .. xk``
naming used throughout the package and the text grammar::

    poly := term (('+'|'-') term)*
    term := factor ('*' factor)*
    factor := atom ('^' INT)?
    atom := INT ('/' INT)? | 'x'INT | '(' poly ')' | '-' atom
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError

Exponents = tuple[int, ...]


def _grlex_key(exponents: Exponents) -> tuple[int, Exponents]:
    return (sum(exponents), exponents)


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("num_vars", "_terms", "_hash", "_sorted", "_compiled")

    def __init__(self, num_vars: int, terms: Mapping[Exponents, Fraction] | None = None):
        if num_vars < 1:
            raise InputError(f"num_vars must be >= 1, got {num_vars}")
        clean: dict[Exponents, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise InputError(
                    f"exponent tuple {exps} has length {len(exps)}, expected {num_vars}"
                )
            if any(e < 0 for e in exps):
                raise InputError(f"negative exponent in {exps}")
            coeff = Fraction(coeff)
            if coeff != 0:
                clean[exps] = coeff
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_sorted", None)
        object.__setattr__(self, "_compiled", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, value) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: Fraction(value)})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "Polynomial":
        """The polynomial ``x_index`` (1-based index)."""
        if not 1 <= index <= num_vars:
            raise InputError(f"variable index {index} out of range 1..{num_vars}")
        exps = [0] * num_vars
        exps[index - 1] = 1
        return cls(num_vars, {tuple(exps): Fraction(1)})

    # -- basic queries -----------------------------------------------------

    def terms_grlex(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in descending graded-lexicographic order (cached)."""
        if self._sorted is None:
            ordered = sorted(
                self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True
            )
            object.__setattr__(self, "_sorted", ordered)
        return self._sorted

    def coefficient(self, exponents: Exponents) -> Fraction:
        return self._terms.get(tuple(exponents), Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Max total degree over terms; 0 for the zero polynomial."""
        if not self._terms:
            return 0
        return max(sum(e) for e in self._terms)

    def support(self) -> tuple[int, ...]:
        """Sorted 1-based indices of variables that actually occur."""
        seen = set()
        for exps in self._terms:
            for i, e in enumerate(exps):
                if e > 0:
                    seen.add(i + 1)
        return tuple(sorted(seen))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            h = hash((self.num_vars, tuple(self.terms_grlex())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self.num_vars}, {self.to_text()!r})"

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise InputError("polynomials have different numbers of variables")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.num_vars, other)
        return None

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for exps, coeff in other._terms.items():
            out[exps] = out.get(exps, Fraction(0)) + coeff
        return Polynomial(self.num_vars, out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return Polynomial(self.num_vars, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[Exponents, Fraction] = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                exps = tuple(a + b for a, b in zip(ea, eb))
                out[exps] = out.get(exps, Fraction(0)) + ca * cb
        return Polynomial(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise InputError("negative polynomial powers are not defined")
        result = Polynomial.constant(self.num_vars, 1)
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- evaluation --------------------------------------------------------

    def eval(self, point: Sequence) -> Fraction:
        """Exact value at a rational point."""
        if len(point) != self.num_vars:
            raise InputError(f"point has dimension {len(point)}, expected {self.num_vars}")
        xs = [Fraction(v) for v in point]
        total = Fraction(0)
        for exps, coeff in self._terms.items():
            term = coeff
            for e, v in zip(exps, xs):
                if e:
                    term *= v ** e
            total += term
        return total

    def eval_float(self, point: Sequence[float]) -> float:
        """Float twin of :meth:`eval`; terms accumulated in graded-lex order."""
        if len(point) != self.num_vars:
            raise InputError(f"point has dimension {len(point)}, expected {self.num_vars}")
        xs = [float(v) for v in point]
        total = 0.0
        for exps, coeff in self.terms_grlex():
            term = float(coeff)
            for e, v in zip(exps, xs):
                if e:
                    term *= v ** e
            total += term
        return total

    def eval_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at many float points at once; ``points`` has shape (P, num_vars)."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.num_vars:
            raise InputError(f"expected points of shape (P, {self.num_vars})")
        if self._compiled is None:
            compiled = [
                (float(coeff), [(i, e) for i, e in enumerate(exps) if e > 0])
                for exps, coeff in self.terms_grlex()
            ]
            object.__setattr__(self, "_compiled", compiled)
        total = np.zeros(points.shape[0])
        for coeff, powers in self._compiled:
            term = coeff
            for i, e in powers:
                term = term * (points[:, i] if e == 1 else points[:, i] ** e)
            total += term
        return total

    # -- calculus ----------------------------------------------------------

    def partial(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to ``x_index`` (1-based)."""
        if not 1 <= index <= self.num_vars:
            raise InputError(f"variable index {index} out of range 1..{self.num_vars}")
        i = index - 1
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            if exps[i] == 0:
                continue
            new = list(exps)
            new[i] -= 1
            out[tuple(new)] = out.get(tuple(new), Fraction(0)) + coeff * exps[i]
        return Polynomial(self.num_vars, out)

    def gradient(self) -> tuple["Polynomial", ...]:
        return tuple(self.partial(i) for i in range(1, self.num_vars + 1))

    # -- substitution ------------------------------------------------------

    def substitute(self, index: int, value) -> "Polynomial":
        """Fix ``x_index = value`` (exact); the result keeps num_vars."""
        if not 1 <= index <= self.num_vars:
            raise InputError(f"variable index {index} out of range 1..{self.num_vars}")
        i = index - 1
        v = Fraction(value)
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            c = coeff * v ** exps[i]
            new = list(exps)
            new[i] = 0
            key = tuple(new)
            out[key] = out.get(key, Fraction(0)) + c
        return Polynomial(self.num_vars, out)

    def remap_vars(self, mapping: Mapping[int, int], num_vars: int) -> "Polynomial":
        """Rename variables injectively: old 1-based index -> new 1-based index."""
        targets = list(mapping.values())
        if len(set(targets)) != len(targets):
            raise InputError("variable remapping must be injective")
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            new = [0] * num_vars
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                if (i + 1) not in mapping:
                    raise InputError(f"no mapping for occurring variable x{i + 1}")
                j = mapping[i + 1]
                if not 1 <= j <= num_vars:
                    raise InputError(f"mapped index {j} out of range 1..{num_vars}")
                new[j - 1] = e
            key = tuple(new)
            out[key] = out.get(key, Fraction(0)) + coeff
        return Polynomial(num_vars, out)

    def affine_substitute(self, amap) -> "Polynomial":
        """Return ``p ∘ T`` for an invertible :class:`~ncdlift.linalg.AffineMap` T."""
        if amap.dim != self.num_vars:
            raise InputError("affine map dimension does not match num_vars")
        if not amap.is_invertible():
            raise InputError("affine substitution requires an invertible linear part")
        images = []
        for i in range(self.num_vars):
            img = Polynomial.constant(self.num_vars, amap.offset[i])
            for j in range(self.num_vars):
                if amap.matrix[i][j] != 0:
                    img = img + Polynomial.variable(self.num_vars, j + 1) * amap.matrix[i][j]
            images.append(img)
        total = Polynomial.zero(self.num_vars)
        for exps, coeff in self._terms.items():
            term = Polynomial.constant(self.num_vars, coeff)
            for i, e in enumerate(exps):
                if e:
                    term = term * images[i] ** e
            total = total + term
        return total

    # -- degree <= 2 structure ---------------------------------------------

    def as_quadratic(self):
        """Decompose a degree <= 2 polynomial.

        Returns ``(const, linear, quadratic)`` where ``linear`` maps 1-based
        variable index to coefficient and ``quadratic`` maps ``(i, j)`` with
        ``i <= j`` to coefficient.
        """
        if self.degree() > 2:
            raise InputError("polynomial has degree > 2")
        const = Fraction(0)
        linear: dict[int, Fraction] = {}
        quad: dict[tuple[int, int], Fraction] = {}
        for exps, coeff in self._terms.items():
            vars_ = [(i + 1, e) for i, e in enumerate(exps) if e > 0]
            total = sum(e for _, e in vars_)
            if total == 0:
                const += coeff
            elif total == 1:
                linear[vars_[0][0]] = linear.get(vars_[0][0], Fraction(0)) + coeff
            elif len(vars_) == 1:
                i = vars_[0][0]
                quad[(i, i)] = quad.get((i, i), Fraction(0)) + coeff
            else:
                i, j = vars_[0][0], vars_[1][0]
                quad[(i, j)] = quad.get((i, j), Fraction(0)) + coeff
        return const, linear, quad

    # -- text form ----------------------------------------------------------

    def to_text(self) -> str:
        """Canonical text form; round-trips through :func:`parse_polynomial`."""
        if not self._terms:
            return "0"
        parts: list[str] = []
        for exps, coeff in self.terms_grlex():
            mono = "*".join(
                f"x{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e > 0
            )
            mag = abs(coeff)
            if not mono:
                body = _frac_text(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_frac_text(mag)}*{mono}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(parts)


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_TOKEN = re.compile(r"\s*(x\d+|\d+|[+\-*^()/])")


def parse_polynomial(text: str, num_vars: int | None = None) -> Polynomial:
    """Parse the text grammar; ``num_vars`` defaults to the max index seen."""
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise InputError(f"unexpected character at position {pos}: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()

    max_seen = 0
    for tok in tokens:
        if tok.startswith("x"):
            max_seen = max(max_seen, int(tok[1:]))
    if num_vars is None:
        num_vars = max(max_seen, 1)
    elif max_seen > num_vars:
        raise InputError(f"variable x{max_seen} exceeds num_vars={num_vars}")

    idx = 0

    def peek():
        return tokens[idx] if idx < len(tokens) else None

    def advance():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def parse_expr() -> Polynomial:
        node = parse_term()
        while peek() in ("+", "-"):
            op = advance()
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term() -> Polynomial:
        node = parse_unary()
        while peek() == "*":
            advance()
            node = node * parse_unary()
        return node

    def parse_unary() -> Polynomial:
        if peek() == "-":
            advance()
            return -parse_unary()
        return parse_power()

    def parse_power() -> Polynomial:
        node = parse_atom()
        if peek() == "^":
            advance()
            tok = peek()
            if tok is None or not tok.isdigit():
                raise InputError("expected integer exponent after '^'")
            advance()
            node = node ** int(tok)
        return node

    def parse_atom() -> Polynomial:
        tok = peek()
        if tok is None:
            raise InputError("unexpected end of polynomial text")
        if tok == "(":
            advance()
            node = parse_expr()
            if peek() != ")":
                raise InputError("missing closing parenthesis")
            advance()
            return node
        if tok.startswith("x"):
            advance()
            return Polynomial.variable(num_vars, int(tok[1:]))
        if tok.isdigit():
            advance()
            value = Fraction(int(tok))
            if peek() == "/":
                advance()
                den = peek()
                if den is None or not den.isdigit():
                    raise InputError("expected integer denominator after '/'")
                advance()
                value = Fraction(value, int(den))
            return Polynomial.constant(num_vars, value)
        raise InputError(f"unexpected token {tok!r}")

    result = parse_expr()
    if idx != len(tokens):
        raise InputError(f"trailing tokens starting at {tokens[idx]!r}")
    return result
