"""Sparse multivariate polynomials and graded-lexicographic monomial bases.

Monomials are plain exponent tuples; a polynomial is a mapping from
exponent tuples to real coefficients.  The variable convention used by the
rest of the package is: the scalarization parameter comes first, then the
decision variables, then (when present) the Chebyshev lifting variable
last.  The graded-lex order makes the first variable the most significant
inside each total degree.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Sequence

Monomial = tuple[int, ...]


def monomial_degree(mono: Monomial) -> int:
    return sum(mono)


def _grlex_key(mono: Monomial) -> tuple:
    # degree major; within a degree, lexicographically descending so that
    # e.g. (1,0) sorts before (0,1).
    return (sum(mono),) + tuple(-e for e in mono)


def _monomials_of_degree(nvars: int, total: int) -> Iterator[Monomial]:
    if nvars == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _monomials_of_degree(nvars - 1, total - head):
            yield (head,) + tail


class Basis:
    """All monomials in ``nvars`` variables of total degree <= degree_bound,
    in graded-lex order, with O(1) position lookup."""

    def __init__(self, nvars: int, degree_bound: int):
        if nvars < 1:
            raise ValueError("need at least one variable")
        if degree_bound < 0:
            raise ValueError("degree bound must be nonnegative")
        self.nvars = nvars
        self.degree_bound = degree_bound
        members: list[Monomial] = []
        for total in range(degree_bound + 1):
            members.extend(_monomials_of_degree(nvars, total))
        self.members: tuple[Monomial, ...] = tuple(members)
        self._pos = {m: i for i, m in enumerate(self.members)}

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.members)

    def __getitem__(self, i: int) -> Monomial:
        return self.members[i]

    def position(self, mono: Monomial) -> int:
        """Index of ``mono`` in the enumeration; inverse of __getitem__."""
        try:
            return self._pos[tuple(mono)]
        except KeyError:
            raise ValueError(
                f"monomial {mono} outside basis (nvars={self.nvars}, "
                f"degree<={self.degree_bound})"
            ) from None

    def __contains__(self, mono: Monomial) -> bool:
        return tuple(mono) in self._pos

    def __repr__(self) -> str:
        return f"Basis(nvars={self.nvars}, degree_bound={self.degree_bound}, size={len(self)})"


def enumerate_basis(nvars: int, d: int) -> Basis:
    """Graded-lex basis of all monomials with total degree <= d.

    Size is binomial(nvars + d, d).
    """
    return Basis(nvars, d)


def basis_size(nvars: int, d: int) -> int:
    return math.comb(nvars + d, d)


class Polynomial:
    """Sparse real polynomial; zero coefficients are dropped eagerly."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[Monomial, float] | None = None):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.nvars = nvars
        clean: dict[Monomial, float] = {}
        for mono, coef in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise ValueError(f"exponent tuple {mono} has wrong length (nvars={nvars})")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = float(coef)
            if c != 0.0:
                clean[mono] = c
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, value: float, nvars: int) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range")
        mono = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, {mono: 1.0})

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[Sequence[int], float]], nvars: int) -> "Polynomial":
        acc: dict[Monomial, float] = {}
        for exps, coef in pairs:
            mono = tuple(int(e) for e in exps)
            acc[mono] = acc.get(mono, 0.0) + float(coef)
        return cls(nvars, acc)

    # -- structure ----------------------------------------------------
    @property
    def degree(self) -> int:
        """Max total degree over stored terms; 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(sum(m) for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Monomial, float]]:
        """Terms in graded-lex order (deterministic iteration)."""
        return sorted(self.terms.items(), key=lambda it: _grlex_key(it[0]))

    # -- arithmetic ---------------------------------------------------
    def _require_same_space(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(other, self.nvars)
        self._require_same_space(other)
        acc = dict(self.terms)
        for mono, coef in other.terms.items():
            acc[mono] = acc.get(mono, 0.0) + coef
        return Polynomial(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(other, self.nvars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Polynomial(self.nvars, {m: c * other for m, c in self.terms.items()})
        self._require_same_space(other)
        acc: dict[Monomial, float] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                acc[mono] = acc.get(mono, 0.0) + c1 * c2
        return Polynomial(self.nvars, acc)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return self * (1.0 / scalar)

    def affine_scale(self, shift: float, scale: float) -> "Polynomial":
        """Return (p - shift) / scale; evaluation commutes with the map."""
        if scale == 0.0:
            raise ValueError("zero scale in affine rescaling")
        return (self - shift) / scale

    # -- evaluation ---------------------------------------------------
    def __call__(self, point: Sequence[float]) -> float:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0.0
        for mono, coef in self.terms.items():
            v = coef
            for x, e in zip(point, mono):
                if e:
                    v *= x ** e
            total += v
        return total

    # -- variable-space surgery ----------------------------------------
    def pad(self, before: int, after: int) -> "Polynomial":
        """Embed into a larger variable space by prepending/appending
        zero-exponent slots."""
        if before < 0 or after < 0:
            raise ValueError("pad counts must be nonnegative")
        pre = (0,) * before
        post = (0,) * after
        return Polynomial(
            self.nvars + before + after,
            {pre + m + post: c for m, c in self.terms.items()},
        )

    def freeze_var(self, index: int, value: float) -> "Polynomial":
        """Substitute ``value`` for one variable and drop its slot."""
        if not 0 <= index < self.nvars:
            raise ValueError(f"variable index {index} out of range")
        if self.nvars == 1:
            raise ValueError("cannot drop the last variable")
        acc: dict[Monomial, float] = {}
        for mono, coef in self.terms.items():
            rest = mono[:index] + mono[index + 1:]
            c = coef * value ** mono[index]
            acc[rest] = acc.get(rest, 0.0) + c
        return Polynomial(self.nvars - 1, acc)

    # -- misc -----------------------------------------------------------
    def coefficient_vector(self, basis: Basis) -> "list[float]":
        """Dense coefficient list placed by basis position."""
        if basis.nvars != self.nvars:
            raise ValueError("basis variable count mismatch")
        vec = [0.0] * len(basis)
        for mono, coef in self.terms.items():
            vec[basis.position(mono)] = coef
        return vec

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for mono, coef in self.sorted_terms():
            mono_s = "*".join(f"x{i}^{e}" for i, e in enumerate(mono) if e) or "1"
            bits.append(f"{coef:+g}*{mono_s}")
        return f"Polynomial({' '.join(bits)})"
