"""Assembly of truncated moment relaxations.

Given a polynomial program over variables (y, x)  --  minimize f subject to
p_l(y, x) >= 0  --  the order-d relaxation optimizes a linear functional of
the pseudo-moment vector z, indexed by all monomials of degree <= 2d,
subject to positive semidefiniteness of the moment matrix and one
localizing matrix per constraint, plus linear equalities that pin selected
moments.  For the parametric programs built by :mod:`paretosdp.scalarize`
the pinned moments are those of the first variable, forced to match the
Lebesgue moments 1/(k+1) on [0, 1]; the underlying occupation measure has
no explicit runtime object, it lives entirely in z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .polynomial import Basis, Monomial, Polynomial, enumerate_basis

if TYPE_CHECKING:  # pragma: no cover
    from .scalarize import ParametricPOP


def localizing_order(p: Polynomial) -> int:
    """Half-degree v = ceil(deg p / 2) of a constraint polynomial."""
    return (p.degree + 1) // 2


@dataclass
class PSDBlock:
    """One PSD constraint: entry (r, c) of the matrix is a sparse dot
    product against z.  Only r <= c is stored; the block is symmetric."""

    side: int
    entries: dict[tuple[int, int], tuple[tuple[int, float], ...]]
    label: str = ""

    def entry(self, r: int, c: int) -> tuple[tuple[int, float], ...]:
        if r > c:
            r, c = c, r
        return self.entries[(r, c)]

    def materialize(self, z: np.ndarray) -> np.ndarray:
        mat = np.zeros((self.side, self.side))
        for (r, c), refs in self.entries.items():
            v = 0.0
            for zi, coef in refs:
                v += coef * z[zi]
            mat[r, c] = v
            mat[c, r] = v
        return mat

    def coo(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Scatter triplets (z_index, row, col, value) covering the full
        symmetric matrix (both triangles)."""
        zi, rr, cc, vv = [], [], [], []
        for (r, c), refs in sorted(self.entries.items()):
            for idx, coef in refs:
                zi.append(idx)
                rr.append(r)
                cc.append(c)
                vv.append(coef)
                if r != c:
                    zi.append(idx)
                    rr.append(c)
                    cc.append(r)
                    vv.append(coef)
        return (
            np.asarray(zi, dtype=np.int64),
            np.asarray(rr, dtype=np.int64),
            np.asarray(cc, dtype=np.int64),
            np.asarray(vv, dtype=float),
        )


@dataclass
class MomentSDP:
    """Order-d moment relaxation in solver-ready form:

    minimize  objective . z
    s.t.      every block, seen as a linear matrix function of z, is PSD
              z[index] = value for each pinned moment in ``equalities``
    """

    order: int
    z_basis: Basis
    objective: np.ndarray
    blocks: list[PSDBlock]
    equalities: list[tuple[int, float]] = field(default_factory=list)

    @property
    def num_moments(self) -> int:
        return len(self.z_basis)

    def linear_functional(self, z: np.ndarray, p: Polynomial) -> float:
        """L_z(p) = sum of p's coefficients against matching moments."""
        if p.nvars != self.z_basis.nvars:
            raise ValueError("polynomial lives in a different variable space")
        if p.degree > 2 * self.order:
            raise ValueError(
                f"degree {p.degree} exceeds moment truncation {2 * self.order}"
            )
        total = 0.0
        for mono, coef in p.terms.items():
            total += coef * z[self.z_basis.position(mono)]
        return total

    def to_sdpa(self) -> str:
        """Line-oriented sparse listing for debugging.

        Format: first line "blocks: s1 s2 ...", second line
        "moments: N", then one line per scatter entry,
        "<moment-index> <block> <row> <col> <value>" (all 0-based), then
        "eq <moment-index> <value>" lines and "obj <moment-index> <value>"
        lines for the nonzero objective entries.
        """
        out = ["blocks: " + " ".join(str(b.side) for b in self.blocks)]
        out.append(f"moments: {self.num_moments}")
        for bi, blk in enumerate(self.blocks):
            for (r, c), refs in sorted(blk.entries.items()):
                for zi, coef in refs:
                    out.append(f"{zi} {bi} {r} {c} {coef!r}")
        for zi, val in self.equalities:
            out.append(f"eq {zi} {val!r}")
        for zi in np.flatnonzero(self.objective):
            out.append(f"obj {zi} {self.objective[zi]!r}")
        return "\n".join(out)


def min_order(pop: "ParametricPOP") -> int:
    """Smallest admissible relaxation order for a parametric program."""
    return _min_order(pop.objective, pop.constraints)


def _min_order(objective: Polynomial, constraints: Sequence[Polynomial]) -> int:
    d0 = (objective.degree + 1) // 2
    for p in constraints:
        d0 = max(d0, localizing_order(p))
    return max(d0, 1)


def _moment_block(z_basis: Basis, d: int) -> PSDBlock:
    rows = enumerate_basis(z_basis.nvars, d)
    entries: dict[tuple[int, int], tuple[tuple[int, float], ...]] = {}
    for r in range(len(rows)):
        mr = rows[r]
        for c in range(r, len(rows)):
            mono = tuple(a + b for a, b in zip(mr, rows[c]))
            entries[(r, c)] = ((z_basis.position(mono), 1.0),)
    return PSDBlock(side=len(rows), entries=entries, label="moment")


def _localizing_block(z_basis: Basis, p: Polynomial, d: int, label: str) -> PSDBlock:
    v = localizing_order(p)
    rows = enumerate_basis(z_basis.nvars, d - v)
    terms = p.sorted_terms()
    entries: dict[tuple[int, int], tuple[tuple[int, float], ...]] = {}
    for r in range(len(rows)):
        mr = rows[r]
        for c in range(r, len(rows)):
            rc = tuple(a + b for a, b in zip(mr, rows[c]))
            entries[(r, c)] = tuple(
                (z_basis.position(tuple(a + b for a, b in zip(rc, gm))), gc)
                for gm, gc in terms
            )
    return PSDBlock(side=len(rows), entries=entries, label=label)


def assemble_generic(
    objective: Polynomial,
    constraints: Sequence[Polynomial],
    d: int,
    pinned_moments: Sequence[tuple[Monomial, float]],
) -> MomentSDP:
    """Shared assembly path; ``pinned_moments`` fixes L_z on given monomials."""
    nvars = objective.nvars
    for p in constraints:
        if p.nvars != nvars:
            raise ValueError("constraint variable count mismatch")
    d0 = _min_order(objective, constraints)
    if d < d0:
        raise ValueError(f"order d={d} below the minimal admissible order d0={d0}")
    z_basis = enumerate_basis(nvars, 2 * d)
    c = np.zeros(len(z_basis))
    for mono, coef in objective.sorted_terms():
        c[z_basis.position(mono)] = coef
    blocks = [_moment_block(z_basis, d)]
    for li, p in enumerate(constraints):
        blocks.append(_localizing_block(z_basis, p, d, label=f"loc{li}"))
    seen: set[int] = set()
    equalities: list[tuple[int, float]] = []
    for mono, val in pinned_moments:
        idx = z_basis.position(mono)
        if idx in seen:
            raise ValueError(f"duplicate pinned moment for monomial {mono}")
        seen.add(idx)
        equalities.append((idx, float(val)))
    return MomentSDP(order=d, z_basis=z_basis, objective=c, blocks=blocks,
                     equalities=equalities)


def assemble(pop: "ParametricPOP", d: int) -> MomentSDP:
    """Order-d relaxation of a parametric program: the marginal moments of
    the parameter variable are pinned to 1/(k+1), k = 0..2d (k = 0 is the
    unit-mass normalization)."""
    nvars = pop.objective.nvars
    pinned = []
    for k in range(2 * d + 1):
        mono = (k,) + (0,) * (nvars - 1)
        pinned.append((mono, 1.0 / (k + 1)))
    return assemble_generic(pop.objective, pop.constraints, d, pinned)


def assemble_pop(
    objective: Polynomial,
    constraints: Sequence[Polynomial],
    d: int,
) -> MomentSDP:
    """Order-d relaxation of a plain (non-parametric) program: only the
    unit-mass normalization is pinned."""
    mono0 = (0,) * objective.nvars
    return assemble_generic(objective, constraints, d, [(mono0, 1.0)])


def lebesgue_moment(k: int) -> float:
    """k-th moment of Lebesgue measure on [0, 1]."""
    return 1.0 / (k + 1)


def moment_block_side(nvars: int, d: int) -> int:
    return math.comb(nvars + d, d)
