"""Primal-dual interior-point solver for assembled moment relaxations.

Solves
    minimize    c . z
    subject to  A_b(z) := sum_i z_i A_ib  PSD   for every block b
                z[k] = a_k                      for every pinned moment
with z free, via a path-following method with Nesterov-Todd scaling and a
Mehrotra predictor-corrector step.  The multipliers of the pinned-moment
equalities are reported as ``q_coeffs``: for a parametric relaxation they
are the coefficients of the univariate certificate polynomial q, whose
Lebesgue integral on [0, 1] equals the dual objective.

Dense block factorizations throughout; block sides at desk scale stay in
the low hundreds, so robustness is preferred over sparse-exploiting speed.
"""

from __future__ import annotations

import enum
import sys
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .polynomial import Polynomial
from .relax import MomentSDP

_SQRT2 = np.sqrt(2.0)


class SolverFailure(RuntimeError):
    """Solve did not produce a usable optimum."""


class InfeasibleRelaxation(RuntimeError):
    """The relaxation was certified (or strongly suspected) infeasible."""


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITER = "maxiter"
    NUMERICAL_TROUBLE = "numerical-trouble"


@dataclass
class SolverOptions:
    gap_tol: float = 1e-7
    feas_tol: float = 1e-7
    max_iter: int = 200
    step_frac: float = 0.98
    verbose: bool = False

    def validate(self) -> None:
        if self.gap_tol <= 0 or self.feas_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class SDPSolution:
    """Solver output; ``q_coeffs`` are the pinned-moment multipliers in the
    order the equalities were declared."""

    z: np.ndarray
    q_coeffs: np.ndarray
    objective_primal: float
    objective_dual: float
    gap: float
    status: Status
    iterations: int
    primal_resid: float
    dual_resid: float
    sos_blocks: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _BlockData:
    """Solver-side view of one PSD block: a sparse scatter matrix P of
    shape (num_moments, side^2) with A_b(z) = mat(P' z)."""

    def __init__(self, zi, rr, cc, vv, side: int, nmom: int):
        self.side = side
        flat = rr * side + cc
        self.P = sp.csr_matrix((vv, (zi, flat)), shape=(nmom, side * side))
        self.P.sum_duplicates()
        self.active = np.unique(zi)
        self.Pact = self.P[self.active]
        iu, ju = np.triu_indices(side)
        self._iu, self._ju = iu, ju
        self._svec_w = np.where(iu == ju, 1.0, _SQRT2)

    def apply(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(self.P.T @ z).reshape(self.side, self.side)

    def adjoint(self, Y: np.ndarray) -> np.ndarray:
        return np.asarray(self.P @ Y.reshape(-1))

    def gram(self, F: np.ndarray, out: np.ndarray, chunk: int = 256) -> None:
        """Accumulate the scaled Gram matrix <A_i, G A_j G>, G = F F',
        into ``out`` (full num_moments square), touching active rows only."""
        nb = self.side
        nact = len(self.active)
        Q = np.empty((nact, len(self._iu)))
        for lo in range(0, nact, chunk):
            hi = min(lo + chunk, nact)
            dense = self.Pact[lo:hi].toarray().reshape(hi - lo, nb, nb)
            T = np.matmul(F.T, np.matmul(dense, F))
            Q[lo:hi] = T[:, self._iu, self._ju] * self._svec_w
        out[np.ix_(self.active, self.active)] += Q @ Q.T


def _chol(mat: np.ndarray) -> np.ndarray:
    return np.linalg.cholesky(mat)


def _max_step(X: np.ndarray, dX: np.ndarray, Lx: np.ndarray) -> float:
    """Largest alpha with X + alpha dX still PSD (X PD, Lx = chol(X))."""
    C = sla.solve_triangular(Lx, dX, lower=True)
    D = sla.solve_triangular(Lx, C.T, lower=True)
    lam_min = float(np.linalg.eigvalsh(0.5 * (D + D.T))[0])
    if lam_min >= -1e-16:
        return np.inf
    return -1.0 / lam_min


class _Scaling:
    """Per-block NT scaling point W with W Y W = S, plus the factors the
    Newton and corrector steps need."""

    def __init__(self, S: np.ndarray, Y: np.ndarray):
        self.Ls = _chol(S)
        self.Ly = _chol(Y)
        M = self.Ls.T @ Y @ self.Ls
        lam, Q = np.linalg.eigh(0.5 * (M + M.T))
        lam = np.maximum(lam, 1e-300)
        T = self.Ls @ Q
        self.W = (T * lam ** -0.5) @ T.T
        # G = W^{-1} = B diag(sqrt(lam)) B' with B = Ls^{-T} Q
        B = sla.solve_triangular(self.Ls.T, Q, lower=False)
        self.G = (B * lam ** 0.5) @ B.T
        self.Gfactor = B * lam ** 0.25
        w, U = np.linalg.eigh(0.5 * (self.W + self.W.T))
        w = np.maximum(w, 1e-300)
        self.Whalf = (U * w ** 0.5) @ U.T
        self.Wmhalf = (U * w ** -0.5) @ U.T

    def inv_from_chol(self, L: np.ndarray) -> np.ndarray:
        eye = np.eye(L.shape[0])
        half = sla.solve_triangular(L, eye, lower=True)
        return half.T @ half


def _scatter(idx: np.ndarray, vals: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n)
    out[idx] = vals
    return out


def solve(sdp: MomentSDP, opts: SolverOptions | None = None) -> SDPSolution:
    """Run the interior-point method on an assembled relaxation."""
    opts = opts or SolverOptions()
    opts.validate()
    t0 = time.perf_counter()

    n = sdp.num_moments
    c = np.asarray(sdp.objective, dtype=float)
    if not sdp.equalities:
        raise ValueError("relaxation has no pinned moments (mass normalization missing)")
    eq_idx = np.array([i for i, _ in sdp.equalities], dtype=np.int64)
    a = np.array([v for _, v in sdp.equalities], dtype=float)
    m = len(eq_idx)

    blocks = [_BlockData(*blk.coo(), blk.side, n) for blk in sdp.blocks]
    ntot = sum(b.side for b in blocks)

    # start from the pinned moments, identity-scaled slack and multiplier
    # blocks; pinned equalities then hold exactly along the whole run.
    z = np.zeros(n)
    z[eq_idx] = a
    nu = np.zeros(m)
    S, Y = [], []
    cnorm = np.linalg.norm(c, np.inf)
    for b in blocks:
        az0 = b.apply(z)
        scale = max(1.0, np.linalg.norm(az0, "fro"))
        S.append(scale * np.eye(b.side))
        Y.append(max(1.0, cnorm) * np.eye(b.side))

    best = None
    best_merit = np.inf
    status = Status.MAX_ITER
    it = 0
    stall = 0

    def metrics():
        Az = [b.apply(z) for b in blocks]
        Rp = [Az[k] - S[k] for k in range(len(blocks))]
        re = a - z[eq_idx]
        adjY = np.zeros(n)
        for k, b in enumerate(blocks):
            adjY += b.adjoint(Y[k])
        rd = c - adjY - _scatter(eq_idx, nu, n)
        mu = sum(np.vdot(S[k], Y[k]) for k in range(len(blocks))) / ntot
        rho_p = float(c @ z)
        rho_d = float(a @ nu)
        pres = max(
            np.linalg.norm(Rp[k], "fro") / (1.0 + np.linalg.norm(Az[k], "fro"))
            for k in range(len(blocks))
        )
        eqres = float(np.abs(re).max()) if m else 0.0
        dres = float(np.abs(rd).max()) / (1.0 + cnorm)
        rgap = abs(rho_p - rho_d) / (1.0 + abs(rho_p) + abs(rho_d))
        return Az, Rp, re, rd, mu, rho_p, rho_d, pres, eqres, dres, rgap, adjY

    for it in range(opts.max_iter + 1):
        Az, Rp, re, rd, mu, rho_p, rho_d, pres, eqres, dres, rgap, adjY = metrics()

        merit = pres + eqres + dres + rgap
        if merit < best_merit:
            best_merit = merit
            best = (z.copy(), nu.copy(), [y.copy() for y in Y], rho_p, rho_d,
                    rgap, pres + eqres, dres, it)

        if opts.verbose:
            print(
                f"[ipm] it={it:3d} mu={mu:9.2e} pres={pres:8.2e} "
                f"dres={dres:8.2e} gap={rgap:8.2e} rp={rho_p:+.8e} rd={rho_d:+.8e}",
                file=sys.stderr,
            )

        if pres <= opts.feas_tol and eqres <= opts.feas_tol and dres <= opts.feas_tol \
                and rgap <= opts.gap_tol:
            status = Status.OPTIMAL
            best = (z.copy(), nu.copy(), [y.copy() for y in Y], rho_p, rho_d,
                    rgap, pres + eqres, dres, it)
            break

        # Farkas-style divergence tests: a dual ray with positive value
        # certifies primal infeasibility; a primal ray with unbounded
        # objective certifies unboundedness.
        dual_ray = np.abs(adjY + _scatter(eq_idx, nu, n)).max()
        if rho_d > 1e8 and rho_d > 1e8 * max(1e-12, dual_ray / max(1.0, abs(rho_d))):
            if dual_ray <= 1e-6 * abs(rho_d):
                status = Status.INFEASIBLE
                break
        if rho_p < -1e9 and np.abs(z).max() > 1e9 and pres <= 1e-5:
            status = Status.UNBOUNDED
            break

        if it >= opts.max_iter:
            status = Status.MAX_ITER
            break

        try:
            scalings = [_Scaling(S[k], Y[k]) for k in range(len(blocks))]
        except np.linalg.LinAlgError:
            status = Status.NUMERICAL_TROUBLE
            break

        H = np.zeros((n, n))
        for k, b in enumerate(blocks):
            b.gram(scalings[k].Gfactor, H)

        jitter = 1e-13 * (1.0 + float(np.trace(H)) / n)
        cho = None
        for _ in range(8):
            try:
                cho = sla.cho_factor(H + jitter * np.eye(n), lower=True)
                break
            except np.linalg.LinAlgError:
                jitter *= 100.0
        if cho is None:
            status = Status.NUMERICAL_TROUBLE
            break

        eye_cols = np.zeros((n, m))
        eye_cols[eq_idx, np.arange(m)] = 1.0
        Xcols = sla.cho_solve(cho, eye_cols)
        schur = Xcols[eq_idx, :]

        def newton(Rc):
            rhs = -rd.copy()
            for k, b in enumerate(blocks):
                G = scalings[k].G
                rhs += b.adjoint(G @ (Rc[k] - Rp[k]) @ G)
            u = sla.cho_solve(cho, rhs)
            try:
                dnu = np.linalg.solve(schur, re - u[eq_idx])
            except np.linalg.LinAlgError:
                dnu = np.linalg.lstsq(schur, re - u[eq_idx], rcond=None)[0]
            dz = u + Xcols @ dnu
            dS = [blocks[k].apply(dz) + Rp[k] for k in range(len(blocks))]
            dY = []
            for k in range(len(blocks)):
                G = scalings[k].G
                dYk = G @ (Rc[k] - dS[k]) @ G
                dY.append(0.5 * (dYk + dYk.T))
            return dz, dnu, dS, dY

        # predictor (affine scaling direction)
        Rc_aff = [-S[k] for k in range(len(blocks))]
        dz_a, dnu_a, dS_a, dY_a = newton(Rc_aff)
        a_s = min(1.0, 0.99 * min(_max_step(S[k], dS_a[k], scalings[k].Ls)
                                  for k in range(len(blocks))))
        a_y = min(1.0, 0.99 * min(_max_step(Y[k], dY_a[k], scalings[k].Ly)
                                  for k in range(len(blocks))))
        mu_aff = sum(
            np.vdot(S[k] + a_s * dS_a[k], Y[k] + a_y * dY_a[k])
            for k in range(len(blocks))
        ) / ntot
        sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, 1e-10, 1.0))

        # corrector with the second-order term in the scaled space
        Rc = []
        for k in range(len(blocks)):
            sc = scalings[k]
            Yinv = sc.inv_from_chol(sc.Ly)
            Ds = sc.Wmhalf @ dS_a[k] @ sc.Wmhalf
            Dy = sc.Whalf @ dY_a[k] @ sc.Whalf
            V = sc.Wmhalf @ S[k] @ sc.Wmhalf
            Vinv = sc.Whalf @ sc.inv_from_chol(sc.Ls) @ sc.Whalf
            theta = 0.5 * (Ds @ Dy + Dy @ Ds)
            rq = 0.5 * (Vinv @ theta + theta @ Vinv)
            corr = sc.Whalf @ rq @ sc.Whalf
            Rck = sigma * mu * Yinv - S[k] - 0.5 * (corr + corr.T)
            Rc.append(0.5 * (Rck + Rck.T))
        dz, dnu, dS, dY = newton(Rc)

        tau = opts.step_frac if rgap > 1e-5 else min(0.995, opts.step_frac + 0.015)
        a_s = min(1.0, tau * min(_max_step(S[k], dS[k], scalings[k].Ls)
                                 for k in range(len(blocks))))
        a_y = min(1.0, tau * min(_max_step(Y[k], dY[k], scalings[k].Ly)
                                 for k in range(len(blocks))))

        if opts.verbose:
            print(f"[ipm]      sigma={sigma:6.1e} alpha_p={a_s:6.3f} alpha_d={a_y:6.3f}",
                  file=sys.stderr)

        if min(a_s, a_y) < 1e-4:
            stall += 1
            if stall >= 3:
                status = Status.NUMERICAL_TROUBLE
                break
        else:
            stall = 0

        z += a_s * dz
        nu += a_y * dnu
        for k in range(len(blocks)):
            S[k] = S[k] + a_s * dS[k]
            Y[k] = Y[k] + a_y * dY[k]

    z_out, nu_out, Y_out, rho_p, rho_d, rgap, pres, dres, it_out = best
    if opts.verbose:
        print(f"[ipm] done status={status.value} iters={it_out} "
              f"elapsed={time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return SDPSolution(
        z=z_out,
        q_coeffs=nu_out,
        objective_primal=rho_p,
        objective_dual=rho_d,
        gap=rgap,
        status=status,
        iterations=it_out,
        primal_resid=pres,
        dual_resid=dres,
        sos_blocks=Y_out,
    )


def extract_dual_polynomial(
    sol: SDPSolution, d: int, gap_tol: float | None = None
) -> Polynomial:
    """Univariate certificate polynomial q(y) built from the equality
    multipliers of a parametric relaxation of order d.

    Its Lebesgue integral on [0, 1] reproduces the dual objective; when the
    solve reached the gap tolerance and gap_tol < 1/d, q is a near-optimal
    dual solution in the 1/d sense.
    """
    if sol.status in (Status.INFEASIBLE, Status.UNBOUNDED):
        raise SolverFailure(f"dual multipliers unavailable at status {sol.status.value}")
    q = np.asarray(sol.q_coeffs, dtype=float)
    if len(q) != 2 * d + 1:
        raise ValueError(
            f"expected 2d+1 = {2 * d + 1} multipliers for order d={d}, got {len(q)}"
        )
    integral = float(sum(qk / (k + 1) for k, qk in enumerate(q)))
    if abs(integral - sol.objective_dual) > 1e-8 * (1.0 + abs(sol.objective_dual)):
        raise SolverFailure(
            "equality multipliers do not integrate to the dual objective; "
            "was this relaxation assembled with Lebesgue-pinned moments?"
        )
    if gap_tol is not None and gap_tol >= 1.0 / d:
        import warnings

        warnings.warn(
            f"gap tolerance {gap_tol} is not below 1/d = {1.0 / d:.3g}; the "
            "near-optimality margin of the certificate is not guaranteed",
            stacklevel=2,
        )
    return Polynomial(1, {(k,): float(qk) for k, qk in enumerate(q)})
