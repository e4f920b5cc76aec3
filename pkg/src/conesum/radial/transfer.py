"""Secular-equation eigenvalue solver: analytic bases per segment, matched at seams.

On a segment with local cone radius r the channel equation
-u'' + gamma(gamma+1) u / r^2 = lam u has the exact solution basis
sqrt(r) J_nu(k r), sqrt(r) Y_nu(k r) with k = sqrt(lam) and nu = |gamma+1/2|
(power laws r^(1/2 +- nu) at lam = 0).  A basis of states admissible at the
left end of the profile and one admissible at the right end are propagated
to an interior matching breakpoint, applying the derivative-jump matrices at
each crossed seam; eigenvalues are the lam where the two solution spaces
intersect, i.e. the zeros of the determinant of the stacked state matrix.

Propagation never steps inside a segment: coefficients are obtained from the
entry state by a 2x2 solve per gamma-channel and evaluated at the exit, with
column renormalisation between segments so that the enormous dynamic range
of Bessel functions across small radii cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import DomainError
from ..geometry import BCKind
from .bessel import jy_arrays
from .problems import ChannelProblem, Eigenvalue, EigList

DIP_FACTOR = 1e-3  # |secular| dip (vs scan median) flagged for FEM adjudication


@dataclass(frozen=True)
class FundamentalBasis:
    """Solution basis (values, r-derivatives) of one channel at one radius."""

    values: tuple[float, float]
    derivatives: tuple[float, float]
    regular_index: int


def channel_fundamental(gamma: float, lam: float, r: float) -> FundamentalBasis:
    """Exact solution basis of -u'' + gamma(gamma+1) u / r^2 = lam u at radius r.

    For lam > 0 the basis is {sqrt(r) J_nu, sqrt(r) Y_nu} with the J-branch
    regular; for lam = 0 it is {r^(gamma+1), r^(-gamma)} with the branch of
    indicial exponent max(gamma+1, -gamma) regular.
    """
    if lam < 0:
        raise DomainError(f"negative spectral parameter: {lam}")
    if r <= 0:
        raise DomainError(f"radius must be positive: {r}")
    if lam == 0:
        e1, e2 = gamma + 1.0, -gamma
        vals = (r ** e1, r ** e2)
        ders = (e1 * r ** (e1 - 1.0), e2 * r ** (e2 - 1.0))
        return FundamentalBasis(vals, ders, 0 if e1 >= e2 else 1)
    nu = abs(gamma + 0.5)
    m = _fundamental_matrix(nu, math.sqrt(lam), np.array([r]))[0]
    return FundamentalBasis((m[0, 0], m[0, 1]), (m[1, 0], m[1, 1]), 0)


def _fundamental_matrix(nu: float, k: float, r: np.ndarray) -> np.ndarray:
    """Stack of [[f1, f2], [f1', f2']] at each radius for order nu."""
    r = np.asarray(r, dtype=float)
    out = np.empty((len(r), 2, 2))
    if k == 0.0:
        e1, e2 = 0.5 + nu, 0.5 - nu
        out[:, 0, 0] = r ** e1
        out[:, 0, 1] = r ** e2
        out[:, 1, 0] = e1 * r ** (e1 - 1.0)
        out[:, 1, 1] = e2 * r ** (e2 - 1.0)
        return out
    x = k * r
    j, y, jp, yp = jy_arrays(nu, x)
    sq = np.sqrt(r)
    out[:, 0, 0] = sq * j
    out[:, 0, 1] = sq * y
    out[:, 1, 0] = 0.5 / sq * j + sq * k * jp
    out[:, 1, 1] = 0.5 / sq * y + sq * k * yp
    return out


class _Propagator:
    """Per-lambda state propagation for one channel problem."""

    def __init__(self, problem: ChannelProblem, lam: float):
        self.p = problem
        self.lam = lam
        self.k = math.sqrt(lam) if lam > 0 else 0.0
        self.size = problem.size
        self.V = problem.eigvecs
        self.nus = problem.nus
        self.seam_ks = problem.seam_matrices()

    def segment_map(self, states: np.ndarray, seg_idx: int, entry: str) -> np.ndarray:
        """Map global states (2*size, m) across a segment from one end to the other."""
        seg = self.p.profile.segments[seg_idx]
        o = seg.orientation
        r_from = seg.radius_at_entry() if entry == "entry" else seg.radius_at_exit()
        r_to = seg.radius_at_exit() if entry == "entry" else seg.radius_at_entry()
        d = self.p.orientation_signs(o)
        m = states.shape[1]
        vals, ders = states[: self.size], states[self.size :]
        # local block-eigen coordinates
        w = self.V.T @ (d[:, None] * vals)
        wp = self.V.T @ (d[:, None] * ders) * o
        w_to = np.empty_like(w)
        wp_to = np.empty_like(wp)
        for j in range(self.size):
            m_from = _fundamental_matrix(self.nus[j], self.k, np.array([r_from]))[0]
            m_to = _fundamental_matrix(self.nus[j], self.k, np.array([r_to]))[0]
            scale = np.abs(m_from).max(axis=0)
            scale[scale == 0] = 1.0
            coeff = np.linalg.solve(m_from / scale, np.vstack([w[j], wp[j]]))
            res = (m_to / scale) @ coeff
            w_to[j], wp_to[j] = res[0], res[1]
        vals_to = d[:, None] * (self.V @ w_to)
        ders_to = d[:, None] * (self.V @ wp_to) * o
        return np.vstack([vals_to, ders_to])

    def regular_states(self, seg_idx: int, at: str) -> np.ndarray:
        """States of the tip-regular branches of a tip segment at its far end."""
        seg = self.p.profile.segments[seg_idx]
        o = seg.orientation
        r_eval = seg.radius_at_exit() if at == "exit" else seg.radius_at_entry()
        d = self.p.orientation_signs(o)
        cols = []
        for j in range(self.size):
            mat = _fundamental_matrix(self.nus[j], self.k, np.array([r_eval]))[0]
            if self.k == 0.0:
                idx = 0  # r^(1/2+nu) column
            else:
                idx = 0  # J column
            w = np.zeros(self.size)
            wp = np.zeros(self.size)
            w[j], wp[j] = mat[0, idx], mat[1, idx]
            vals = d * (self.V @ w)
            ders = d * (self.V @ wp) * o
            cols.append(np.concatenate([vals, ders]))
        return np.array(cols).T

    def jump(self, states: np.ndarray, seam_idx: int, direction: int) -> np.ndarray:
        """Apply the seam derivative jump crossing rightward (+1) or leftward (-1)."""
        K = self.seam_ks[seam_idx]
        if K is None:
            return states
        out = states.copy()
        out[self.size :] += direction * (K @ states[: self.size])
        return out

    def boundary_states(self, which: str) -> np.ndarray:
        """Columns spanning the admissible states at an exposed endpoint."""
        data = self.p.endpoint(which)
        size = self.size
        cons = [np.asarray(c, dtype=float) for c in data.constraints]
        if cons:
            cmat = np.vstack(cons)
            q, _ = np.linalg.qr(cmat.T, mode="complete")
            ncon = np.linalg.matrix_rank(cmat)
            normals = q[:, :ncon] if ncon else np.zeros((size, 0))
            free = q[:, ncon:]
        else:
            normals = np.zeros((size, 0))
            free = np.eye(size)
        proj = np.eye(size) - normals @ normals.T
        k_e = data.k_matrix if data.k_matrix is not None else np.zeros((size, size))
        sign = 1.0 if which == "start" else -1.0
        cols = []
        for i in range(free.shape[1]):
            v = free[:, i]
            cols.append(np.concatenate([v, sign * proj @ (k_e @ v)]))
        for i in range(normals.shape[1]):
            cols.append(np.concatenate([np.zeros(size), normals[:, i]]))
        return np.array(cols).T


def _normalize_columns(states: np.ndarray) -> np.ndarray:
    scale = np.abs(states).max(axis=0)
    scale[scale == 0] = 1.0
    return states / scale


def secular_value(problem: ChannelProblem, lam: float, raw: bool = False) -> float:
    """Normalized secular determinant; zero exactly at eigenvalues.

    States are tracked per breakpoint with a side convention: the seam jump
    at an interior breakpoint maps the limit from the left segment to the
    limit from the right segment.  By default the determinant is compressed
    by its matrix-size-th root to tame the dynamic range during scanning;
    ``raw=True`` keeps the plain determinant (quadratic near double roots),
    which the even-order confirmation relies on.
    """
    prop = _Propagator(problem, lam)
    profile = problem.profile
    nseg = len(profile.segments)
    # matching breakpoint: interior breakpoint of largest radius, if any
    radii = [profile.segments[i].radius_at_exit() for i in range(nseg - 1)]
    match = 1 + int(np.argmax(radii)) if radii else nseg

    # left branch, ending at breakpoint `match` seen from the left segment
    if profile.start_bc is BCKind.REGULAR_TIP:
        left = prop.regular_states(0, "exit")
        cur, on_left_side = 1, True
    else:
        left = prop.boundary_states("start")
        cur, on_left_side = 0, False
    while cur < match:
        if on_left_side:
            left = prop.jump(left, cur - 1, +1)
        left = _normalize_columns(prop.segment_map(left, cur, "entry"))
        cur, on_left_side = cur + 1, True

    # right branch, ending at breakpoint `match` seen from the right segment
    if profile.end_bc is BCKind.REGULAR_TIP:
        right = prop.regular_states(nseg - 1, "entry")
        cur, on_right_side = nseg - 1, True
    else:
        right = prop.boundary_states("end")
        cur, on_right_side = nseg, False
    while cur > match:
        if on_right_side:
            right = prop.jump(right, cur - 1, -1)
        right = _normalize_columns(prop.segment_map(right, cur - 1, "exit"))
        cur, on_right_side = cur - 1, True

    if 1 <= match <= nseg - 1:
        left = prop.jump(left, match - 1, +1)

    full = np.hstack([_normalize_columns(left), _normalize_columns(right)])
    sign, logdet = np.linalg.slogdet(full)
    if sign == 0:
        return 0.0
    power = 1.0 if raw else full.shape[0]
    return float(sign * math.exp(max(min(logdet / power, 600.0), -600.0)))


def locate_roots_in_window(
    problem: ChannelProblem, lo: float, hi: float, expect: int
) -> list[float]:
    """Dense scan for secular roots inside a window, refining until either
    sign changes account for the expected count or the grid is exhausted."""
    found: list[float] = []
    n = 64
    while n <= 4096:
        grid = np.linspace(lo, hi, n)
        vals = np.array([secular_value(problem, float(x)) for x in grid])
        found = []
        for i in range(n - 1):
            if vals[i] == 0.0:
                found.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0:
                found.append(
                    float(brentq(lambda l: secular_value(problem, l), grid[i], grid[i + 1], rtol=1e-15))
                )
        if len(found) >= expect:
            return found
        n *= 8
    return found


def confirm_even_root(
    problem: ChannelProblem, lo: float, hi: float, depth_tol: float = 1e-8
) -> float | None:
    """Locate an even-order secular root inside (lo, hi), or None.

    Minimizes the raw determinant magnitude; the minimum must undercut the
    parabolic scale set by the window edges by ``depth_tol`` to count as a
    root rather than a benign near-miss.
    """
    from scipy.optimize import minimize_scalar

    g = lambda lam: abs(secular_value(problem, lam, raw=True))
    res = minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13 * hi})
    edge = min(g(lo), g(hi))
    if edge <= 0:
        return float(res.x)
    return float(res.x) if res.fun <= depth_tol * edge else None


def transfer_spectrum(
    problem: ChannelProblem,
    lam_max: float,
    oversample: int = 8,
    refine_rtol: float = 1e-13,
) -> EigList:
    """Eigenvalues in (0, lam_max] of one channel problem by secular root search.

    The k = sqrt(lam) grid step is calibrated to the Weyl spacing pi/L of the
    profile; sign changes are bisected with brentq and magnitude dips without
    a sign change are reported as suspects for FEM adjudication.  Zero modes
    are counted analytically elsewhere and not reported here.
    """
    if lam_max <= 0:
        raise DomainError(f"lam_max must be positive, got {lam_max}")
    length = problem.profile.length
    dk = math.pi / (length * oversample)
    kmax = math.sqrt(lam_max)
    grid = np.arange(dk, kmax + dk, dk)
    if len(grid) < 2:
        grid = np.linspace(dk / 4, kmax, 8)
    vals = np.array([secular_value(problem, float(k) ** 2) for k in grid])

    entries: list[Eigenvalue] = []
    suspects: list[tuple[float, float]] = []
    scale = np.median(np.abs(vals)[np.abs(vals) > 0]) if np.any(np.abs(vals) > 0) else 1.0
    idx = 0
    for i in range(len(grid) - 1):
        a, b = float(grid[i]), float(grid[i + 1])
        fa, fb = float(vals[i]), float(vals[i + 1])
        if fa == 0.0:
            root = a
        elif fa * fb < 0:
            root = brentq(lambda k: secular_value(problem, k * k), a, b, xtol=refine_rtol, rtol=1e-15)
        else:
            # magnitude dip without sign change: possible double root
            if 0 < i < len(grid) - 1 and abs(fa) < DIP_FACTOR * scale and abs(fa) < abs(vals[i - 1]) and abs(fa) <= abs(fb):
                suspects.append((grid[i - 1] ** 2, b * b))
            continue
        lam = root * root
        if lam <= lam_max:
            entries.append(
                Eigenvalue(
                    value=lam,
                    problem=problem,
                    index=idx,
                    method="secular",
                    bracket=(a * a, b * b),
                )
            )
            idx += 1
    return EigList(entries=entries, suspects=suspects, meta={"grid_dk": dk})
