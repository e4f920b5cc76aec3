"""Harmonic-field matching systems: kernels of d + d* on a profile.

On every conical segment a field annihilated by the Gauss-Bonnet operator
decomposes over the eigenvectors of the active A-block as

    sigma(r) = sum_gamma  c_gamma  r^(-gamma)  w_gamma,

so kernels reduce to finite linear algebra on the per-segment coefficients:
continuity of the globally continuous variables at seams, suppression of the
singular branches (gamma > 0) next to tips, and boundary rows at exposed
ends.  An APS end is handled by continuing the profile with an exterior cone
on which only the square-integrable branches (gamma > 1/2) are admitted;
this is exactly the harmonic-prolongation description of the limit operator
and makes the reflection of boundary data at a radial-minimum junction
automatic.

The same machinery counts the zero modes of the fixed-degree Laplacian:
only coupled PLUS_HALF problems and the exceptional channels can carry
harmonic fields of pure degree, since a single slot of a MINUS_HALF block
feeds the other slot under d + d* (coefficient mu > 0) and therefore has
trivial kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cone_operator import ALPHA, Family
from ..geometry import BCKind, Segment
from .problems import ChannelProblem

RANK_TOL = 1e-10
NEAR_SINGULAR_FACTOR = 100.0


@dataclass(frozen=True)
class KernelResult:
    dim: int
    singular_values: tuple[float, ...]
    near_singular: bool
    n_unknowns: int
    n_rows: int


def _branches(problem: ChannelProblem):
    """(gamma, local block-coordinate vector) pairs spanning the segment solutions."""
    if problem.size == 2:
        return [(problem.block.gammas[i], problem.block.eigvecs[:, i]) for i in range(2)]
    gamma = problem.block.gammas[0]
    return [(gamma, np.array([1.0]))]


def first_order_kernel(problem: ChannelProblem, rank_tol: float = RANK_TOL) -> KernelResult:
    """Dimension of the harmonic fields of ``problem`` on its profile.

    Scalar slots of non-harmonic MINUS_HALF blocks are structurally trivial
    and report dimension 0 without assembling a system.
    """
    if problem.size == 1 and problem.block.family is not Family.EXCEPTIONAL:
        return KernelResult(0, (), False, 0, 0)

    profile = problem.profile
    branches = _branches(problem)
    size = problem.size

    segments: list[Segment] = list(profile.segments)
    allowed: list[list[int]] = [list(range(len(branches))) for _ in segments]
    # exterior continuation for APS ends; merged when the junction is smooth
    ext_allowed = [i for i, (g, _) in enumerate(branches) if g > 0.5]
    if profile.start_bc is BCKind.APS:
        first = segments[0]
        r_ext = 2.0 * max(first.r_hi, 1.0)
        if first.orientation < 0:
            segments[0] = Segment(first.r_lo, r_ext, -1)
            allowed[0] = ext_allowed
        else:
            segments.insert(0, Segment(first.r_lo, r_ext, -1))
            allowed.insert(0, ext_allowed)
    if profile.end_bc is BCKind.APS:
        last = segments[-1]
        r_ext = 2.0 * max(last.r_hi, 1.0)
        if last.orientation > 0:
            segments[-1] = Segment(last.r_lo, r_ext, +1)
            allowed[-1] = ext_allowed
        else:
            segments.append(Segment(last.r_lo, r_ext, +1))
            allowed.append(ext_allowed)

    # tips: suppress branches singular at r = 0
    if profile.start_bc is BCKind.REGULAR_TIP:
        allowed[0] = [i for i in allowed[0] if branches[i][0] < 0]
    if profile.end_bc is BCKind.REGULAR_TIP:
        allowed[-1] = [i for i in allowed[-1] if branches[i][0] < 0]

    offsets = np.cumsum([0] + [len(a) for a in allowed])
    n_unknowns = int(offsets[-1])
    if n_unknowns == 0:
        return KernelResult(0, (), False, 0, 0)

    def dsign(seg: Segment) -> np.ndarray:
        return problem.orientation_signs(seg.orientation)

    def trace_columns(seg_idx: int, radius: float) -> np.ndarray:
        """Global-coordinate trace of each allowed branch at the given radius."""
        seg = segments[seg_idx]
        cols = np.zeros((size, len(allowed[seg_idx])))
        for j, b in enumerate(allowed[seg_idx]):
            gamma, w = branches[b]
            cols[:, j] = dsign(seg) * w * radius ** (-gamma)
        return cols

    rows: list[np.ndarray] = []

    def add_rows(block_rows: np.ndarray, seg_idx: int, sign: float = 1.0):
        for r in np.atleast_2d(block_rows):
            full = np.zeros(n_unknowns)
            full[offsets[seg_idx] : offsets[seg_idx + 1]] = sign * r
            rows.append(full)

    # seam continuity of the global variables
    for i in range(len(segments) - 1):
        r_c = segments[i].radius_at_exit()
        left = trace_columns(i, r_c)
        right = trace_columns(i + 1, r_c)
        for comp in range(size):
            full = np.zeros(n_unknowns)
            full[offsets[i] : offsets[i + 1]] = left[comp]
            full[offsets[i + 1] : offsets[i + 2]] = -right[comp]
            rows.append(full)

    # boundary rows at exposed ends (APS already handled by the extension)
    for bc, seg_idx, radius in (
        (profile.start_bc, 0, segments[0].radius_at_entry()),
        (profile.end_bc, len(segments) - 1, segments[-1].radius_at_exit()),
    ):
        if bc in (BCKind.REGULAR_TIP, BCKind.APS):
            continue
        cols = trace_columns(seg_idx, radius)
        if bc is BCKind.DIRICHLET_LIKE:
            for comp in range(size):
                add_rows(cols[comp], seg_idx)
        elif bc is BCKind.ABSOLUTE:
            for comp, slot in enumerate(problem.slots):
                if slot != ALPHA:
                    add_rows(cols[comp], seg_idx)

    if not rows:
        return KernelResult(n_unknowns, (), False, n_unknowns, 0)

    mat = np.vstack(rows)
    norms = np.linalg.norm(mat, axis=0)
    norms[norms == 0] = 1.0
    sv = np.linalg.svd(mat / norms, compute_uv=False)
    sv_max = sv[0] if len(sv) else 0.0
    if sv_max == 0.0:
        rank = 0
        near = False
    else:
        rank = int(np.sum(sv > rank_tol * sv_max))
        near = bool(
            np.any((sv > rank_tol * sv_max) & (sv <= NEAR_SINGULAR_FACTOR * rank_tol * sv_max))
        )
    return KernelResult(
        dim=n_unknowns - rank,
        singular_values=tuple(float(s) for s in sv),
        near_singular=near,
        n_unknowns=n_unknowns,
        n_rows=mat.shape[0],
    )


def analytic_zero_modes(problems: list[ChannelProblem], rank_tol: float = RANK_TOL) -> tuple[int, dict]:
    """Zero-mode count (with sphere multiplicity) of a fixed-degree problem set."""
    total = 0
    detail = {}
    for prob in problems:
        res = first_order_kernel(prob, rank_tol)
        if res.dim:
            total += res.dim * prob.multiplicity
            detail[prob.label] = res.dim
        if res.near_singular:
            detail.setdefault("near_singular", []).append(prob.label)
    return total, detail
