"""Independent Sturm-Liouville oracle for the function (p = 0) spectrum.

Works directly in the original coordinates of the warped product: for each
sphere mode with eigenvalue mu^2 the radial factor satisfies

    -(f^n F')' / f^n + mu^2 F / f^2 = lam F

with natural (Neumann) conditions, discretised with quadratic elements
against the volume weight f^n.  No change of variables, no seam corner
terms, no essential tip conditions: the weight carries all of that, which
makes this an end-to-end check of the channel reduction used elsewhere
(U-map weights, seam conventions, absolute boundary conditions).

Exclusion of high modes is rigorous here: the Rayleigh quotient dominates
mu^2 / r_max^2, so modes with mu^2 > lam_max r_max^2 contribute nothing.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
import scipy.sparse.linalg as splinalg

from ..errors import DomainError
from ..geometry import BCKind, Profile
from ..sphere_modes import CLOSED_FORM, enumerate_sphere_modes

_GX, _GW = np.polynomial.legendre.leggauss(6)
_QX = 0.5 * (_GX + 1.0)
_QW = 0.5 * _GW
_N = np.stack([(1 - _QX) * (1 - 2 * _QX), 4 * _QX * (1 - _QX), _QX * (2 * _QX - 1)], axis=1)
_DN = np.stack([4 * _QX - 3, 4 - 8 * _QX, 4 * _QX - 1], axis=1)


def _mesh(profile: Profile, h: float) -> np.ndarray:
    nodes = [np.array([0.0])]
    t0 = 0.0
    for seg in profile.segments:
        # mild grading toward small radii, independent of the channel mesher
        n_uniform = max(int(math.ceil(seg.length / h)), 2)
        xs = np.linspace(0.0, 1.0, n_uniform + 1)
        if seg.r_lo < 0.2 * seg.r_hi:
            xs = xs**1.7
            if seg.orientation < 0:
                xs = 1.0 - xs[::-1]
        nodes.append(t0 + seg.length * xs[1:])
        t0 += seg.length
    return np.concatenate(nodes)


def _radius(profile: Profile, tq: np.ndarray) -> np.ndarray:
    bps = np.array(profile.breakpoints)
    idx = np.clip(np.searchsorted(bps, tq, side="right") - 1, 0, len(profile.segments) - 1)
    out = np.empty_like(tq)
    for i, seg in enumerate(profile.segments):
        sel = idx == i
        local = tq[sel] - bps[i]
        out[sel] = seg.r_lo + local if seg.orientation > 0 else seg.r_hi - local
    return out


def _mode_eigs(profile: Profile, n: int, mu_sq: float, lam_max: float, h: float) -> np.ndarray:
    nodes = _mesh(profile, h)
    nel = len(nodes) - 1
    npts = 2 * len(nodes) - 1
    he = np.diff(nodes)
    tq = nodes[:-1, None] + he[:, None] * _QX[None, :]
    fq = _radius(profile, tq.ravel()).reshape(nel, 6)
    wq = he[:, None] * _QW[None, :]
    wn = wq * fq**n
    kw = wn / he[:, None] ** 2
    ke = np.einsum("eq,qi,qj->eij", kw, _DN, _DN)
    if mu_sq:
        ke = ke + mu_sq * np.einsum("eq,qi,qj->eij", wn / fq**2, _N, _N)
    me = np.einsum("eq,qi,qj->eij", wn, _N, _N)
    pts = np.stack([2 * np.arange(nel), 2 * np.arange(nel) + 1, 2 * np.arange(nel) + 2], axis=1)
    rows = pts[:, :, None].repeat(3, axis=2).ravel()
    cols = pts[:, None, :].repeat(3, axis=1).ravel()
    K = sparse.coo_matrix((ke.ravel(), (rows, cols)), shape=(npts, npts)).tocsr()
    M = sparse.coo_matrix((me.ravel(), (rows, cols)), shape=(npts, npts)).tocsr()
    if npts <= 400:
        vals = scipy.linalg.eigh(K.toarray(), M.toarray(), eigvals_only=True)
    else:
        k = min(npts - 2, int(profile.length / math.pi * math.sqrt(lam_max)) + 8)
        while True:
            vals = splinalg.eigsh(
                K,
                k=k,
                M=M,
                sigma=-1.0,
                which="LM",
                v0=np.full(npts, 1.0 / math.sqrt(npts)),
                return_eigenvectors=False,
            )
            vals = np.sort(vals)
            if vals[-1] > lam_max or k >= npts - 2:
                break
            k = min(npts - 2, int(k * 1.7) + 5)
    return vals[vals <= lam_max]


def sturm_liouville_oracle(
    profile: Profile,
    n: int,
    lam_max: float,
    h: float = 0.02,
    source=CLOSED_FORM,
) -> np.ndarray:
    """Sorted p = 0 spectrum (with multiplicity) up to lam_max, two-mesh extrapolated.

    Supports natural (absolute) boundaries and closed profiles; a profile
    with Dirichlet-like ends is outside this oracle's scope.
    """
    for bc in (profile.start_bc, profile.end_bc):
        if bc not in (BCKind.REGULAR_TIP, BCKind.ABSOLUTE):
            raise DomainError("oracle supports tips and absolute boundaries only")
    out: list[float] = []
    r_max = profile.r_max
    for mode in enumerate_sphere_modes(n, max(lam_max * r_max * r_max, 1.0), source):
        if mode.q != 0:
            continue
        coarse = _mode_eigs(profile, n, mode.mu_sq, lam_max * 1.3 + 1.0, h)
        fine = _mode_eigs(profile, n, mode.mu_sq, lam_max * 1.3 + 1.0, h / 2.0)
        for i in range(min(len(coarse), len(fine))):
            ext = fine[i] + (fine[i] - coarse[i]) / 15.0
            if ext <= lam_max:
                out.extend([float(ext)] * mode.multiplicity)
    return np.array(sorted(out))
