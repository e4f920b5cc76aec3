"""Assembled p-form spectra, collapse sweeps, and the quantitative diagnostics.

assemble_spectrum merges the per-channel eigenvalue lists of a degree into
one spectrum with sphere multiplicities, certifying that every channel that
could contribute below the cutoff was enumerated, and counting zero modes
both analytically (harmonic matching systems) and numerically.

sweep_epsilon runs the collapse experiment: spectra of the connected sum for
a decreasing list of eps against the big summand's spectrum, the one-sided
upper-bound check, the Mayer-Vietoris lower bound for the first positive
eigenvalue (McGowan), constancy of the zero-mode counts, and the boundary
control of the tracked eigenfunctions at the gluing radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    SolverDisagreementError,
    ZeroModeMismatchError,
)
from .geometry import Profile, SeamKind, connected_sum_profile, cover_profiles
from .radial.fem import FemField, MeshSpec, fem_spectrum
from .radial.firstorder import first_order_kernel
from .radial.problems import ChannelProblem, Eigenvalue, EigList, degree_problems, sort_eigenvalues
from .radial.transfer import transfer_spectrum
from .sphere_modes import CLOSED_FORM, MultiplicitySource

ZERO_THRESHOLD_REL = 1e-8
CROSS_RTOL = 1e-6


@dataclass(eq=False)
class SpectrumResult:
    """Assembled spectrum of the degree-p Hodge Laplacian on one profile."""

    profile: Profile
    n: int
    degree: int
    lam_max: float
    entries: list[Eigenvalue]
    zero_count: int
    analytic_zero_count: int
    certificate: dict
    method: str
    fields: dict = field(default_factory=dict)  # (problem label, index) -> FemField
    meta: dict = field(default_factory=dict)

    def positive_values(self) -> np.ndarray:
        """Positive eigenvalues expanded with multiplicity, ascending."""
        out: list[float] = []
        for e in self.entries:
            if e.value > 0.0:
                out.extend([e.value] * e.multiplicity)
        return np.array(sorted(out))

    def all_values(self) -> np.ndarray:
        out: list[float] = []
        for e in self.entries:
            out.extend([e.value] * e.multiplicity)
        return np.array(sorted(out))

    def positive_entry(self, k: int) -> tuple[Eigenvalue, int]:
        """The entry carrying the k-th positive eigenvalue (1-based, with
        multiplicity) and the eigenvalue's index within its channel problem."""
        if k < 1:
            raise DomainError("k is 1-based")
        seen = 0
        for e in sort_eigenvalues([e for e in self.entries if e.value > 0.0]):
            seen += e.multiplicity
            if seen >= k:
                return e, e.index
        raise DomainError(f"fewer than {k} positive eigenvalues below lam_max={self.lam_max}")


def assemble_spectrum(
    profile: Profile,
    n: int,
    p: int,
    lam_max: float,
    method: str = "fem",
    mesh: MeshSpec | None = None,
    source: MultiplicitySource = CLOSED_FORM,
    cross_rtol: float = CROSS_RTOL,
    zero_threshold_rel: float = ZERO_THRESHOLD_REL,
    want_fields: bool = False,
    cap_factor: float = 1.0,
) -> SpectrumResult:
    """Full degree-p spectrum below lam_max; method in {fem, secular, both}.

    With method="both" the secular and extrapolated FEM eigenvalues must
    agree in count and to ``cross_rtol`` relative on every channel, except
    where the secular scan itself flagged a suspected root cluster, which is
    adjudicated in FEM's favour.  Zero modes are counted analytically from
    the harmonic matching systems and cross-checked against the number of
    numerically tiny eigenvalues; a mismatch is a hard error.
    """
    if method not in ("fem", "secular", "both"):
        raise DomainError(f"unknown method {method!r}")
    mesh = mesh or MeshSpec()
    problems, certificate = degree_problems(profile, n, p, lam_max, source, cap_factor)
    zero_floor = zero_threshold_rel * lam_max

    entries: list[Eigenvalue] = []
    fields: dict = {}
    numeric_zeros = 0
    analytic_zeros = 0
    notes: list[str] = []
    for prob in problems:
        kernel = first_order_kernel(prob)
        analytic_zeros += kernel.dim * prob.multiplicity
        fem_list = None
        sec_list = None
        if method in ("fem", "both"):
            fem_list = fem_spectrum(prob, mesh, lam_max, want_vectors=want_fields)
        if method in ("secular", "both"):
            sec_list = transfer_spectrum(prob, lam_max)
        if method == "both":
            _cross_validate(prob, fem_list, sec_list, cross_rtol, zero_floor, notes)
        use = fem_list if fem_list is not None else sec_list
        pos_entries = [e for e in use.entries if e.value > zero_floor]
        tiny = [e for e in use.entries if e.value <= zero_floor]
        if fem_list is not None:
            numeric_zeros += len(tiny) * prob.multiplicity
            if len(tiny) != kernel.dim:
                raise ZeroModeMismatchError(
                    f"{prob.label}: {len(tiny)} numerically tiny eigenvalues vs "
                    f"analytic kernel dimension {kernel.dim}"
                )
        else:
            numeric_zeros += kernel.dim * prob.multiplicity
        entries.extend(pos_entries)
        entries.extend(
            Eigenvalue(value=0.0, problem=prob, index=i, method="exact") for i in range(kernel.dim)
        )
        if want_fields and fem_list is not None and fem_list.meta.get("fields"):
            for e, fld in zip(fem_list.entries, fem_list.meta["fields"]):
                fields[(prob.label, e.index)] = fld
    if numeric_zeros != analytic_zeros:
        raise ZeroModeMismatchError(
            f"degree {p}: numeric zero modes {numeric_zeros} != analytic {analytic_zeros}"
        )
    return SpectrumResult(
        profile=profile,
        n=n,
        degree=p,
        lam_max=lam_max,
        entries=sort_eigenvalues(entries),
        zero_count=numeric_zeros,
        analytic_zero_count=analytic_zeros,
        certificate=certificate,
        method=method,
        fields=fields,
        meta={"notes": notes, "problems": len(problems)},
    )


def _cross_validate(prob, fem_list: EigList, sec_list: EigList, rtol, zero_floor, notes):
    from .radial.transfer import confirm_even_root, locate_roots_in_window

    fem_pos = [e.value for e in fem_list.entries if e.value > zero_floor]
    sec_pos = sorted(e.value for e in sec_list.entries if e.value > zero_floor)
    if len(fem_pos) != len(sec_pos):
        # sign scanning misses even-order roots; re-bracket around the FEM
        # values, then fall back to confirming an exactly even root
        missing = _unmatched(fem_pos, sec_pos, rtol=1e-4)
        for cluster in _cluster(missing, rel_gap=1e-3):
            lo = cluster[0] * (1.0 - 5e-3)
            hi = cluster[-1] * (1.0 + 5e-3)
            roots = [r for r in locate_roots_in_window(prob, lo, hi, len(cluster)) if not _near(r, sec_pos, 1e-7)]
            if len(roots) >= len(cluster):
                sec_pos.extend(sorted(roots)[: len(cluster)])
                notes.append(f"{prob.label}: {len(cluster)} roots re-bracketed near {cluster[0]:.6g}")
            elif len(cluster) == 2:
                root = confirm_even_root(prob, lo, hi)
                if root is None:
                    raise SolverDisagreementError(
                        f"{prob.label}: FEM pair near {cluster[0]} has no secular counterpart"
                    )
                sec_pos.extend([root, root])
                notes.append(f"{prob.label}: double root confirmed at {root:.9g}")
            else:
                raise SolverDisagreementError(
                    f"{prob.label}: cannot account for FEM cluster {cluster} in the secular scan"
                )
        sec_pos.sort()
    if len(fem_pos) != len(sec_pos):
        raise SolverDisagreementError(
            f"{prob.label}: secular found {len(sec_pos)} eigenvalues, FEM {len(fem_pos)}"
        )
    for i, (a, b) in enumerate(zip(fem_pos, sec_pos)):
        if abs(a - b) > rtol * max(abs(a), abs(b), 1e-3):
            raise SolverDisagreementError(
                f"{prob.label}: eigenvalue {i} disagrees: fem {a} vs secular {b}"
            )


def _unmatched(fem_vals, sec_vals, rtol):
    pool = list(sec_vals)
    out = []
    for v in fem_vals:
        hit = next((i for i, w in enumerate(pool) if abs(w - v) <= rtol * max(v, w)), None)
        if hit is None:
            out.append(v)
        else:
            pool.pop(hit)
    return out


def _cluster(values, rel_gap):
    groups: list[list[float]] = []
    for v in sorted(values):
        if groups and v - groups[-1][-1] <= rel_gap * max(v, 1e-6):
            groups[-1].append(v)
        else:
            groups.append([v])
    return groups


def _near(value, pool, rtol):
    return any(abs(value - w) <= rtol * max(value, w) for w in pool)


# ---------------------------------------------------------------------------
# exact-form spectra and the McGowan bound


def mcgowan_bound(mu_p_u1: float, mu_p_u2: float, mu_pm1_u12: float, omega: float, c_rho: float) -> float:
    """Lower bound for the first positive eigenvalue on exact p-forms:

        ( (1/mu^p(U1) + 1/mu^p(U2)) (omega c_rho / mu^{p-1}(U12) + 1) )^(-1).
    """
    for name, v in (
        ("mu_p_u1", mu_p_u1),
        ("mu_p_u2", mu_p_u2),
        ("mu_pm1_u12", mu_pm1_u12),
        ("omega", omega),
        ("c_rho", c_rho),
    ):
        if v <= 0:
            raise DomainError(f"{name} must be positive, got {v}")
    return 1.0 / ((1.0 / mu_p_u1 + 1.0 / mu_p_u2) * (omega * c_rho / mu_pm1_u12 + 1.0))


def exact_form_spectrum(
    profile: Profile,
    n: int,
    p: int,
    lam_max: float,
    mesh: MeshSpec | None = None,
    source: MultiplicitySource = CLOSED_FORM,
    match_rtol: float = 1e-4,
) -> np.ndarray:
    """Positive eigenvalues on exact p-forms (with multiplicity) below lam_max.

    Built from the supersymmetry pairing: exact-p eigenvalues are the coexact
    (p-1)-eigenvalues, and the coexact part of a degree is its positive
    spectrum minus the exact part (a tolerance multiset difference).  For
    p = 1 this is simply the positive spectrum on functions.
    """
    if p < 1:
        raise DomainError("exact forms need p >= 1")
    coexact = assemble_spectrum(profile, n, 0, lam_max, "fem", mesh, source).positive_values()
    for q in range(1, p):
        full = assemble_spectrum(profile, n, q, lam_max, "fem", mesh, source).positive_values()
        coexact = _multiset_difference(full, coexact, match_rtol)
    return coexact


def _multiset_difference(full: np.ndarray, remove: np.ndarray, rtol: float) -> np.ndarray:
    out = list(full)
    for v in remove:
        best, best_idx = None, None
        for i, w in enumerate(out):
            d = abs(w - v)
            if d <= rtol * max(v, w, 1e-6) and (best is None or d < best):
                best, best_idx = d, i
        if best_idx is not None:
            out.pop(best_idx)
    return np.array(out)


def first_positive_exact(profile, n, p, mesh=None, source=CLOSED_FORM, lam_start=25.0) -> float:
    """First positive exact-p eigenvalue, enlarging the window as needed."""
    lam_max = lam_start * max(1.0, 1.0 / profile.r_max**2)
    for _ in range(5):
        vals = (
            exact_form_spectrum(profile, n, p, lam_max, mesh, source)
            if p >= 1
            else assemble_spectrum(profile, n, 0, lam_max, "fem", mesh, source).positive_values()
        )
        if len(vals):
            return float(vals[0])
        lam_max *= 4.0
    raise DomainError(f"no exact {p}-form eigenvalue found below {lam_max}")


def partition_gradient_constant(eps: float) -> float:
    """c_rho for the log-linear partition of unity on the annulus [eps, 2 eps]:
    rho = log(r/eps)/log 2, so sup |d rho| = 1/(eps log 2)."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    return 1.0 / (eps * math.log(2.0)) ** 2


@dataclass
class McGowanReport:
    eps: float
    degree: int
    mu_p_u1: float
    mu_p_u2: float
    mu_pm1_u12: float
    omega: float
    c_rho: float
    bound: float


def mcgowan_report(
    m_eps: Profile,
    n: int,
    p: int,
    eps: float,
    mesh: MeshSpec | None = None,
    source: MultiplicitySource = CLOSED_FORM,
    omega: float = 1.0,
    c_rho: float | None = None,
    _unit_cache: dict | None = None,
) -> McGowanReport:
    """Evaluate the Mayer-Vietoris bound on the standard cover of m_eps.

    mu^p(U) is the first positive eigenvalue on exact p-forms of the cover
    element with absolute boundary conditions; for p = 1 the U12 input is the
    first positive Neumann eigenvalue on functions.  U2 and U12 are exact
    eps-scalings of unit-size profiles, so they are solved once at unit scale
    and rescaled by 1/eps^2 (cached across the sweep via ``_unit_cache``).
    """
    if not 1 <= p <= n:
        raise DomainError(f"McGowan bound applies for 1 <= p <= n, got p={p}")
    mesh = mesh or MeshSpec()
    u1, u2, u12 = cover_profiles(m_eps, eps)
    mu1 = first_positive_exact(u1, n, p, mesh, source)
    cache = _unit_cache if _unit_cache is not None else {}
    key_u2, key_u12 = ("u2", p), ("u12", p - 1)
    if key_u2 not in cache:
        unit_u2 = u2.scaled(1.0 / eps)
        cache[key_u2] = first_positive_exact(unit_u2, n, p, mesh, source)
    if key_u12 not in cache:
        unit_u12 = u12.scaled(1.0 / eps)
        cache[key_u12] = (
            first_positive_exact(unit_u12, n, p - 1, mesh, source)
            if p - 1 >= 1
            else assemble_spectrum(unit_u12, n, 0, 25.0, "fem", mesh, source).positive_values()[0]
        )
    mu2 = cache[key_u2] / eps**2
    mu12 = cache[key_u12] / eps**2
    c_rho_val = partition_gradient_constant(eps) if c_rho is None else c_rho
    return McGowanReport(
        eps=eps,
        degree=p,
        mu_p_u1=mu1,
        mu_p_u2=mu2,
        mu_pm1_u12=mu12,
        omega=omega,
        c_rho=c_rho_val,
        bound=mcgowan_bound(mu1, mu2, mu12, omega, c_rho_val),
    )


# ---------------------------------------------------------------------------
# cut-off functions and boundary diagnostics


def xi_eps(r: np.ndarray, eps: float) -> np.ndarray:
    """Logarithmic cut-off: 0 below 2 eps, 1 above 2 sqrt(eps)."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        mid = (np.log(2 * eps) - np.log(r)) / np.log(math.sqrt(eps))
    return np.clip(np.where(r <= 2 * eps, 0.0, np.where(r >= 2 * math.sqrt(eps), 1.0, mid)), 0.0, 1.0)


def xi_eps_gradient(r: np.ndarray, eps: float) -> np.ndarray:
    """|d xi_eps| = 2 / (r |log eps|) on the transition annulus, else 0."""
    r = np.asarray(r, dtype=float)
    inside = (r > 2 * eps) & (r < 2 * math.sqrt(eps))
    return np.where(inside, 2.0 / (r * abs(math.log(eps))), 0.0)


def xi_one(r: np.ndarray) -> np.ndarray:
    """Smooth cut-off around the gluing point: 1 for r <= 1/2, 0 for r >= 1."""
    r = np.asarray(r, dtype=float)
    s = np.clip((r - 0.5) * 2.0, 0.0, 1.0)
    return 1.0 - (3.0 * s * s - 2.0 * s**3)


@dataclass
class BoundaryDiagnostics:
    """Boundary-control quantities of one tracked eigenfunction at radius eps."""

    eps: float
    lam: float
    neg_trace_sq: float  # |Pi_<0 sigma(eps)|^2
    ratio: float  # neg_trace_sq / eps
    phi_minus_tail_sq: float  # |(1 - xi_eps) xi_1 phi^-|^2
    cutoff_energy: float  # | |d xi_eps| xi_1 phi^- |^2
    cutoff_energy_bound: float  # 4 (lam + 1) / (n |log eps|)
    psi_overlap: float  # <xi_1 phi^+ - psi_1, psi_1>


def boundary_diagnostics(field: FemField, eps: float, n: int, lam: float) -> BoundaryDiagnostics:
    """Evaluate the collapse diagnostics for one normalized eigenfunction.

    The field must come from a connected-sum profile; the trace is taken at
    the gluing seam in the block coordinates of the big summand's cone, and
    the integrals run over that cone.
    """
    prob = field.problem
    profile = prob.profile
    if profile.glue_radius is None:
        raise DomainError("diagnostics need a connected-sum profile")
    seam = next(s for s in profile.seams if s.kind is SeamKind.RADIAL_MIN and abs(s.radius - eps) < 1e-12)
    t_glue = seam.position
    seg_idx = profile.breakpoints.index(t_glue)  # segment starting at the seam (m1 side)
    seg = profile.segments[seg_idx]
    d = prob.orientation_signs(seg.orientation)

    # block eigen-coordinates of the trace on the m1 side
    trace = field.values_at(np.array([t_glue]))[0]
    sigma_loc = _embed(prob, d * trace)
    w = prob.block.eigvecs.T @ sigma_loc
    neg = sum(w[i] ** 2 for i, g in enumerate(prob.block.gammas) if g < 0)
    pos_amp = {g: w[i] for i, g in enumerate(prob.block.gammas) if g > 0}

    # quadrature restricted to the m1 cone [eps, r_hi]
    tq, wq, vals = field.quadrature()
    t_top = profile.breakpoints[seg_idx + 1]
    mask = (tq >= t_glue) & (tq <= t_top)
    tq, wq, vals = tq[mask], wq[mask], vals[mask]
    rq = seg.r_lo + (tq - t_glue)
    sig = np.array([_embed(prob, d * v) for v in vals])
    comp = sig @ prob.block.eigvecs  # columns aligned with gammas
    phi_minus_sq = np.zeros(len(tq))
    phi_plus = np.zeros(len(tq))
    psi = np.zeros(len(tq))
    for i, g in enumerate(prob.block.gammas):
        if g < 0:
            phi_minus_sq += comp[:, i] ** 2
        else:
            phi_plus += comp[:, i]
            psi += eps**g * rq ** (-g) * pos_amp[g]
    x1 = xi_one(rq)
    xe = xi_eps(rq, eps)
    dxe = xi_eps_gradient(rq, eps)
    tail = float(np.sum(wq * ((1 - xe) * x1) ** 2 * phi_minus_sq))
    energy = float(np.sum(wq * (dxe * x1) ** 2 * phi_minus_sq))
    overlap = float(np.sum(wq * (x1 * phi_plus - x1 * psi) * x1 * psi))
    return BoundaryDiagnostics(
        eps=eps,
        lam=lam,
        neg_trace_sq=float(neg),
        ratio=float(neg / eps),
        phi_minus_tail_sq=tail,
        cutoff_energy=energy,
        cutoff_energy_bound=4.0 * (lam + 1.0) / (n * abs(math.log(eps))),
        psi_overlap=overlap,
    )


def _embed(prob: ChannelProblem, local_values: np.ndarray) -> np.ndarray:
    """Active-slot values into full block coordinates."""
    out = np.zeros(prob.block.size)
    for j, slot in enumerate(prob.slot_indices):
        out[slot] = local_values[j]
    return out


# ---------------------------------------------------------------------------
# the collapse sweep


@dataclass
class SweepRow:
    eps: float
    degree: int
    k: int
    lam_eps: float
    lam_m1: float
    abs_err: float
    rel_err: float
    bord_ratio: float
    mcgowan: float
    zero_count: int


@dataclass
class SweepReport:
    rows: list[SweepRow]
    diagnostics: dict
    mcgowan: dict
    zero_counts: dict
    checks: dict
    meta: dict


def _sweep_one_eps(args: tuple) -> tuple:
    (m1, m2, n, degrees, mcg_ps, eps, lam_max, mesh, method, source, omega, c_rho, cache) = args
    m_eps = connected_sum_profile(m1, m2, eps)
    mcg = {
        p: mcgowan_report(m_eps, n, p, eps, mesh, source, omega, c_rho, cache) for p in mcg_ps
    }
    spectra = {
        p: assemble_spectrum(m_eps, n, p, lam_max, method, mesh, source, want_fields=True)
        for p in degrees
    }
    return eps, spectra, mcg


def sweep_epsilon(
    m1: Profile,
    m2: Profile,
    n: int,
    degrees: list[int],
    epsilons: list[float],
    lam_max: float,
    k_track: int,
    mesh: MeshSpec | None = None,
    method: str = "fem",
    source: MultiplicitySource = CLOSED_FORM,
    omega: float = 1.0,
    c_rho: float | None = None,
    taka_margin: float = 1.05,
    final_rel_tol: float = 0.02,
    mcgowan_degrees: tuple[int, ...] | None = None,
    jobs: int = 1,
) -> SweepReport:
    """Collapse experiment: spectra of M_eps against M1 over a decreasing eps list.

    With jobs > 1 the per-epsilon work runs in a process pool; every task is a
    pure function, so the aggregated report is identical for any job count.
    """
    if sorted(epsilons, reverse=True) != list(epsilons):
        raise DomainError("epsilons must be strictly decreasing")
    mesh = mesh or MeshSpec()
    rows: list[SweepRow] = []
    diagnostics: dict = {}
    mcg: dict = {}
    zero_counts: dict = {}

    ref = {
        p: assemble_spectrum(m1, n, p, lam_max, method, mesh, source) for p in degrees
    }
    mcg_ps = mcgowan_degrees if mcgowan_degrees is not None else tuple(range(1, n + 1))

    # unit-scale cover pieces are eps-independent: fill the cache once
    unit_cache: dict = {}
    for p in mcg_ps:
        mcgowan_report(
            connected_sum_profile(m1, m2, epsilons[0]), n, p, epsilons[0],
            mesh, source, omega, c_rho, unit_cache,
        )
    tasks = [
        (m1, m2, n, degrees, mcg_ps, eps, lam_max, mesh, method, source, omega, c_rho, unit_cache)
        for eps in epsilons
    ]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = {r[0]: r for r in pool.map(_sweep_one_eps, tasks)}
    else:
        results = {r[0]: r for r in map(_sweep_one_eps, tasks)}

    for eps in epsilons:
        _, spectra, mcg_eps = results[eps]
        for p, rep in mcg_eps.items():
            mcg[(eps, p)] = rep
        for p in degrees:
            res = spectra[p]
            zero_counts[(eps, p)] = res.zero_count
            ref_pos = ref[p].positive_values()
            diag_list = []
            mcg_val = mcg[(eps, p)].bound if (eps, p) in mcg else float("nan")
            for k in range(1, k_track + 1):
                entry, idx = res.positive_entry(k)
                lam_e = entry.value
                lam_1 = float(ref_pos[k - 1])
                fld = res.fields.get((entry.problem.label, idx))
                d = boundary_diagnostics(fld, eps, n, lam_e) if fld is not None else None
                diag_list.append(d)
                rows.append(
                    SweepRow(
                        eps=eps,
                        degree=p,
                        k=k,
                        lam_eps=lam_e,
                        lam_m1=lam_1,
                        abs_err=abs(lam_e - lam_1),
                        rel_err=abs(lam_e - lam_1) / lam_1,
                        bord_ratio=d.ratio if d else float("nan"),
                        mcgowan=mcg_val,
                        zero_count=res.zero_count,
                    )
                )
            diagnostics[(eps, p)] = diag_list

    checks = _sweep_checks(rows, mcg, zero_counts, ref, epsilons, degrees, taka_margin, final_rel_tol, n)
    return SweepReport(
        rows=rows,
        diagnostics=diagnostics,
        mcgowan=mcg,
        zero_counts=zero_counts,
        checks=checks,
        meta={"lam_max": lam_max, "k_track": k_track, "method": method},
    )


def _sweep_checks(rows, mcg, zero_counts, ref, epsilons, degrees, taka_margin, final_rel_tol, n):
    by_pk: dict = {}
    for r in rows:
        by_pk.setdefault((r.degree, r.k), []).append(r)
    errors_decreasing = all(
        all(a.abs_err > b.abs_err for a, b in zip(seq, seq[1:]))
        for seq in by_pk.values()
    )
    final_ok = all(seq[-1].rel_err < final_rel_tol for seq in by_pk.values())
    taka_ok = all(seq[-1].lam_eps <= taka_margin * seq[-1].lam_m1 for seq in by_pk.values())
    zero_constant = all(
        len({zero_counts[(e, p)] for e in epsilons}) == 1 for p in degrees
    )
    min_positive = min(r.lam_eps for r in rows if r.k == 1) if rows else float("nan")
    mcg_ok = all(
        rep.bound <= min(r.lam_eps for r in rows if r.eps == eps_p[0] and r.k == 1)
        for eps_p, rep in mcg.items()
        if any(r.eps == eps_p[0] and r.k == 1 for r in rows)
    )
    bord = [r.bord_ratio for r in rows if r.k == 1 and not math.isnan(r.bord_ratio)]
    return {
        "errors_decreasing": errors_decreasing,
        "final_rel_err_ok": final_ok,
        "taka_ok": taka_ok,
        "zero_counts_constant": zero_constant,
        "mcgowan_below_min": mcg_ok,
        "min_positive": min_positive,
        "bord_ratio_max": max(bord) if bord else float("nan"),
    }
