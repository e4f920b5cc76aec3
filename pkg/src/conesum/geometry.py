"""Piecewise-conical radial profiles and the collapsing connected-sum models.

A model manifold here is a warped product over S^n whose radius function f
is piecewise linear with |f'| = 1, described segment by segment in a global
arclength coordinate t.  Each segment carries its own cone coordinate
r = f(t); the metric on the segment is exactly dr^2 + r^2 h.  Adjacent
segments meet at equal radius; where the orientation flips the profile has
a seam (a radial maximum or minimum), and endpoints are either tips (r -> 0,
smooth points for the round unit link) or exposed boundaries carrying a
boundary condition.

The collapsing family is

    M_eps = (M1 minus the eps-ball at the gluing tip)  glued to  eps . M2(1)

where M2(1) has a boundary sphere of radius 1.  The default desk-scale
models are the spindle (double cone) for M1 and a truncated spindle for M2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import cached_property

from .errors import DomainError

_TOL = 1e-12


class BCKind(enum.Enum):
    REGULAR_TIP = "regular_tip"
    ABSOLUTE = "absolute"
    APS = "aps"
    DIRICHLET_LIKE = "dirichlet_like"


class SeamKind(enum.Enum):
    RADIAL_MAX = "radial_max"
    RADIAL_MIN = "radial_min"


@dataclass(frozen=True)
class Segment:
    """One conical piece; orientation +1 means the radius grows with t."""

    r_lo: float
    r_hi: float
    orientation: int

    def __post_init__(self):
        if not (0.0 <= self.r_lo < self.r_hi):
            raise DomainError(f"need 0 <= r_lo < r_hi, got [{self.r_lo}, {self.r_hi}]")
        if self.orientation not in (+1, -1):
            raise DomainError(f"orientation must be +1 or -1, got {self.orientation}")

    @property
    def length(self) -> float:
        return self.r_hi - self.r_lo

    def radius_at_entry(self) -> float:
        return self.r_lo if self.orientation > 0 else self.r_hi

    def radius_at_exit(self) -> float:
        return self.r_hi if self.orientation > 0 else self.r_lo


@dataclass(frozen=True)
class Seam:
    position: float  # global t
    radius: float
    kind: SeamKind

    @property
    def sign(self) -> int:
        """+1 at a radial maximum, -1 at a radial minimum."""
        return +1 if self.kind is SeamKind.RADIAL_MAX else -1


@dataclass(frozen=True)
class Profile:
    """A chain of conical segments with endpoint conditions.

    ``glue_radius`` marks the connected-sum seam when the profile was built
    by :func:`connected_sum_profile`.
    """

    segments: tuple[Segment, ...]
    start_bc: BCKind
    end_bc: BCKind
    glue_radius: float | None = None

    def __post_init__(self):
        if not self.segments:
            raise DomainError("profile needs at least one segment")
        for prev, cur in zip(self.segments, self.segments[1:]):
            if abs(prev.radius_at_exit() - cur.radius_at_entry()) > _TOL * max(1.0, prev.r_hi):
                raise DomainError("adjacent segments must meet at equal radius")
        for bc, radius in ((self.start_bc, self.start_radius), (self.end_bc, self.end_radius)):
            if (bc is BCKind.REGULAR_TIP) != (radius == 0.0):
                raise DomainError("REGULAR_TIP exactly at radius-0 endpoints")

    @property
    def start_radius(self) -> float:
        return self.segments[0].radius_at_entry()

    @property
    def end_radius(self) -> float:
        return self.segments[-1].radius_at_exit()

    @cached_property
    def breakpoints(self) -> tuple[float, ...]:
        ts = [0.0]
        for seg in self.segments:
            ts.append(ts[-1] + seg.length)
        return tuple(ts)

    @property
    def length(self) -> float:
        return self.breakpoints[-1]

    @cached_property
    def seams(self) -> tuple[Seam, ...]:
        """Orientation-flip seams only; same-orientation breakpoints are smooth."""
        out = []
        for i in range(len(self.segments) - 1):
            left, right = self.segments[i], self.segments[i + 1]
            if left.orientation == right.orientation:
                continue
            kind = SeamKind.RADIAL_MAX if left.orientation > 0 else SeamKind.RADIAL_MIN
            out.append(Seam(position=self.breakpoints[i + 1], radius=left.radius_at_exit(), kind=kind))
        return tuple(out)

    @property
    def r_max(self) -> float:
        return max(seg.r_hi for seg in self.segments)

    @property
    def r_min_interior(self) -> float:
        """Smallest radius away from tips (seam or boundary radii)."""
        radii = [s.radius for s in self.seams]
        if self.start_bc is not BCKind.REGULAR_TIP:
            radii.append(self.start_radius)
        if self.end_bc is not BCKind.REGULAR_TIP:
            radii.append(self.end_radius)
        return min(radii) if radii else self.r_max

    def radius(self, t: float) -> float:
        ts = self.breakpoints
        if not -_TOL <= t <= ts[-1] + _TOL:
            raise DomainError(f"t={t} outside profile [0, {ts[-1]}]")
        t = min(max(t, 0.0), ts[-1])
        for i, seg in enumerate(self.segments):
            if t <= ts[i + 1] + _TOL:
                local = t - ts[i]
                return seg.r_lo + local if seg.orientation > 0 else seg.r_hi - local
        return self.end_radius

    def volume(self, n: int) -> float:
        """Riemannian volume for link S^n: vol(S^n) * integral of f^n dt."""
        shell = sum((s.r_hi ** (n + 1) - s.r_lo ** (n + 1)) / (n + 1) for s in self.segments)
        return sphere_volume(n) * shell

    def scaled(self, c: float) -> "Profile":
        if c <= 0:
            raise DomainError(f"scale factor must be positive, got {c}")
        return Profile(
            segments=tuple(replace(s, r_lo=c * s.r_lo, r_hi=c * s.r_hi) for s in self.segments),
            start_bc=self.start_bc,
            end_bc=self.end_bc,
            glue_radius=None if self.glue_radius is None else c * self.glue_radius,
        )

    def reversed(self) -> "Profile":
        return Profile(
            segments=tuple(
                replace(s, orientation=-s.orientation) for s in reversed(self.segments)
            ),
            start_bc=self.end_bc,
            end_bc=self.start_bc,
            glue_radius=self.glue_radius,
        )

    @property
    def closed(self) -> bool:
        return self.start_bc is BCKind.REGULAR_TIP and self.end_bc is BCKind.REGULAR_TIP


def sphere_volume(n: int) -> float:
    """Volume of the unit round S^n."""
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


# ---------------------------------------------------------------------------
# model constructors


def spindle(radius: float) -> Profile:
    """Double cone over S^n with equator radius R: the simplest closed model."""
    if radius <= 0:
        raise DomainError(f"spindle radius must be positive, got {radius}")
    return Profile(
        segments=(Segment(0.0, radius, +1), Segment(0.0, radius, -1)),
        start_bc=BCKind.REGULAR_TIP,
        end_bc=BCKind.REGULAR_TIP,
    )


def truncated_spindle(radius: float, cut: float = 1.0, bc: BCKind = BCKind.ABSOLUTE) -> Profile:
    """Spindle with the ball of radius ``cut`` removed around one tip.

    The boundary sphere has radius ``cut`` and the collar next to it is an
    exact cone, so after scaling by eps it glues isometrically onto the
    eps-sphere of a conical tip.
    """
    if not 0 < cut < radius:
        raise DomainError(f"need 0 < cut < radius, got cut={cut}, radius={radius}")
    return Profile(
        segments=(Segment(cut, radius, +1), Segment(0.0, radius, -1)),
        start_bc=bc,
        end_bc=BCKind.REGULAR_TIP,
    )


def cone(radius: float, bc: BCKind = BCKind.ABSOLUTE) -> Profile:
    """Single cone over S^n (a flat ball for the round unit link)."""
    if radius <= 0:
        raise DomainError(f"cone radius must be positive, got {radius}")
    return Profile(segments=(Segment(0.0, radius, +1),), start_bc=BCKind.REGULAR_TIP, end_bc=bc)


def annulus(r_lo: float, r_hi: float, bc: BCKind = BCKind.ABSOLUTE) -> Profile:
    """Conical annulus with the same boundary condition at both ends."""
    if not 0 < r_lo < r_hi:
        raise DomainError(f"need 0 < r_lo < r_hi, got [{r_lo}, {r_hi}]")
    return Profile(segments=(Segment(r_lo, r_hi, +1),), start_bc=bc, end_bc=bc)


def build_profile(spec: dict) -> Profile:
    """Profile from a model description as used in run configurations."""
    kind = spec.get("type")
    try:
        if kind == "spindle":
            return spindle(float(spec["radius"]))
        if kind == "truncated_spindle":
            return truncated_spindle(float(spec["radius"]), float(spec.get("cut", 1.0)))
        if kind == "cone":
            return cone(float(spec["radius"]))
        if kind == "annulus":
            return annulus(float(spec["r_lo"]), float(spec["r_hi"]))
    except KeyError as exc:
        raise DomainError(f"model {kind!r} is missing parameter {exc}") from None
    raise DomainError(f"unknown model type {kind!r}")


def connected_sum_profile(m1: Profile, m2: Profile, eps: float) -> Profile:
    """The collapsing connected sum: m1 minus its eps-ball, glued to eps.m2.

    ``m1`` must start with a tip whose cone reaches radius >= eps; ``m2``
    must start with a boundary at radius 1.  All radii of m2 are scaled by
    eps and the glued chain runs from m2's far end through the radial-minimum
    seam at radius eps into m1.
    """
    if m1.start_bc is not BCKind.REGULAR_TIP:
        raise DomainError("m1 must start with a tip (the gluing point)")
    if m2.start_bc is BCKind.REGULAR_TIP or abs(m2.start_radius - 1.0) > _TOL:
        raise DomainError("m2 must start with a boundary at radius 1")
    if not 0 < eps < min(1.0, m1.segments[0].r_hi) / 2.0:
        raise DomainError(f"eps={eps} out of range (0, min(1, R1)/2)")
    part2 = m2.scaled(eps).reversed()  # now runs ... down to radius eps at its end
    first = m1.segments[0]
    part1 = (Segment(eps, first.r_hi, +1),) + m1.segments[1:]
    return Profile(
        segments=part2.segments + part1,
        start_bc=part2.start_bc,
        end_bc=m1.end_bc,
        glue_radius=eps,
    )


def cover_profiles(m_eps: Profile, eps: float) -> tuple[Profile, Profile, Profile]:
    """The Mayer-Vietoris cover (U1, U2, U12) of a connected sum.

    U1 is m1 minus the eps-ball, U2 extends the scaled m2 by the annulus
    [eps, 2 eps] of m1's cone, and U12 is that annulus; every exposed cut
    carries the absolute boundary condition.
    """
    if m_eps.glue_radius is None or abs(m_eps.glue_radius - eps) > _TOL:
        raise DomainError("profile was not built by connected_sum_profile at this eps")
    idx = next(
        i for i, s in enumerate(m_eps.seams) if s.kind is SeamKind.RADIAL_MIN and abs(s.radius - eps) <= _TOL
    )
    n_m2 = idx + 1  # segments belonging to the scaled m2
    m1_first = m_eps.segments[n_m2]
    if m1_first.r_hi < 2 * eps:
        raise DomainError("m1 cone too short for the [eps, 2 eps] annulus")
    u1 = Profile(
        segments=(Segment(eps, m1_first.r_hi, +1),) + m_eps.segments[n_m2 + 1 :],
        start_bc=BCKind.ABSOLUTE,
        end_bc=m_eps.end_bc,
    )
    u2 = Profile(
        segments=m_eps.segments[:n_m2] + (Segment(eps, 2 * eps, +1),),
        start_bc=m_eps.start_bc,
        end_bc=BCKind.ABSOLUTE,
    )
    u12 = annulus(eps, 2 * eps)
    return u1, u2, u12


def split_segment(profile: Profile, seg_index: int, radius: float) -> Profile:
    """Refine a profile by splitting one segment at an interior radius.

    The two pieces keep the original orientation, so the new breakpoint is a
    smooth point (no seam); spectra and kernels are invariant under this.
    """
    seg = profile.segments[seg_index]
    if not seg.r_lo < radius < seg.r_hi:
        raise DomainError(f"radius {radius} not interior to segment {seg_index}")
    lo = Segment(seg.r_lo, radius, seg.orientation)
    hi = Segment(radius, seg.r_hi, seg.orientation)
    pieces = (lo, hi) if seg.orientation > 0 else (hi, lo)
    return Profile(
        segments=profile.segments[:seg_index] + pieces + profile.segments[seg_index + 1 :],
        start_bc=profile.start_bc,
        end_bc=profile.end_bc,
        glue_radius=profile.glue_radius,
    )


def dodziuk_interval(lam: float, eta: float, n: int, p: int) -> tuple[float, float]:
    """Eigenvalue stability interval under metric pinching e^-eta g <= g' <= e^eta g."""
    if lam < 0 or eta < 0:
        raise DomainError("need lam >= 0 and eta >= 0")
    factor = (n + 2 * p) * eta
    return lam * math.exp(-factor), lam * math.exp(factor)
