"""Tangential operator of the cone over S^n and its radial channels.

On a cone dr^2 + r^2 h the Gauss-Bonnet operator d + d* becomes, after the
unitary change of variables that maps a form to the weighted pair
sigma = (beta, alpha) of its dr-component and tangential component,

    U (d + d*) U* = G (d/dr + A / r),      G = [[0, 1], [-1, 0]],

with A built from the sphere's own Gauss-Bonnet operator and the degree
operator.  Over one coexact q-eigenform eta (eigenvalue mu^2, d eta
normalised by 1/mu) the operator A has two invariant 2x2 blocks:

  family        basis (slot type, total degree)         matrix
  MINUS_HALF    v1 = (0, eta)        alpha, q           [[q - n/2,   -mu      ],
                v4 = (d eta / mu, 0) beta,  q + 2        [-mu,        n/2 - q - 1]]
  PLUS_HALF     v2 = (0, d eta / mu) alpha, q + 1       [[q + 1 - n/2, -mu    ],
                v3 = (eta, 0)        beta,  q + 1        [-mu,        n/2 - q ]]

with eigenvalues -1/2 +/- s and +1/2 +/- s respectively, where
s = sqrt(mu^2 + ((n-1)/2 - q)^2).  The two harmonic sphere modes give 1x1
blocks with eigenvalue q - n/2 (alpha slot, degree q) and n/2 - q (beta
slot, degree q + 1); for constants and the volume form these are -n/2 and
+n/2 in the appropriate degrees.

Every eigenvalue gamma of A obeys |gamma| >= n/2, so 0 is never in the
spectrum and A(A+1) is nonnegative.  The spectral projector on the
negative part of A (one eigenvector per 2x2 block) is what the
Atiyah-Patodi-Singer style boundary condition of the limit problem uses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sphere_modes import (
    CLOSED_FORM,
    MultiplicitySource,
    SphereMode,
    enumerate_sphere_modes,
)

ALPHA = "alpha"  # tangential component; continuous across reflection seams
BETA = "beta"  # dr-component; flips sign across reflection seams


class Family(enum.Enum):
    MINUS_HALF = "minus_half"
    PLUS_HALF = "plus_half"
    EXCEPTIONAL = "exceptional"


@dataclass(frozen=True, eq=False)
class ABlock:
    """One invariant block of A over a sphere mode.

    ``degrees[i]`` and ``slots[i]`` describe the total form degree and the
    component type (ALPHA/BETA) of basis slot i; ``gammas`` lists the
    eigenvalues in descending order with ``eigvecs[:, i]`` the orthonormal
    eigenvector for ``gammas[i]``.
    """

    mode: SphereMode
    family: Family
    degrees: tuple[int, ...]
    slots: tuple[str, ...]
    matrix: np.ndarray
    gammas: tuple[float, ...]
    eigvecs: np.ndarray

    @property
    def size(self) -> int:
        return len(self.degrees)

    @property
    def n(self) -> int:
        return self.mode.n

    @property
    def aa_matrix(self) -> np.ndarray:
        """The block of A^2 + A, whose eigenvalues are gamma (gamma + 1)."""
        return self.matrix @ self.matrix + self.matrix

    @property
    def min_potential(self) -> float:
        return min(g * (g + 1.0) for g in self.gammas)

    @property
    def label(self) -> str:
        k = self.mode.k if not self.mode.harmonic else "H"
        return f"n{self.n}:q{self.mode.q}:k{k}:{self.family.value}"


@dataclass(frozen=True, eq=False)
class GammaChannel:
    """One scalar radial channel: an eigenvector of A seen from degree p."""

    gamma: float
    total_degree: int
    multiplicity: int
    block: ABlock
    eigvec: np.ndarray

    @property
    def nu(self) -> float:
        """Order of the Bessel solutions of the channel, |gamma + 1/2|."""
        return abs(self.gamma + 0.5)


def _symmetric_block(mode: SphereMode, family: Family) -> ABlock:
    n, q = mode.n, mode.q
    mu = math.sqrt(mode.mu_sq)
    s = math.hypot(mu, (n - 1) / 2.0 - q)
    if family is Family.MINUS_HALF:
        a, b = q - n / 2.0, n / 2.0 - q - 1.0
        degrees, mean = (q, q + 2), -0.5
    else:
        a, b = q + 1 - n / 2.0, n / 2.0 - q
        degrees, mean = (q + 1, q + 1), +0.5
    matrix = np.array([[a, -mu], [-mu, b]])
    g_plus, g_minus = mean + s, mean - s
    # eigenvector of [[a,-mu],[-mu,b]] for eigenvalue g is (mu, a - g)
    vecs = np.empty((2, 2))
    for i, g in enumerate((g_plus, g_minus)):
        v = np.array([mu, a - g])
        vecs[:, i] = v / np.linalg.norm(v)
    return ABlock(
        mode=mode,
        family=family,
        degrees=degrees,
        slots=(ALPHA, BETA),
        matrix=matrix,
        gammas=(g_plus, g_minus),
        eigvecs=vecs,
    )


def build_blocks(mode: SphereMode) -> list[ABlock]:
    """The invariant blocks of A generated by one sphere mode."""
    n, q = mode.n, mode.q
    if mode.harmonic:
        return [
            ABlock(
                mode=mode,
                family=Family.EXCEPTIONAL,
                degrees=(q,),
                slots=(ALPHA,),
                matrix=np.array([[q - n / 2.0]]),
                gammas=(q - n / 2.0,),
                eigvecs=np.array([[1.0]]),
            ),
            ABlock(
                mode=mode,
                family=Family.EXCEPTIONAL,
                degrees=(q + 1,),
                slots=(BETA,),
                matrix=np.array([[n / 2.0 - q]]),
                gammas=(n / 2.0 - q,),
                eigvecs=np.array([[1.0]]),
            ),
        ]
    return [
        _symmetric_block(mode, Family.MINUS_HALF),
        _symmetric_block(mode, Family.PLUS_HALF),
    ]


def enumerate_blocks(
    n: int,
    mu_sq_max: float,
    source: MultiplicitySource = CLOSED_FORM,
) -> list[ABlock]:
    """All blocks generated by sphere modes with mu^2 <= mu_sq_max."""
    blocks: list[ABlock] = []
    for mode in enumerate_sphere_modes(n, mu_sq_max, source):
        blocks.extend(build_blocks(mode))
    return blocks


def gamma_channels(
    n: int,
    p: int,
    mu_sq_max: float,
    source: MultiplicitySource = CLOSED_FORM,
) -> list[GammaChannel]:
    """All channels of total degree p from modes with mu^2 <= mu_sq_max.

    A block contributes its full gamma pair whenever one of its basis slots
    carries degree p.  Channels are sorted by (q, level, family, -gamma).
    """
    if not 0 <= p <= n + 1:
        raise DomainError(f"total degree must satisfy 0 <= p <= n+1, got p={p}")
    channels = []
    for block in enumerate_blocks(n, mu_sq_max, source):
        if p not in block.degrees:
            continue
        for i, g in enumerate(block.gammas):
            channels.append(
                GammaChannel(
                    gamma=g,
                    total_degree=p,
                    multiplicity=block.mode.multiplicity,
                    block=block,
                    eigvec=block.eigvecs[:, i].copy(),
                )
            )
    level = lambda m: -1 if m.harmonic else m.k
    channels.sort(key=lambda c: (c.block.mode.q, level(c.block.mode), c.block.family.value, -c.gamma))
    return channels


@dataclass(frozen=True, eq=False)
class ApsProjector:
    """Per-block spectral projectors of A on its negative / positive part."""

    blocks: tuple[ABlock, ...]

    def negative_matrix(self, block: ABlock) -> np.ndarray:
        return self._part(block, lambda g: g < 0)

    def positive_matrix(self, block: ABlock) -> np.ndarray:
        return self._part(block, lambda g: g > 0)

    @staticmethod
    def _part(block: ABlock, keep) -> np.ndarray:
        out = np.zeros((block.size, block.size))
        for i, g in enumerate(block.gammas):
            if keep(g):
                v = block.eigvecs[:, i]
                out += np.outer(v, v)
        return out

    def split(self, block: ABlock, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Decompose block-coordinate boundary data into (negative, positive) parts."""
        values = np.asarray(values, dtype=float)
        neg = self.negative_matrix(block) @ values
        return neg, values - neg


def aps_projector(channels: list[GammaChannel]) -> ApsProjector:
    """Projector data for the distinct blocks referenced by ``channels``."""
    seen: dict[int, ABlock] = {}
    for ch in channels:
        if ch.gamma == 0.0:
            raise DomainError("0 in Spec(A): projector undefined")  # cannot happen for |gamma| >= n/2
        seen.setdefault(id(ch.block), ch.block)
    return ApsProjector(blocks=tuple(seen.values()))
