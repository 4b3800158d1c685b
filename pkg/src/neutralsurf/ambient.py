"""Ambient 4-dimensional neutral space forms and their flat embeddings.

The three kinds are the flat neutral 4-space (signature (2,2), curvature 0),
the pseudo-sphere of curvature c > 0 sitting in a flat 5-space of signature
(2,3), and the pseudo-hyperbolic space of curvature c < 0 sitting in a flat
5-space of signature (3,2).  Non-flat kinds carry the membership constraint
<x,x> = 1/c on position vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputMismatchError
from .pseudo_linalg import Signature

FLAT = "flat"
PSEUDO_SPHERE = "pseudo_sphere"
PSEUDO_HYPERBOLIC = "pseudo_hyperbolic"


@dataclass(frozen=True)
class AmbientSpace:
    kind: str
    signature: Signature
    curvature: float

    def __post_init__(self):
        sig = (self.signature.negative_count, self.signature.total_dim)
        if self.kind == FLAT:
            ok = sig == (2, 4) and self.curvature == 0.0
        elif self.kind == PSEUDO_SPHERE:
            ok = sig == (2, 5) and self.curvature > 0.0
        elif self.kind == PSEUDO_HYPERBOLIC:
            ok = sig == (3, 5) and self.curvature < 0.0
        else:
            raise InputMismatchError(f"unknown ambient kind {self.kind!r}")
        if not ok:
            raise InputMismatchError(
                f"invalid ambient: kind={self.kind}, signature={self.signature}, "
                f"c={self.curvature}"
            )

    @staticmethod
    def flat() -> "AmbientSpace":
        return AmbientSpace(FLAT, Signature(2, 4), 0.0)

    @staticmethod
    def pseudo_sphere(c: float) -> "AmbientSpace":
        return AmbientSpace(PSEUDO_SPHERE, Signature(2, 5), float(c))

    @staticmethod
    def pseudo_hyperbolic(c: float) -> "AmbientSpace":
        return AmbientSpace(PSEUDO_HYPERBOLIC, Signature(3, 5), float(c))

    @property
    def embedding_dim(self) -> int:
        return self.signature.total_dim

    @property
    def is_flat(self) -> bool:
        return self.kind == FLAT

    @property
    def membership_target(self) -> float:
        """Required <x,x> for position vectors (non-flat kinds only)."""
        if self.is_flat:
            raise InputMismatchError("flat ambient has no membership constraint")
        return 1.0 / self.curvature

    def describe(self) -> str:
        neg = self.signature.negative_count
        pos = self.signature.total_dim - neg
        if self.is_flat:
            return f"flat neutral 4-space E({neg},{pos})"
        label = "pseudo-sphere" if self.kind == PSEUDO_SPHERE else "pseudo-hyperbolic space"
        return (
            f"{label} of curvature {self.curvature:g} in flat ({neg},{pos}) 5-space"
        )


@dataclass(frozen=True)
class DomainRect:
    """Closed parameter rectangle [s0,s1] x [t0,t1]."""

    s0: float
    s1: float
    t0: float
    t1: float

    def __post_init__(self):
        if not (self.s0 < self.s1 and self.t0 < self.t1):
            raise InputMismatchError(
                f"empty domain [{self.s0},{self.s1}]x[{self.t0},{self.t1}]"
            )

    def grid(self, nx: int, ny: int):
        """Uniform (nx, ny) node coordinates, s-major order."""
        import numpy as np

        return np.linspace(self.s0, self.s1, nx), np.linspace(self.t0, self.t1, ny)

    def sample(self, rng, n: int):
        """n uniform random points as (s, t) pairs."""
        s = rng.uniform(self.s0, self.s1, size=n)
        t = rng.uniform(self.t0, self.t1, size=n)
        return list(zip(s.tolist(), t.tolist()))

    def as_tuple(self):
        return (self.s0, self.s1, self.t0, self.t1)
