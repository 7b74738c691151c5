"""Orbital doublet data model."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DomainError


class Branch(str, Enum):
    GROUND = "ground"
    EXCITED = "excited"


@dataclass(frozen=True)
class OrbitalDoublet:
    """Two orbital states ``|e+>``, ``|e->`` split by ``splitting`` GHz.

    The levels sit at ``+-splitting/2`` around the doublet centre.
    """

    splitting: float
    branch: Branch = Branch.GROUND

    def __post_init__(self):
        if not self.splitting > 0:
            raise DomainError(f"doublet splitting must be > 0 GHz, got {self.splitting}")
        object.__setattr__(self, "branch", Branch(self.branch))

    @property
    def levels(self) -> tuple[float, float]:
        return (-0.5 * self.splitting, 0.5 * self.splitting)


#: zero-strain spin-orbit splittings (GHz) used as defaults
GROUND_SPLITTING_GHZ = 50.0
EXCITED_SPLITTING_GHZ = 260.0


def ground_doublet(splitting: float = GROUND_SPLITTING_GHZ) -> OrbitalDoublet:
    return OrbitalDoublet(splitting, Branch.GROUND)


def excited_doublet(splitting: float = EXCITED_SPLITTING_GHZ) -> OrbitalDoublet:
    return OrbitalDoublet(splitting, Branch.EXCITED)
