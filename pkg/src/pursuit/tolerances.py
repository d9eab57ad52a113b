"""Scale-derived tolerances used uniformly across the engine.

Every tolerance is a fixed multiple of the environment diameter so that
instances behave identically under rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    scale: float

    @property
    def geom(self) -> float:
        """Incidence tolerance for geometric predicates."""
        return 1e-9 * self.scale

    @property
    def cut_width(self) -> float:
        """Half-width of the strip removed when cutting a territory."""
        return 1e-9 * self.scale

    @property
    def tag(self) -> float:
        """Proximity tolerance when classifying boundary arcs against paths."""
        return 1e-6 * self.scale

    @property
    def split(self) -> float:
        """Bisection bracket for the split-point search."""
        return 1e-6 * self.scale

    @property
    def lion(self) -> float:
        """Slack on the squared-distance ledger of the lion controller."""
        return 1e-6

    @property
    def capture(self) -> float:
        """Colocation distance treated as capture."""
        return 1e-9 * self.scale

    @property
    def legal(self) -> float:
        """Slack on the unit step length when validating moves."""
        return 1e-6 * self.scale
