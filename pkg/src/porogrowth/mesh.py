"""Uniform 1D mesh of the growing-construct interval [0, L]."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDomainError


@dataclass(frozen=True)
class Mesh1D:
    """Uniform partition of [0, L] into N - 1 elements.

    Coordinates are in cm. The outward normal is -1 at x = 0 (scaffold
    wall) and +1 at x = L (interstitial-fluid interface).
    """

    length: float
    node_count: int
    nodes: np.ndarray = field(repr=False)

    @property
    def h(self):
        return self.length / (self.node_count - 1)

    @property
    def n_elements(self):
        return self.node_count - 1

    @property
    def midpoints(self):
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def lumped_masses(self):
        """Control-volume sizes: h at interior nodes, h/2 at the ends."""
        m = np.full(self.node_count, self.h)
        m[0] = m[-1] = 0.5 * self.h
        return m

    def mid_node(self):
        """Index of the node nearest x = L/2."""
        return int(np.argmin(np.abs(self.nodes - 0.5 * self.length)))


def build_mesh(length, node_count):
    """Build a uniform mesh with h = L/(N-1).

    Raises InvalidDomainError for L <= 0 or N < 3.
    """
    if length <= 0.0:
        raise InvalidDomainError(f"domain length must be positive, got {length}")
    if node_count < 3:
        raise InvalidDomainError(f"need at least 3 nodes, got {node_count}")
    nodes = np.linspace(0.0, length, node_count)
    nodes.flags.writeable = False
    return Mesh1D(length=float(length), node_count=int(node_count), nodes=nodes)
