"""Finite graphs and the hopping operator T."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

from ..errors import GraphError

Edge = Tuple[int, int, complex]

CHAIN = "chain"
TORUS = "torus"
EDGES = "edges"


@dataclass(frozen=True)
class GraphSpec:
    """Site set Λ = {0, ..., n_sites-1} with weighted directed edges.

    An undirected bond is given once; its reverse is filled in by hermitian
    conjugation. If both directions are listed they must be conjugates.
    """

    n_sites: int
    edges: Tuple[Edge, ...] = ()
    kind: str = EDGES
    shape: Optional[Tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise GraphError(f"n_sites must be positive, got {self.n_sites}")
        seen = {}
        for x, y, weight in self.edges:
            if x == y:
                raise GraphError(f"Self-loop at site {x}: diagonal belongs to V")
            for site in (x, y):
                if not 0 <= site < self.n_sites:
                    raise GraphError(
                        f"Site {site} out of range 0..{self.n_sites - 1}"
                    )
            if (x, y) in seen:
                raise GraphError(f"Duplicate edge ({x}, {y})")
            reverse = seen.get((y, x))
            if reverse is not None and not np.isclose(
                reverse, np.conj(weight), rtol=0.0, atol=1e-14
            ):
                raise GraphError(
                    f"Edge weights ({x},{y})={weight} and ({y},{x})={reverse} "
                    "are not complex conjugates"
                )
            seen[(x, y)] = complex(weight)

    @property
    def is_complex(self) -> bool:
        return any(complex(w).imag != 0.0 for _, _, w in self.edges)

    @classmethod
    def chain(
        cls, n_sites: int, hopping: float = 1.0, periodic: bool = False
    ) -> "GraphSpec":
        """1D chain with nearest-neighbour hopping; periodic needs n_sites >= 3."""
        if periodic and n_sites < 3:
            raise GraphError("A periodic chain needs at least 3 sites")
        edges = [(x, x + 1, hopping) for x in range(n_sites - 1)]
        if periodic:
            edges.append((n_sites - 1, 0, hopping))
        return cls(n_sites, tuple(edges), CHAIN, (n_sites,))

    @classmethod
    def torus(cls, lx: int, ly: int, hopping: float = 1.0) -> "GraphSpec":
        """2D torus lx × ly, site index x + lx·y; both sides need length >= 3."""
        if lx < 3 or ly < 3:
            raise GraphError(f"Torus sides must be >= 3, got {lx}x{ly}")
        edges = []
        for y in range(ly):
            for x in range(lx):
                site = x + lx * y
                edges.append((site, (x + 1) % lx + lx * y, hopping))
                edges.append((site, x + lx * ((y + 1) % ly), hopping))
        return cls(lx * ly, tuple(edges), TORUS, (lx, ly))

    @classmethod
    def from_edges(cls, n_sites: int, edges: Iterable[Edge]) -> "GraphSpec":
        return cls(n_sites, tuple((int(x), int(y), w) for x, y, w in edges), EDGES)


def build_hopping(graph: GraphSpec) -> np.ndarray:
    """Return T with zero diagonal and T(x,y) = weight, T(y,x) = conj(weight)."""
    dtype = np.complex128 if graph.is_complex else np.float64
    hopping = np.zeros((graph.n_sites, graph.n_sites), dtype=dtype)
    for x, y, weight in graph.edges:
        if dtype is np.float64:
            weight = complex(weight).real
        hopping[x, y] = weight
        hopping[y, x] = np.conj(weight)
    hopping.setflags(write=False)
    return hopping
