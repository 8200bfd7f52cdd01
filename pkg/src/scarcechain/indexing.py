"""Flat layout of the equilibrium iterate.

The packed vector is ``X = (Q0, Q1, Q2, D0, D1, L0, L1, L2, MU0, MU1)`` with
every block laid out lexicographically over its (0-based) index tuple:

====  =================  =======================================
name  index tuple        meaning
====  =================  =======================================
q0    (i, n, j, m)       owner (i,n) -> producer (j,m) flow
q1    (j, m, s)          producer (j,m) -> supplier (j,s) flow
q2    (j, s, t, k)       supplier (j,s) -> market k via mode t
d0    (i, n, g)          owner excess over bracket g
d1    (j, m, g)          producer excess over bracket g
l0    (i,)               resource capacity multiplier
l1    (j, m)             producer conservation multiplier
l2    (j, s)             supplier conservation multiplier
mu0   (i, n, g)          owner bracket multiplier
mu1   (j, m, g)          producer bracket multiplier
====  =================  =======================================
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

BLOCKS = ("q0", "q1", "q2", "d0", "d1", "l0", "l1", "l2", "mu0", "mu1")
FLOW_BLOCKS = ("q0", "q1", "q2")

# index-name letters per block, used for labels and config keys
BLOCK_AXES = {
    "q0": ("i", "n", "j", "m"),
    "q1": ("j", "m", "s"),
    "q2": ("j", "s", "t", "k"),
    "d0": ("i", "n", "g"),
    "d1": ("j", "m", "g"),
    "l0": ("i",),
    "l1": ("j", "m"),
    "l2": ("j", "s"),
    "mu0": ("i", "n", "g"),
    "mu1": ("j", "m", "g"),
}


@dataclass(frozen=True)
class Topology:
    """Tier cardinalities.  ``N`` is per resource i; ``M``, ``S``, ``T`` per resource j."""

    I: int
    N: tuple[int, ...]
    M: tuple[int, ...]
    S: tuple[int, ...]
    T: tuple[int, ...]
    K: int
    G: int = 0

    @classmethod
    def uniform(cls, I: int, N: int, M: int, S: int, T: int, K: int, G: int = 0) -> "Topology":
        """Same N, M, S, T for every resource."""
        return cls(I, (N,) * I, (M,) * I, (S,) * I, (T,) * I, K, G)

    def owners(self) -> Iterator[tuple[int, int]]:
        for i in range(self.I):
            for n in range(self.N[i]):
                yield i, n

    def producers(self) -> Iterator[tuple[int, int]]:
        for j in range(self.I):
            for m in range(self.M[j]):
                yield j, m

    def suppliers(self) -> Iterator[tuple[int, int]]:
        for j in range(self.I):
            for s in range(self.S[j]):
                yield j, s

    def owner_links(self) -> Iterator[tuple[int, int, int, int]]:
        for i, n in self.owners():
            for j, m in self.producers():
                yield i, n, j, m

    def producer_links(self) -> Iterator[tuple[int, int, int]]:
        for j, m in self.producers():
            for s in range(self.S[j]):
                yield j, m, s

    def market_links(self) -> Iterator[tuple[int, int, int, int]]:
        for j, s in self.suppliers():
            for t in range(self.T[j]):
                for k in range(self.K):
                    yield j, s, t, k

    def problems(self) -> list[str]:
        out = []
        if self.I < 1:
            out.append("topology.I: must be >= 1")
        for name in ("N", "M", "S", "T"):
            seq = getattr(self, name)
            if len(seq) != self.I:
                out.append(f"topology.{name}: expected {self.I} entries, got {len(seq)}")
            for idx, v in enumerate(seq):
                if v < 1:
                    out.append(f"topology.{name}[{idx + 1}]: must be >= 1")
        if self.K < 1:
            out.append("topology.K: must be >= 1")
        if self.G < 0:
            out.append("topology.G: must be >= 0")
        return out


@dataclass(frozen=True)
class IndexMap:
    """Bijection between ``(block, index tuple)`` and flat positions."""

    topology: Topology
    keys: dict[str, tuple[tuple[int, ...], ...]] = field(repr=False)
    offsets: dict[str, int]
    size: int
    _pos: dict[tuple[str, tuple[int, ...]], int] = field(repr=False, compare=False)

    def pos(self, block: str, idx: tuple[int, ...]) -> int:
        return self._pos[(block, tuple(idx))]

    def slice(self, block: str) -> slice:
        start = self.offsets[block]
        return slice(start, start + len(self.keys[block]))

    def label(self, position: int) -> tuple[str, tuple[int, ...]]:
        if not 0 <= position < self.size:
            raise IndexError(f"position {position} outside 0..{self.size - 1}")
        for block in reversed(BLOCKS):
            if position >= self.offsets[block] and self.keys[block]:
                return block, self.keys[block][position - self.offsets[block]]
        raise IndexError(position)  # pragma: no cover

    def name(self, position: int) -> str:
        """Human-readable 1-based label, e.g. ``q0[1,1,2,1]``."""
        block, idx = self.label(position)
        return f"{block}[{','.join(str(v + 1) for v in idx)}]"

    @property
    def n_flows(self) -> int:
        return self.offsets["d0"]

    def __len__(self) -> int:
        return self.size


def build_index_map(topo: Topology) -> IndexMap:
    G = range(topo.G)
    keys = {
        "q0": tuple(topo.owner_links()),
        "q1": tuple(topo.producer_links()),
        "q2": tuple(topo.market_links()),
        "d0": tuple((i, n, g) for i, n in topo.owners() for g in G),
        "d1": tuple((j, m, g) for j, m in topo.producers() for g in G),
        "l0": tuple((i,) for i in range(topo.I)),
        "l1": tuple(topo.producers()),
        "l2": tuple(topo.suppliers()),
        "mu0": tuple((i, n, g) for i, n in topo.owners() for g in G),
        "mu1": tuple((j, m, g) for j, m in topo.producers() for g in G),
    }
    offsets = {}
    pos = {}
    cursor = 0
    for block in BLOCKS:
        offsets[block] = cursor
        for idx in keys[block]:
            pos[(block, idx)] = cursor
            cursor += 1
    return IndexMap(topo, keys, offsets, cursor, pos)
