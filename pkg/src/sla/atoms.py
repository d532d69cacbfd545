"""Orbits, orbit-finite sets and elements over the integer atoms (Z, +1).

Every single-orbit set is Z_k for some k >= 0, where k = 0 stands for Z
itself.  An element is an (orbit id, integer) pair; for k >= 1 the integer is
kept as its residue in [0, k).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class UnknownOrbit(KeyError):
    pass


@dataclass(frozen=True)
class Orbit:
    id: str
    characteristic: int = 0

    def __post_init__(self):
        if not isinstance(self.characteristic, int) or self.characteristic < 0:
            raise ValueError(f"orbit {self.id!r}: characteristic must be a natural number")

    @property
    def is_finite(self) -> bool:
        return self.characteristic >= 1


@dataclass(frozen=True)
class Element:
    orbit: str
    value: int

    def __str__(self):
        return f"{self.orbit}:{self.value}"


class OrbitFiniteSet:
    """A finite, ordered family of orbits with distinct ids."""

    __slots__ = ("orbits", "_by_id")

    def __init__(self, orbits: Iterable[Orbit] = ()):
        orbits = tuple(orbits)
        by_id = {}
        for o in orbits:
            if o.id in by_id:
                raise ValueError(f"duplicate orbit id {o.id!r}")
            by_id[o.id] = o
        self.orbits = orbits
        self._by_id = by_id

    @classmethod
    def of(cls, **chars: int) -> "OrbitFiniteSet":
        return cls(Orbit(k, v) for k, v in chars.items())

    def __iter__(self) -> Iterator[Orbit]:
        return iter(self.orbits)

    def __len__(self):
        return len(self.orbits)

    def __contains__(self, orbit_id) -> bool:
        return orbit_id in self._by_id

    def __getitem__(self, orbit_id: str) -> Orbit:
        try:
            return self._by_id[orbit_id]
        except KeyError:
            raise UnknownOrbit(orbit_id) from None

    def __eq__(self, other):
        return isinstance(other, OrbitFiniteSet) and self.orbits == other.orbits

    def __hash__(self):
        return hash(self.orbits)

    def __repr__(self):
        inner = ", ".join(f"{o.id}:Z_{o.characteristic}" for o in self.orbits)
        return f"OrbitFiniteSet({inner})"

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(o.id for o in self.orbits)

    def char(self, orbit_id: str) -> int:
        return self[orbit_id].characteristic

    def restrict(self, keep) -> "OrbitFiniteSet":
        keep = set(keep)
        return OrbitFiniteSet(o for o in self.orbits if o.id in keep)


def canonicalize(e: Element, universe: OrbitFiniteSet) -> Element:
    k = universe.char(e.orbit)
    if k >= 1 and not 0 <= e.value < k:
        return Element(e.orbit, e.value % k)
    return e


def act(e: Element, pi: int, universe: OrbitFiniteSet) -> Element:
    """Translate ``e`` by ``pi``, the action of the atom automorphism x -> x + pi."""
    return canonicalize(Element(e.orbit, e.value + pi), universe)


def is_canonical(e: Element, universe: OrbitFiniteSet) -> bool:
    k = universe.char(e.orbit)
    return k == 0 or 0 <= e.value < k
