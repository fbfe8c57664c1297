"""Box geometry: the cube [-n,n]^d, its adjacency, and lexicographic order.

Sites are addressed either by coordinate tuples or by a flat row-major
linear index (axis 0 slowest).  Because coordinates run from -n to n along
every axis, the linear index order coincides with lexicographic order on
coordinates, so the lex-min of a site set is the site with minimal index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BOUNDARY_CONDITIONS = ("zero", "free", "periodic")

# desk-scale guard: reject boxes whose volume cannot be exactly indexed
MAX_SITES = 1 << 48

SiteIndex = tuple[int, ...]


class CapacityError(ValueError):
    """Box volume exceeds the supported integer range."""


@dataclass(frozen=True)
class BoxGeometry:
    """The cube B_n = [-n,n]^d with a boundary-condition tag.

    The tag changes adjacency only for "periodic" (opposite faces glued);
    "zero" and "free" share in-box adjacency and differ downstream, in how
    boundary-touching clusters are interpreted.
    """

    d: int
    n: int
    bc: str = "zero"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.n < 0:
            raise ValueError(f"radius must be >= 0, got {self.n}")
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"bc must be one of {BOUNDARY_CONDITIONS}, got {self.bc!r}")
        if (2 * self.n + 1) ** self.d > MAX_SITES:
            raise CapacityError(
                f"(2*{self.n}+1)^{self.d} exceeds the {MAX_SITES} site capacity"
            )

    @property
    def side(self) -> int:
        return 2 * self.n + 1

    @property
    def site_count(self) -> int:
        return self.side**self.d

    def strides(self) -> np.ndarray:
        s = np.empty(self.d, dtype=np.int64)
        acc = 1
        for j in range(self.d - 1, -1, -1):
            s[j] = acc
            acc *= self.side
        return s

    def to_linear(self, site: Sequence[int]) -> int:
        if len(site) != self.d:
            raise ValueError(f"site has {len(site)} coords, geometry is {self.d}-dim")
        idx = 0
        for c in site:
            if c < -self.n or c > self.n:
                raise ValueError(f"site {tuple(site)} outside the box (n={self.n})")
            idx = idx * self.side + (c + self.n)
        return idx

    def from_linear(self, idx: int) -> SiteIndex:
        if idx < 0 or idx >= self.site_count:
            raise ValueError(f"linear index {idx} out of range")
        out = []
        for _ in range(self.d):
            idx, r = divmod(idx, self.side)
            out.append(r - self.n)
        return tuple(reversed(out))

    def contains(self, site: Sequence[int]) -> bool:
        return len(site) == self.d and all(-self.n <= c <= self.n for c in site)

    def coords_array(self) -> np.ndarray:
        """(site_count, d) array of coordinates in linear-index order."""
        idx = np.arange(self.site_count)
        out = np.empty((self.site_count, self.d), dtype=np.int64)
        for j in range(self.d - 1, -1, -1):
            idx, r = np.divmod(idx, self.side)
            out[:, j] = r - self.n
        return out

    def boundary_mask(self) -> np.ndarray:
        """Boolean mask of sites with some coordinate equal to +-n."""
        return (np.abs(self.coords_array()) == self.n).any(axis=1)


def site_count(g: BoxGeometry) -> int:
    """Number of sites, (2n+1)^d."""
    return g.site_count


def neighbors(g: BoxGeometry, site: Sequence[int]) -> list[SiteIndex]:
    """Nearest neighbors of `site` reachable under g.bc.

    Zero and free boundary conditions drop out-of-box neighbors; periodic
    wraps coordinates modulo 2n+1.
    """
    if not g.contains(site):
        raise ValueError(f"site {tuple(site)} outside the box")
    out: list[SiteIndex] = []
    site = tuple(site)
    for j in range(g.d):
        for delta in (-1, 1):
            c = site[j] + delta
            if g.bc == "periodic":
                if c > g.n:
                    c -= g.side
                elif c < -g.n:
                    c += g.side
            elif c < -g.n or c > g.n:
                continue
            nb = site[:j] + (c,) + site[j + 1 :]
            if nb != site:  # side==1 wraps onto itself
                out.append(nb)
    # deduplicate (side==2 under periodic glues both directions to one site)
    seen = []
    for nb in out:
        if nb not in seen:
            seen.append(nb)
    return seen


def lex_min(sites: Iterable[Sequence[int]]) -> SiteIndex:
    """Lexicographically smallest coordinate vector of a nonempty collection."""
    best: SiteIndex | None = None
    for s in sites:
        t = tuple(s)
        if best is None or t < best:
            best = t
    if best is None:
        raise ValueError("lex_min of an empty site set")
    return best
