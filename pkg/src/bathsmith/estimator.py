"""Hierarchical-equation auxiliary-operator counts and memory estimates.

For N sites with M Lorentzian peaks per site and hierarchy depth L the
number of auxiliary operators is binomial(2NM + L, L); absorption
bookkeeping holds N complex entries per operator (the ground column of
the single-excitation block), which reproduces the published dimer and
multi-site byte counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class HeomCostQuery:
    """Problem dimensions for the auxiliary-operator estimate."""

    n_sites: int
    n_lorentzians: int
    depth: int
    block_entries: int | None = None
    bytes_per_entry: int = 16

    def __post_init__(self):
        if self.n_sites < 0 or self.n_lorentzians < 0 or self.depth < 0:
            raise ValidationError("counts must be >= 0")
        if self.bytes_per_entry <= 0:
            raise ValidationError("bytes_per_entry must be > 0")
        if self.block_entries is not None and self.block_entries <= 0:
            raise ValidationError("block_entries must be > 0")

    @property
    def resolved_block_entries(self) -> int:
        """Absorption coherence block: N complex entries per operator."""
        return self.block_entries if self.block_entries is not None else self.n_sites


def heom_count(query: HeomCostQuery) -> int:
    """Exact auxiliary-operator count binomial(2NM + L, L)."""
    return math.comb(2 * query.n_sites * query.n_lorentzians + query.depth, query.depth)


def heom_memory(query: HeomCostQuery) -> int:
    """Bytes held by all auxiliary operators under the block convention."""
    return heom_count(query) * query.resolved_block_entries * query.bytes_per_entry


def human_bytes(n: int) -> str:
    """Engineering-style byte size (decimal prefixes)."""
    for unit, scale in (("TB", 1e12), ("GB", 1e9), ("MB", 1e6), ("kB", 1e3)):
        if n >= scale:
            return f"{n / scale:.3g} {unit}"
    return f"{n} B"
