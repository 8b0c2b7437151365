"""Counter-based seed derivation for reproducible, order-independent RNG streams.

Every random draw in the package flows through a generator derived here from
a tuple of integer parts (seed, stream tag, column index, repeat index, ...).
Two calls with the same parts yield identical streams regardless of how many
other streams were consumed in between, which is what makes noise prefixes,
per-cell sweep seeds and parallel execution reproducible.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed_sequence(*parts: int) -> np.random.SeedSequence:
    """SeedSequence keyed by the given integer parts (negatives wrap mod 2^64)."""
    if not parts:
        raise ValueError("at least one seed part is required")
    return np.random.SeedSequence([int(p) & _MASK64 for p in parts])


def derive_rng(*parts: int) -> np.random.Generator:
    """Fresh Generator for the stream identified by the given parts."""
    return np.random.default_rng(derive_seed_sequence(*parts))


def derive_seed(*parts: int) -> int:
    """Collapse the derived stream identity into a single integer seed."""
    return int(derive_seed_sequence(*parts).generate_state(1, np.uint64)[0])
