"""Seeded random streams.

Every random draw in the package goes through :func:`stream`, which keys a
Philox-4x64 counter-based generator (numpy's ``Philox``) on a master seed plus
a tuple of purpose labels.  Philox output depends only on (key, counter), so
streams are reproducible across platforms and independent of how work is
scheduled over processes.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _label_word(label: object) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & _MASK64
    digest = hashlib.blake2b(str(label).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream(seed: int, *purpose: object) -> np.random.Generator:
    """Return a generator for ``purpose`` derived from the master ``seed``.

    Labels may be ints or strings; strings are hashed with BLAKE2b (never
    Python's salted ``hash``).
    """
    ss = np.random.SeedSequence(
        entropy=int(seed) & _MASK64,
        spawn_key=tuple(_label_word(p) for p in purpose),
    )
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *purpose: object) -> int:
    """A 64-bit child seed, for handing to APIs that take a plain integer."""
    return int(stream(seed, "derive", *purpose).integers(0, 2**63 - 1, dtype=np.int64))
