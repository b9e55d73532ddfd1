"""QPSK Gray mapping, hard-decision demapping and seeded bit sources."""
from __future__ import annotations

import numpy as np

from .errors import InputError

_SCALE = 1.0 / np.sqrt(2.0)


def random_bits(count: int, seed) -> np.ndarray:
    """
    i.i.d. uniform bits from a generator seeded with `seed`.

    `seed` may be an int or a sequence of ints such as (master_seed, trial_index);
    equal seeds always yield equal streams.
    """
    if count < 0:
        raise InputError(f"bit count must be non-negative, got {count}")
    return np.random.default_rng(seed).integers(0, 2, size=count, dtype=np.int8)


def qpsk_map(bits) -> np.ndarray:
    """
    Gray-mapped unit-energy QPSK along the last axis.

    (0,0) -> (+1+j)/sqrt2, (0,1) -> (+1-j)/sqrt2, (1,0) -> (-1+j)/sqrt2, (1,1) -> (-1-j)/sqrt2
    """
    bits = np.asarray(bits)
    if bits.shape[-1] % 2:
        raise InputError(f"QPSK needs an even number of bits, got {bits.shape[-1]}")
    b0 = bits[..., 0::2].astype(np.float64)
    b1 = bits[..., 1::2].astype(np.float64)
    return ((1.0 - 2.0 * b0) + 1j * (1.0 - 2.0 * b1)) * _SCALE


def qpsk_demap(symbols) -> np.ndarray:
    # per-axis sign decision; exact zero counts as positive
    symbols = np.asarray(symbols)
    out = np.empty(symbols.shape[:-1] + (2 * symbols.shape[-1],), dtype=np.int8)
    out[..., 0::2] = symbols.real < 0
    out[..., 1::2] = symbols.imag < 0
    return out
