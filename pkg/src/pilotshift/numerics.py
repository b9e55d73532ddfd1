"""
Unitary radix-2 FFT/IFFT, oversampled synthesis and PAPR.

All transforms operate along the last axis, so a stack of frames with shape
(..., N) is processed in one call.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, InputError


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=None)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=None)
def _twiddles(size: int, sign: int) -> np.ndarray:
    return np.exp(sign * 2j * np.pi * np.arange(size // 2) / size)


def _radix2(x: np.ndarray, sign: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ConfigurationError(f"transform length must be a power of two, got {n}")
    lead = x.shape[:-1]
    y = x[..., _bit_reversal(n)]
    scratch = np.empty_like(y)
    size = 2
    while size <= n:
        half = size // 2
        src = y.reshape(*lead, n // size, size)
        dst = scratch.reshape(*lead, n // size, size)
        b = src[..., half:] * _twiddles(size, sign)
        np.add(src[..., :half], b, out=dst[..., :half])
        np.subtract(src[..., :half], b, out=dst[..., half:])
        y, scratch = scratch, y
        size *= 2
    y *= 1.0 / np.sqrt(n)
    return y


def fft(signal) -> np.ndarray:
    """Unitary forward DFT, X_k = N^-1/2 sum_n x_n exp(-j2pi kn/N)."""
    return _radix2(signal, -1)


def ifft(frame) -> np.ndarray:
    """Unitary inverse DFT, x_n = N^-1/2 sum_k X_k exp(+j2pi kn/N)."""
    return _radix2(frame, +1)


def zero_pad_midband(frame, factor: int) -> np.ndarray:
    """Insert N(L-1) zero bins between the lower and upper halves of the spectrum."""
    frame = np.asarray(frame, dtype=np.complex128)
    n = frame.shape[-1]
    half = n // 2
    out = np.zeros(frame.shape[:-1] + (n * factor,), dtype=np.complex128)
    out[..., :half] = frame[..., :half]
    out[..., n * factor - (n - half):] = frame[..., half:]
    return out


def oversampled_ifft(frame, factor: int) -> np.ndarray:
    """
    Time-domain synthesis at `factor` samples per Nyquist sample.

    The result is scaled by sqrt(factor) so the mean sample power equals that
    of ``ifft(frame)``; every factor-th sample coincides with the L = 1 signal.
    """
    if int(factor) != factor or factor < 1:
        raise ConfigurationError(f"oversampling factor must be an integer >= 1, got {factor}")
    factor = int(factor)
    if factor == 1:
        return ifft(frame)
    return ifft(zero_pad_midband(frame, factor)) * np.sqrt(factor)


def papr(signal) -> np.ndarray | float:
    """Linear peak-to-average power ratio along the last axis."""
    p = np.abs(np.asarray(signal, dtype=np.complex128)) ** 2
    mean = p.mean(axis=-1)
    if np.any(mean == 0):
        raise InputError("PAPR is undefined for an all-zero signal")
    ratio = p.max(axis=-1) / mean
    return float(ratio) if np.ndim(ratio) == 0 else ratio


def papr_db(signal) -> np.ndarray | float:
    """PAPR in dB: 10 log10(max |x|^2 / mean |x|^2)."""
    ratio = papr(signal)
    return float(10.0 * np.log10(ratio)) if np.ndim(ratio) == 0 else 10.0 * np.log10(ratio)
