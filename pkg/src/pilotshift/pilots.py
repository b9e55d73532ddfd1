"""
Comb pilot geometry.

Pilot positions are 1-based (position p lives in frequency bin p - 1), matching
the offset arithmetic r_o, r_o + R, ... used by both transmitter and detector.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, InputError


@dataclass(frozen=True)
class PilotLayout:
    """N_p equi-spaced pilots of power `p` among `n_s` subcarriers, first pilot at `r_o`."""

    n_s: int
    n_p: int
    r_o: int = 1
    p: float = 9.0

    def __post_init__(self):
        if self.n_s < 1 or self.n_p < 1:
            raise ConfigurationError(f"need n_s >= 1 and n_p >= 1, got {self.n_s}, {self.n_p}")
        if self.n_s % self.n_p:
            raise ConfigurationError(f"n_p={self.n_p} does not divide n_s={self.n_s}")
        if not 0 < self.r_o <= self.r:
            raise ConfigurationError(f"offset r_o={self.r_o} outside (0, {self.r}]")
        if not self.p > 0:
            raise ConfigurationError(f"pilot power must be positive, got {self.p}")

    @property
    def r(self) -> int:
        """Pilot spacing N_s / N_p."""
        return self.n_s // self.n_p

    @property
    def n_data(self) -> int:
        return self.n_s - self.n_p

    def with_offset(self, r_o: int) -> "PilotLayout":
        return replace(self, r_o=r_o)


def pilot_positions(layout: PilotLayout) -> np.ndarray:
    return layout.r_o + layout.r * np.arange(layout.n_p)


def _data_mask(n_s: int, positions) -> np.ndarray:
    positions = np.asarray(positions)
    if positions.ndim != 1 or np.any(positions < 1) or np.any(positions > n_s):
        raise InputError(f"pilot positions must lie in [1, {n_s}]")
    if np.unique(positions).size != positions.size:
        raise InputError("pilot positions must be distinct")
    mask = np.ones(n_s, dtype=bool)
    mask[positions - 1] = False
    return mask


def assemble_frame(data, layout: PilotLayout) -> np.ndarray:
    """Place sqrt(P) pilots at the layout positions; data fills the rest in ascending order."""
    data = np.asarray(data, dtype=np.complex128)
    if data.shape[-1] != layout.n_data:
        raise InputError(f"expected {layout.n_data} data symbols, got {data.shape[-1]}")
    frame = np.empty(data.shape[:-1] + (layout.n_s,), dtype=np.complex128)
    pos = pilot_positions(layout)
    frame[..., _data_mask(layout.n_s, pos)] = data
    frame[..., pos - 1] = np.sqrt(layout.p)
    return frame


def disassemble_frame(frame, positions) -> np.ndarray:
    """Symbols at the non-pilot positions, ascending."""
    frame = np.asarray(frame)
    return frame[..., _data_mask(frame.shape[-1], positions)]


def wrap_index(v, n_s: int):
    """
    Fold a 1-based index in [1, 2 n_s] back into [1, n_s].

    Uses the piecewise rule  m = v mod (n_s + 1);  m + 1 if m < v else v,
    which equals ((v - 1) mod n_s) + 1 on that range.
    """
    arr = np.asarray(v)
    if np.any(arr < 1) or np.any(arr > 2 * n_s):
        raise InputError(f"index outside [1, {2 * n_s}]")
    m = arr % (n_s + 1)
    out = np.where(m < arr, m + 1, arr)
    return int(out) if out.ndim == 0 else out
