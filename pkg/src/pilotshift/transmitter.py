"""Pilot-shifting PAPR minimisation: try every comb offset, keep the lowest-PAPR one."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .numerics import oversampled_ifft, papr_db
from .pilots import PilotLayout, assemble_frame


@dataclass(frozen=True)
class ShiftSearchResult:
    best_r_o: int
    best_papr_db: float
    frame: np.ndarray
    candidates_evaluated: int
    layout: PilotLayout


def minimize_papr(
    data,
    layout_base: PilotLayout,
    L: int = 8,
    early_exit_db: Optional[float] = None,
) -> ShiftSearchResult:
    """
    Evaluate offsets r_o = 1, 2, ..., R and return the arrangement with minimum PAPR.

    With `early_exit_db` set, the search stops at the first offset whose PAPR is
    below it. Ties go to the smallest offset. No side information is produced.
    """
    if L < 1:
        raise ConfigurationError(f"oversampling factor must be >= 1, got {L}")
    best = None
    evaluated = 0
    for r_o in range(1, layout_base.r + 1):
        layout = layout_base.with_offset(r_o)
        frame = assemble_frame(data, layout)
        value = papr_db(oversampled_ifft(frame, L))
        evaluated += 1
        if best is None or value < best[1]:
            best = (r_o, value, frame, layout)
        if early_exit_db is not None and value < early_exit_db:
            break
    r_o, value, frame, layout = best
    return ShiftSearchResult(r_o, value, frame, evaluated, layout)


def candidate_paprs(data, layout_base: PilotLayout, L: int = 8, chunk: int = 1024) -> np.ndarray:
    """
    PAPR in dB of every offset for a batch of frames: shape (frames, R).

    Column r_o - 1 holds the PAPR of the arrangement with first pilot at r_o.
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.complex128))
    out = np.empty((data.shape[0], layout_base.r))
    for start in range(0, data.shape[0], chunk):
        block = data[start:start + chunk]
        for r_o in range(1, layout_base.r + 1):
            frames = assemble_frame(block, layout_base.with_offset(r_o))
            out[start:start + chunk, r_o - 1] = papr_db(oversampled_ifft(frames, L))
    return out


def select_offsets(paprs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (best r_o, best PAPR); argmin returns the first minimum, i.e. smallest r_o."""
    idx = np.argmin(paprs, axis=-1)
    return idx + 1, np.take_along_axis(paprs, idx[..., None], axis=-1)[..., 0]


def transmit(result: ShiftSearchResult, L_tx: int = 1) -> np.ndarray:
    return oversampled_ifft(result.frame, L_tx)
