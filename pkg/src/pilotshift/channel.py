"""Static AWGN channel."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class ChannelConfig:
    """
    `snr_db` is the ratio of unit data-symbol energy to the complex noise
    variance per sample; None means a noise-free channel.
    """

    snr_db: Optional[float] = None
    seed: Any = 0

    def __post_init__(self):
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise ConfigurationError(f"snr_db must be finite or None, got {self.snr_db}")

    @property
    def noise_variance(self) -> float:
        return 0.0 if self.snr_db is None else 10.0 ** (-self.snr_db / 10.0)


def awgn(signal, config: ChannelConfig) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise, variance/2 per real axis."""
    signal = np.asarray(signal, dtype=np.complex128)
    if config.snr_db is None:
        return signal.copy()
    rng = np.random.default_rng(config.seed)
    scale = math.sqrt(config.noise_variance / 2.0)
    noise = rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape)
    return signal + scale * noise
