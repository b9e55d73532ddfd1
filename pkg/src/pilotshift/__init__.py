"""Pilot-shifting PAPR reduction for OFDM with blind pilot detection."""

from .channel import ChannelConfig, awgn
from .detector import DetectionConfig, DetectionResult, detect
from .errors import ConfigurationError, InputError, InsufficientCandidatesError, PilotShiftError
from .modem import qpsk_demap, qpsk_map, random_bits
from .numerics import fft, ifft, oversampled_ifft, papr_db
from .pilots import PilotLayout, assemble_frame, disassemble_frame, pilot_positions, wrap_index
from .transmitter import ShiftSearchResult, minimize_papr, transmit

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "ConfigurationError",
    "DetectionConfig",
    "DetectionResult",
    "InputError",
    "InsufficientCandidatesError",
    "PilotLayout",
    "PilotShiftError",
    "ShiftSearchResult",
    "assemble_frame",
    "awgn",
    "detect",
    "disassemble_frame",
    "fft",
    "ifft",
    "minimize_papr",
    "oversampled_ifft",
    "papr_db",
    "pilot_positions",
    "qpsk_demap",
    "qpsk_map",
    "random_bits",
    "transmit",
    "wrap_index",
]
