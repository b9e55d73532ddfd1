"""
Seeded Monte Carlo experiments and their CSV output.

Every random draw of trial t comes from a generator seeded with
(seed, cell, t, stream), so each trial is reproducible on its own and the
order in which trials run does not matter. Per-trial records are kept on the
result; the CSV rows are aggregates computed from them.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import ChannelConfig, awgn
from .detector import DetectionConfig, detect
from .errors import ConfigurationError, InsufficientCandidatesError
from .modem import qpsk_demap, qpsk_map, random_bits
from .numerics import fft, ifft, oversampled_ifft, papr_db
from .pilots import PilotLayout, assemble_frame, disassemble_frame, pilot_positions
from .transmitter import candidate_paprs, select_offsets

BITS_STREAM = 0
NOISE_STREAM = 1

HEADERS = {
    "ccdf": ("threshold_db", "ccdf_baseline", "ccdf_proposed"),
    "power-sweep": ("pilot_power", "threshold_db", "ccdf"),
    "detect-error": ("snr_db", "n_s", "r_spacing", "error_pct", "frames"),
    "gamma-grid": ("gamma", "pilot_power", "error_pct", "frames"),
    "ber": ("snr_db", "ber_known", "ber_detected", "bits"),
}


@dataclass
class ExperimentConfig:
    n_s: int = 64
    n_p: int = 4
    pilot_power: float = 9.0
    oversample: int = 8
    snr_db: tuple = (0.0, 3.0, 6.0, 9.0)
    frames: int = 100_000
    seed: int = 0
    gamma: float = 0.8
    gamma_step: float = 0.05
    gamma_min: float = 0.3
    ccdf_min_db: float = 4.0
    ccdf_max_db: float = 12.0
    ccdf_step_db: float = 0.1
    out: Optional[str] = None

    def __post_init__(self):
        if self.frames < 1:
            raise ConfigurationError(f"frame count must be >= 1, got {self.frames}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        self.snr_db = tuple(float(s) for s in self.snr_db)
        self.layout()
        self.detection()

    def layout(self, n_s: Optional[int] = None, n_p: Optional[int] = None, p: Optional[float] = None) -> PilotLayout:
        return PilotLayout(
            n_s or self.n_s, n_p or self.n_p, 1, self.pilot_power if p is None else p
        )

    def detection(self) -> DetectionConfig:
        return DetectionConfig(self.gamma, self.gamma_step, self.gamma_min)

    def thresholds(self) -> np.ndarray:
        steps = int(round((self.ccdf_max_db - self.ccdf_min_db) / self.ccdf_step_db))
        return np.round(self.ccdf_min_db + self.ccdf_step_db * np.arange(steps + 1), 10)


@dataclass
class ExperimentResult:
    kind: str
    config: dict
    rows: list = field(default_factory=list)
    trials: dict = field(default_factory=dict)

    @property
    def header(self) -> tuple:
        return HEADERS[self.kind]


# -- statistics -------------------------------------------------------------


def ccdf(values, thresholds) -> np.ndarray:
    """Empirical Pr(value > x) for each threshold x."""
    v = np.sort(np.asarray(values, dtype=float))
    x = np.asarray(thresholds, dtype=float)
    return (v.size - np.searchsorted(v, x, side="right")) / v.size


def tail_level(values, prob: float) -> float:
    """Smallest sample x with empirical Pr(value > x) <= prob."""
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    k = min(int(math.floor(prob * v.size)), v.size - 1)
    return float(v[k])


# -- trial generation -------------------------------------------------------


def _snr_channel(snr_db: float, seed) -> ChannelConfig:
    return ChannelConfig(None if math.isinf(snr_db) else snr_db, seed)


def _trial_bits(config: ExperimentConfig, layout: PilotLayout, cell: int) -> np.ndarray:
    n = 2 * layout.n_data
    return np.stack(
        [random_bits(n, (config.seed, cell, t, BITS_STREAM)) for t in range(config.frames)]
    )


def _noisy_spectra(config: ExperimentConfig, signals: np.ndarray, snr_db: float, cell: int, stream: int):
    for t in range(config.frames):
        ch = _snr_channel(snr_db, (config.seed, cell, t, NOISE_STREAM, stream))
        yield t, fft(awgn(signals[t], ch))


def _selected_frames(config, layout, bits):
    data = qpsk_map(bits)
    r_o, _ = select_offsets(candidate_paprs(data, layout, config.oversample))
    frames = np.empty((config.frames, layout.n_s), dtype=np.complex128)
    for r in np.unique(r_o):
        rows = r_o == r
        frames[rows] = assemble_frame(data[rows], layout.with_offset(int(r)))
    return r_o, frames


# -- aggregation ------------------------------------------------------------


def aggregate(result: ExperimentResult) -> list:
    """Recompute the CSV rows of `result` from its per-trial records."""
    tr = result.trials
    cfg = ExperimentConfig(**_config_from_dict(result.config))
    if result.kind == "ccdf":
        x = cfg.thresholds()
        return [
            (float(a), float(b), float(c))
            for a, b, c in zip(x, ccdf(tr["papr_baseline"], x), ccdf(tr["papr_proposed"], x))
        ]
    if result.kind == "power-sweep":
        x = cfg.thresholds()
        rows = []
        for p, values in zip(tr["pilot_power"], tr["papr"]):
            rows += [(float(p), float(a), float(b)) for a, b in zip(x, ccdf(values, x))]
        return rows
    if result.kind == "detect-error":
        rows = []
        keys = np.stack([tr["n_s"], tr["r_spacing"]], axis=1)
        cells = list(dict.fromkeys(map(tuple, keys.tolist())))
        for n_s, r in cells:
            for snr in cfg.snr_db:
                sel = (tr["n_s"] == n_s) & (tr["r_spacing"] == r) & (tr["snr_db"] == snr)
                errors = int(np.count_nonzero(tr["r_o_true"][sel] != tr["r_o_detected"][sel]))
                n = int(np.count_nonzero(sel))
                rows.append((snr, int(n_s), int(r), 100.0 * errors / n, n))
        return rows
    if result.kind == "gamma-grid":
        rows = []
        pairs = list(dict.fromkeys(zip(tr["gamma"].tolist(), tr["pilot_power"].tolist())))
        for g, p in pairs:
            sel = (tr["gamma"] == g) & (tr["pilot_power"] == p)
            errors = int(np.count_nonzero(tr["r_o_true"][sel] != tr["r_o_detected"][sel]))
            n = int(np.count_nonzero(sel))
            rows.append((float(g), float(p), 100.0 * errors / n, n))
        return rows
    if result.kind == "ber":
        rows = []
        for snr in cfg.snr_db:
            sel = tr["snr_db"] == snr
            bits = int(tr["bits"][sel].sum())
            rows.append(
                (
                    snr,
                    int(tr["errors_known"][sel].sum()) / bits,
                    int(tr["errors_detected"][sel].sum()) / bits,
                    bits,
                )
            )
        return rows
    raise ConfigurationError(f"unknown experiment kind {result.kind!r}")


def _finish(kind: str, config: ExperimentConfig, trials: dict, extra: Optional[dict] = None) -> ExperimentResult:
    cfg = asdict(config)
    cfg["snr_db"] = list(config.snr_db)
    del cfg["out"]  # output location does not affect the results
    if extra:
        cfg.update(extra)
    result = ExperimentResult(kind, cfg, trials=trials)
    result.rows = aggregate(result)
    return result


def _config_from_dict(d: dict) -> dict:
    names = ExperimentConfig.__dataclass_fields__
    return {k: v for k, v in d.items() if k in names}


# -- experiments ------------------------------------------------------------


def run_ccdf(config: ExperimentConfig) -> ExperimentResult:
    """PAPR of the fixed r_o = 1 arrangement versus the best shifted arrangement."""
    layout = config.layout()
    data = qpsk_map(_trial_bits(config, layout, 0))
    paprs = candidate_paprs(data, layout, config.oversample)
    r_o, best = select_offsets(paprs)
    trials = {"papr_baseline": paprs[:, 0], "papr_proposed": best, "r_o_selected": r_o}
    return _finish("ccdf", config, trials)


def run_pilot_power_sweep(config: ExperimentConfig, powers: Sequence[float]) -> ExperimentResult:
    """Conventional (r_o = 1) PAPR CCDF for each pilot power; the data is shared across powers."""
    if len(powers) == 0:
        raise ConfigurationError("power list must not be empty")
    powers = [float(p) for p in powers]
    layout = config.layout()
    data = qpsk_map(_trial_bits(config, layout, 0))
    paprs = np.empty((len(powers), config.frames))
    for i, p in enumerate(powers):
        lay = config.layout(p=p)
        for start in range(0, config.frames, 2048):
            frames = assemble_frame(data[start:start + 2048], lay)
            paprs[i, start:start + 2048] = papr_db(oversampled_ifft(frames, config.oversample))
    trials = {"pilot_power": np.array(powers), "papr": paprs}
    return _finish("power-sweep", config, trials, {"powers": powers})


def run_detection_error(config: ExperimentConfig, cells: Optional[Sequence[tuple]] = None) -> ExperimentResult:
    """
    Block detection error per (SNR, N_s, R) cell with soft gamma.

    `cells` lists (n_s, n_p) pairs; the default is the single configured layout.
    """
    cells = [(config.n_s, config.n_p)] if cells is None else [tuple(c) for c in cells]
    det = config.detection()
    cols = {k: [] for k in ("n_s", "r_spacing", "snr_db", "r_o_true", "r_o_detected", "initial_gamma", "fallback")}
    for ci, (n_s, n_p) in enumerate(cells):
        layout = config.layout(n_s, n_p)
        r_true, frames = _selected_frames(config, layout, _trial_bits(config, layout, ci))
        signals = ifft(frames)
        for si, snr in enumerate(config.snr_db):
            for t, spectrum in _noisy_spectra(config, signals, snr, ci, si):
                res = detect(spectrum, layout, det)
                cols["n_s"].append(n_s)
                cols["r_spacing"].append(layout.r)
                cols["snr_db"].append(snr)
                cols["r_o_true"].append(int(r_true[t]))
                cols["r_o_detected"].append(res.r_o_detected)
                cols["initial_gamma"].append(res.gamma_used == config.gamma)
                cols["fallback"].append(res.fallback)
    trials = {k: np.asarray(v) for k, v in cols.items()}
    return _finish("detect-error", config, trials, {"cells": [list(c) for c in cells]})


def run_gamma_power_grid(
    config: ExperimentConfig,
    gammas: Sequence[float],
    powers: Sequence[float],
    snr_db: float = 0.0,
) -> ExperimentResult:
    """
    Detection error over a (gamma, P) grid with a fixed threshold.

    There is no soft-gamma retry and no fallback here: a frame with fewer
    than N_p threshold survivors counts as an error (r_o_detected = 0).
    """
    cols = {k: [] for k in ("gamma", "pilot_power", "r_o_true", "r_o_detected")}
    for pi, p in enumerate(powers):
        layout = config.layout(p=float(p))
        r_true, frames = _selected_frames(config, layout, _trial_bits(config, layout, 0))
        spectra = [s for _, s in _noisy_spectra(config, ifft(frames), snr_db, 0, 0)]
        for g in gammas:
            det = DetectionConfig(float(g), config.gamma_step, float(g), fallback=False)
            for t, spectrum in enumerate(spectra):
                try:
                    found = detect(spectrum, layout, det).r_o_detected
                except InsufficientCandidatesError:
                    found = 0
                cols["gamma"].append(float(g))
                cols["pilot_power"].append(float(p))
                cols["r_o_true"].append(int(r_true[t]))
                cols["r_o_detected"].append(found)
    trials = {k: np.asarray(v) for k, v in cols.items()}
    extra = {"gammas": [float(g) for g in gammas], "powers": [float(p) for p in powers], "grid_snr_db": snr_db}
    return _finish("gamma-grid", config, trials, extra)


def run_ber(config: ExperimentConfig) -> ExperimentResult:
    """
    Bit error rate with known pilot positions versus blindly detected ones.

    Both receivers see the same transmitted frames and the same noise.
    """
    layout = config.layout()
    det = config.detection()
    bits = _trial_bits(config, layout, 0)
    r_true, frames = _selected_frames(config, layout, bits)
    signals = ifft(frames)
    cols = {k: [] for k in ("snr_db", "r_o_true", "r_o_detected", "errors_known", "errors_detected", "bits")}
    for si, snr in enumerate(config.snr_db):
        for t, spectrum in _noisy_spectra(config, signals, snr, 0, si):
            known = pilot_positions(layout.with_offset(int(r_true[t])))
            res = detect(spectrum, layout, det)
            b_known = qpsk_demap(disassemble_frame(spectrum, known))
            b_det = qpsk_demap(disassemble_frame(spectrum, res.positions))
            cols["snr_db"].append(snr)
            cols["r_o_true"].append(int(r_true[t]))
            cols["r_o_detected"].append(res.r_o_detected)
            cols["errors_known"].append(int(np.count_nonzero(b_known != bits[t])))
            cols["errors_detected"].append(int(np.count_nonzero(b_det != bits[t])))
            cols["bits"].append(bits.shape[1])
    trials = {k: np.asarray(v) for k, v in cols.items()}
    return _finish("ber", config, trials)


# -- CSV --------------------------------------------------------------------

MANIFEST_PREFIX = "# pilotshift "


def format_csv(result: ExperimentResult) -> str:
    """CSV text: a comment line holding the resolved config, the header, then the rows."""
    manifest = json.dumps({"kind": result.kind, "config": result.config}, sort_keys=True)
    buf = io.StringIO()
    buf.write(MANIFEST_PREFIX + manifest + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.header)
    writer.writerows(result.rows)
    return buf.getvalue()


def write_csv(result: ExperimentResult, path) -> None:
    text = format_csv(result)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> tuple[dict, tuple, list]:
    """Inverse of write_csv: (manifest, header, rows) with numeric fields parsed."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith(MANIFEST_PREFIX):
            raise ValueError(f"{path} has no pilotshift manifest line")
        manifest = json.loads(first[len(MANIFEST_PREFIX):])
        reader = csv.reader(fh)
        header = tuple(next(reader))
        rows = [tuple(_parse_number(v) for v in row) for row in reader]
    return manifest, header, rows


def _parse_number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)
