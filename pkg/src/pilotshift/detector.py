"""
Blind pilot-offset detection.

The receiver knows N_s, N_p and P but not the offset r_o chosen by the
transmitter. Detection runs in four stages on the received spectrum Y:

1. threshold: candidates are the positions with |Y| > gamma * sqrt(P);
2. distance check: each candidate is shifted by the known pilot distances
   R, 2R, ... and the number of shifted positions that are themselves
   candidates is counted;
3. the N_p best-supported candidates form the initial estimate;
4. each estimate expands to its full comb and the comb with the largest
   aggregate magnitude wins.

If fewer than N_p candidates survive the threshold, gamma is lowered step by
step (soft gamma). Below the floor every comb is scored directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InsufficientCandidatesError
from .pilots import PilotLayout, pilot_positions, wrap_index


@dataclass(frozen=True)
class DetectionConfig:
    gamma: float = 0.8
    gamma_step: float = 0.05
    gamma_min: float = 0.3
    squared: bool = False  # score combs by sum |Y|^2 instead of sum |Y|
    fallback: bool = True  # score all combs when soft gamma bottoms out

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ConfigurationError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not self.gamma_step > 0:
            raise ConfigurationError(f"gamma_step must be positive, got {self.gamma_step}")
        if not 0 <= self.gamma_min <= self.gamma:
            raise ConfigurationError(
                f"gamma_min must lie in [0, gamma], got {self.gamma_min} (gamma={self.gamma})"
            )

    def gammas(self):
        """The thresholds tried, from gamma down to gamma_min (positive only)."""
        k = 0
        while True:
            g = round(self.gamma - k * self.gamma_step, 12)
            if g < self.gamma_min or g <= 0:
                return
            yield g
            k += 1


@dataclass(frozen=True)
class CandidateSet:
    q: np.ndarray
    gamma_used: float

    def __len__(self):
        return self.q.size


@dataclass(frozen=True)
class DetectionResult:
    positions: np.ndarray
    r_o_detected: int
    alpha: float
    gamma_used: float | None = None
    fallback: bool = False


def _scores(received, squared: bool) -> np.ndarray:
    mag = np.abs(np.asarray(received))
    return mag**2 if squared else mag


def candidate_locations(received, P: float, gamma: float) -> CandidateSet:
    """1-based positions whose magnitude strictly exceeds gamma * sqrt(P)."""
    if not P > 0:
        raise ConfigurationError(f"pilot power must be positive, got {P}")
    if not 0 < gamma <= 1:
        raise ConfigurationError(f"gamma must lie in (0, 1], got {gamma}")
    margin = np.abs(np.asarray(received)) - gamma * np.sqrt(P)
    return CandidateSet(np.flatnonzero(margin > 0) + 1, gamma)


def distance_set(layout: PilotLayout) -> np.ndarray:
    """Distances from one pilot to the others: R, 2R, ..., (N_p - 1) R."""
    return layout.r * np.arange(1, layout.n_p)


def build_candidate_matrix(q, s, n_s: int) -> np.ndarray:
    q = np.asarray(q.q if isinstance(q, CandidateSet) else q, dtype=np.int64)
    s = np.asarray(s, dtype=np.int64)
    if q.size == 0:
        return np.zeros((0, s.size), dtype=np.int64)
    return np.asarray(wrap_index(q[:, None] + s[None, :], n_s)).reshape(q.size, s.size)


def count_hits(d, q) -> np.ndarray:
    q = q.q if isinstance(q, CandidateSet) else np.asarray(q)
    d = np.asarray(d)
    return np.isin(d, q).sum(axis=1)


def initial_estimates(q, c, received, n_p: int) -> np.ndarray:
    """
    The N_p candidates with the most hits, ascending.

    Ties are broken by larger |Y|, then by smaller position.
    """
    q = np.asarray(q.q if isinstance(q, CandidateSet) else q)
    c = np.asarray(c)
    if q.size < n_p:
        raise InsufficientCandidatesError(f"{q.size} candidates for {n_p} pilots")
    mag = np.abs(np.asarray(received))[q - 1]
    order = np.lexsort((q, -mag, -c))
    return np.sort(q[order[:n_p]])


def refine(u, layout: PilotLayout, received, squared: bool = False) -> DetectionResult:
    """Expand each estimate into its full comb and keep the comb with the largest score."""
    u = np.asarray(u, dtype=np.int64)
    if u.size == 0:
        raise InsufficientCandidatesError("no initial estimates to refine")
    steps = layout.r * np.arange(1, layout.n_p + 1)
    rows = np.asarray(wrap_index(u[:, None] + steps[None, :], layout.n_s)).reshape(u.size, -1)
    alpha = _scores(received, squared)[rows - 1].sum(axis=1)
    offsets = (u - 1) % layout.r + 1
    k = np.lexsort((offsets, -alpha))[0]
    r_o = int(offsets[k])
    return DetectionResult(pilot_positions(layout.with_offset(r_o)), r_o, float(alpha[k]))


def residue_scores(received, layout: PilotLayout, squared: bool = False) -> np.ndarray:
    """Aggregate score of every comb; entry r_o - 1 belongs to offset r_o."""
    return _scores(received, squared).reshape(layout.n_p, layout.r).sum(axis=0)


def detect_at(received, layout: PilotLayout, gamma: float, squared: bool = False) -> DetectionResult:
    """One pass of the threshold / distance / refine pipeline at a fixed gamma."""
    cand = candidate_locations(received, layout.p, gamma)
    if len(cand) < layout.n_p:
        raise InsufficientCandidatesError(
            f"{len(cand)} candidates for {layout.n_p} pilots at gamma={gamma}"
        )
    d = build_candidate_matrix(cand, distance_set(layout), layout.n_s)
    c = count_hits(d, cand)
    u = initial_estimates(cand, c, received, layout.n_p)
    res = refine(u, layout, received, squared)
    return DetectionResult(res.positions, res.r_o_detected, res.alpha, gamma, False)


def detect(received, layout: PilotLayout, config: DetectionConfig = DetectionConfig()) -> DetectionResult:
    """
    Estimate the pilot offset of a received spectrum.

    Only n_s, n_p and p of `layout` are used. Always returns one of the R
    combs unless `config.fallback` is False, in which case exhausting the
    gamma schedule raises InsufficientCandidatesError.
    """
    received = np.asarray(received)
    for gamma in config.gammas():
        try:
            return detect_at(received, layout, gamma, config.squared)
        except InsufficientCandidatesError:
            continue
    if not config.fallback:
        raise InsufficientCandidatesError(f"no pilot comb found down to gamma={config.gamma_min}")
    alpha = residue_scores(received, layout, config.squared)
    k = int(np.argmax(alpha))
    r_o = k + 1
    return DetectionResult(
        pilot_positions(layout.with_offset(r_o)), r_o, float(alpha[k]), None, True
    )
