"""Observation timelines, the additive-noise channel, and age of information.

A Timeline pairs generation instants t_i with reception instants t'_i (FCFS,
so receptions never reorder).  An ObservationWindow is the tail of a timeline
that enters the mutual-information computation: the last m generation times
together with their consecutive intervals.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Timeline",
    "ObservationWindow",
    "NoiseModel",
    "uniform_timeline",
    "poisson_timeline",
    "observe",
    "age_of_information",
    "window_at",
    "timeline_to_csv",
    "timeline_from_csv",
]


@dataclass(frozen=True)
class NoiseModel:
    """Additive i.i.d. Gaussian observation noise with variance sigma_n2 >= 0."""

    sigma_n2: float

    def __post_init__(self):
        if not np.isfinite(self.sigma_n2) or self.sigma_n2 < 0:
            raise ValueError(f"sigma_n2 must be finite and >= 0, got {self.sigma_n2}")


@dataclass(frozen=True)
class Timeline:
    """Generation and reception instants of n status updates.

    Invariants: gen_times strictly increasing, recv_times nondecreasing
    (FCFS never reorders), and every update is received after it is
    generated.
    """

    gen_times: tuple
    recv_times: tuple

    def __post_init__(self):
        gen = tuple(float(t) for t in self.gen_times)
        recv = tuple(float(t) for t in self.recv_times)
        object.__setattr__(self, "gen_times", gen)
        object.__setattr__(self, "recv_times", recv)
        if len(gen) != len(recv):
            raise ValueError("gen_times and recv_times must have equal length")
        if any(b <= a for a, b in zip(gen, gen[1:])):
            raise ValueError("gen_times must be strictly increasing")
        if any(b < a for a, b in zip(recv, recv[1:])):
            raise ValueError("recv_times must be nondecreasing (FCFS)")
        if any(r <= g for g, r in zip(gen, recv)):
            raise ValueError("each recv_time must exceed its gen_time")

    def __len__(self):
        return len(self.gen_times)


@dataclass(frozen=True)
class ObservationWindow:
    """The last m generation times feeding the VoI computation.

    Consecutive intervals are stored explicitly (the random-sampling
    inverse-covariance entries are parameterized by them, not by absolute
    times).  Observed values are optional: the closed-form VoI depends only
    on timestamps, values matter only to empirical estimation.
    """

    gen_times: tuple
    y_values: tuple | None = None
    intervals: tuple = field(init=False)

    def __post_init__(self):
        gen = tuple(float(t) for t in self.gen_times)
        if len(gen) == 0:
            raise ValueError("window needs at least one generation time")
        if any(b <= a for a, b in zip(gen, gen[1:])):
            raise ValueError("gen_times must be strictly increasing")
        object.__setattr__(self, "gen_times", gen)
        object.__setattr__(self, "intervals", tuple(b - a for a, b in zip(gen, gen[1:])))
        if self.y_values is not None:
            y = tuple(float(v) for v in self.y_values)
            if len(y) != len(gen):
                raise ValueError("y_values length must match gen_times")
            object.__setattr__(self, "y_values", y)

    @property
    def m(self) -> int:
        return len(self.gen_times)

    @property
    def last_time(self) -> float:
        return self.gen_times[-1]


def uniform_timeline(dt: float, n: int) -> np.ndarray:
    """Generation times {dt, 2 dt, ..., n dt} of a regular sampler."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return dt * np.arange(1, n + 1, dtype=float)


def poisson_timeline(lam: float, n: int, seed) -> np.ndarray:
    """Generation times of a rate-lam Poisson sampler: cumulative Exp(lam) gaps."""
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.exponential(1.0 / lam, size=n))


def observe(x_values, noise: NoiseModel, seed) -> np.ndarray:
    """Push state values through the channel Y = X + N, N ~ N(0, sigma_n2) i.i.d."""
    x = np.asarray(x_values, dtype=float)
    if noise.sigma_n2 == 0.0:
        return x.copy()
    rng = np.random.default_rng(seed)
    return x + np.sqrt(noise.sigma_n2) * rng.standard_normal(x.shape)


def age_of_information(tl: Timeline, t: float) -> float:
    """Age t - t_k where k indexes the most recent update received by t.

    An update arriving exactly at t counts as received (closed on the left).
    Raises before the first reception: the age is undefined with nothing
    received yet.
    """
    recv = np.asarray(tl.recv_times)
    k = int(np.searchsorted(recv, t, side="right")) - 1
    if k < 0:
        raise ValueError(f"no update received by t={t}")
    return float(t - tl.gen_times[k])


def window_at(tl: Timeline, t: float, m: int | None = None) -> ObservationWindow:
    """Window of the last m updates received by time t (all of them if m is None)."""
    recv = np.asarray(tl.recv_times)
    k = int(np.searchsorted(recv, t, side="right"))
    if k == 0:
        raise ValueError(f"no update received by t={t}")
    lo = 0 if m is None else max(0, k - m)
    return ObservationWindow(gen_times=tl.gen_times[lo:k])


def timeline_to_csv(tl: Timeline, path) -> None:
    """Write a timeline as CSV with columns index, gen_time, recv_time."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "gen_time", "recv_time"])
        for i, (g, r) in enumerate(zip(tl.gen_times, tl.recv_times), start=1):
            w.writerow([i, repr(g), repr(r)])


def timeline_from_csv(path) -> Timeline:
    gen, recv = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            gen.append(float(row["gen_time"]))
            recv.append(float(row["recv_time"]))
    return Timeline(gen_times=tuple(gen), recv_times=tuple(recv))
