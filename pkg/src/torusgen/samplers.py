"""Random-variate generators for circular densities and the torus surface.

Four engines are provided:

- ``eau_sample``: a rejection-free probabilistic transform producing
  area-uniform torus angles (exact-area-uniform, "eau").
- ``aur_sample``: the classic acceptance-rejection baseline for the same
  poloidal marginal, accepting with probability (1 + a*cos(x))/2 ("aur").
- ``har_build`` / ``har_sample`` / ``har_sample_batch``: histogram
  acceptance-rejection ("har") under a step-function envelope of per-cell
  density suprema, in streaming and batched form.  Works for any bounded
  circular density.
- ``vmbfr_sample``: the Best-Fisher rejection sampler for von Mises draws
  with a wrapped-Cauchy-shaped envelope ("vmbfr").

All generators consume a reproducible ``RngStream``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .distributions import CircularDensity
from .geometry import TWO_PI, TorusGeometry, embed_angles, wrap_angle

__all__ = [
    "RngStream",
    "AcceptanceReport",
    "HarEnvelope",
    "eau_transform",
    "eau_sample",
    "aur_sample",
    "har_build",
    "har_sample",
    "har_sample_batch",
    "vmbfr_sample",
    "torus_sample",
    "uniform_angles",
    "har_marginal_sampler",
    "uniform_marginal_sampler",
]

_ALGORITHMS = {"pcg64": np.random.PCG64, "philox": np.random.Philox}


@dataclass
class RngStream:
    """A named, reproducible source of uniforms.

    The same (seed, algorithm, spawn_key) triple always yields the same draw
    sequence.  ``substream`` derives statistically independent child streams
    from the master seed and a task index, so grid cells can be reordered or
    parallelized without perturbing each other.
    """

    seed: int
    algorithm: str = "pcg64"
    spawn_key: tuple[int, ...] = ()
    _generator: np.random.Generator | None = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; choose from {sorted(_ALGORITHMS)}"
            )
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError(f"seed must fit in an unsigned 64-bit int, got {self.seed}")

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
            self._generator = np.random.Generator(_ALGORITHMS[self.algorithm](seq))
        return self._generator

    def substream(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.algorithm, self.spawn_key + (int(index),))


@dataclass(frozen=True)
class AcceptanceReport:
    """Bookkeeping for one sampling run: what was proposed, what survived."""

    sampler: str
    params: dict
    proposed: int
    accepted: int
    cell_proposed: np.ndarray | None = None
    cell_accepted: np.ndarray | None = None

    def __post_init__(self):
        if self.accepted > self.proposed:
            raise ValueError(
                f"accepted ({self.accepted}) cannot exceed proposed ({self.proposed})"
            )

    @property
    def rate_percent(self) -> float:
        return 100.0 * self.accepted / self.proposed


def eau_transform(x, u, aspect: float):
    """Turn uniform angles into area-uniform poloidal angles, no rejection.

    Keeps x where u < (1 + a*cos(x))/2 and otherwise reflects it, to pi - x
    for x <= pi and to 3*pi - x beyond.  The output has CDF
    (y + a*sin(y))/(2*pi); every input lands in exactly one branch.
    """
    if not (0.0 < aspect <= 1.0):
        raise ValueError(f"aspect ratio must lie in (0, 1], got {aspect}")
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    keep = u < 0.5 * (1.0 + aspect * np.cos(x))
    reflected = np.where(x <= np.pi, np.pi - x, 3.0 * np.pi - x)
    return wrap_angle(np.where(keep, x, reflected))


def eau_sample(n: int, aspect: float, rng: RngStream) -> np.ndarray:
    """Draw n area-uniform angle pairs; consumes exactly 3n uniforms.

    theta1 is uniform on [0, 2*pi); theta2 comes from ``eau_transform``.
    Returns an (n, 2) array.  Acceptance is structurally 100%.
    """
    _check_count(n)
    gen = rng.generator
    theta1 = gen.uniform(0.0, TWO_PI, n)
    x = gen.uniform(0.0, TWO_PI, n)
    u = gen.random(n)
    return np.column_stack([theta1, eau_transform(x, u, aspect)])


def aur_sample(n: int, aspect: float, rng: RngStream):
    """Acceptance-rejection baseline for the area-uniform poloidal marginal.

    Proposes x uniform on [0, 2*pi) and accepts with probability
    (1 + a*cos(x))/2, which averages one half regardless of the aspect ratio.
    Returns (n accepted angles, AcceptanceReport).
    """
    _check_count(n)
    gen = rng.generator
    out = np.empty(n)
    got = 0
    proposed = 0
    while got < n:
        m = max(256, int(2.2 * (n - got)) + 32)
        x = gen.uniform(0.0, TWO_PI, m)
        accept = gen.random(m) < 0.5 * (1.0 + aspect * np.cos(x))
        hits = int(accept.sum())
        if got + hits >= n:
            cut = int(np.nonzero(accept)[0][n - got - 1]) + 1
            x, accept = x[:cut], accept[:cut]
        taken = x[accept]
        out[got : got + taken.size] = taken
        got += taken.size
        proposed += x.size
    report = AcceptanceReport("aur", {"a": aspect}, proposed, n)
    return out, report


@dataclass(frozen=True, eq=False)
class HarEnvelope:
    """Step-function envelope: per-cell suprema of a density on equal cells.

    The proposal density is sum_i heights[i] * 1{cell i} / (bin_length *
    sum(heights)); ``global_m`` = bin_length * sum(heights) >= 1 is the
    envelope constant, and 1/global_m the expected acceptance rate.
    """

    support: tuple[float, float]
    heights: np.ndarray

    def __post_init__(self):
        lo, hi = self.support
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"support must be a finite interval, got {self.support}")
        heights = np.asarray(self.heights, dtype=float)
        if heights.ndim != 1 or heights.size == 0:
            raise ValueError("heights must be a non-empty 1-D array")
        if not np.all(np.isfinite(heights)) or np.any(heights < 0):
            raise ValueError("heights must be finite and non-negative")
        total = heights.sum()
        if total <= 0:
            raise ValueError("at least one cell height must be positive")
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "_cum_probs", np.cumsum(heights / total))
        object.__setattr__(self, "_bin_length", (hi - lo) / heights.size)

    @property
    def k(self) -> int:
        return self.heights.size

    @property
    def bin_length(self) -> float:
        return self._bin_length

    @property
    def cell_probs(self) -> np.ndarray:
        return np.diff(self._cum_probs, prepend=0.0)

    @property
    def global_m(self) -> float:
        return float(self.bin_length * self.heights.sum())

    def cell_index(self, x) -> np.ndarray:
        lo, _ = self.support
        idx = np.floor((np.asarray(x, dtype=float) - lo) / self.bin_length).astype(int)
        return np.clip(idx, 0, self.k - 1)

    def height_at(self, x) -> np.ndarray:
        return self.heights[self.cell_index(x)]


def har_build(
    density: CircularDensity,
    partitions: int,
    support: tuple[float, float] | None = None,
    endpoint_only: bool = False,
) -> HarEnvelope:
    """Build the step envelope from cell-edge values plus interior maxima.

    On each cell the density is monotone unless a stationary point falls
    inside, so the supremum is the larger edge value lifted, where needed, to
    the density value at the stationary point.  Heights carry a relative
    headroom of 1e-12 so that rounding noise in the density evaluation can
    never poke above the step function; rejection sampling stays exact for
    any dominating heights, and the envelope constant moves only in the
    twelfth decimal.  ``endpoint_only`` skips the interior lift; it exists to
    demonstrate that the dominance check catches envelopes built that way.
    """
    if partitions < 1:
        raise ValueError(f"partitions must be >= 1, got {partitions}")
    lo, hi = support if support is not None else density.support
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"support must be a finite interval, got {(lo, hi)}")
    edges = np.linspace(lo, hi, partitions + 1)
    values = np.asarray(density.evaluate(edges), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("density produced non-finite values on the cell edges")
    heights = np.maximum(values[:-1], values[1:])
    if not endpoint_only:
        width = (hi - lo) / partitions
        for point in density.stationary_points:
            point = lo + float(np.mod(point - lo, hi - lo))
            idx = min(int((point - lo) / width), partitions - 1)
            heights[idx] = max(heights[idx], float(density.evaluate(point)))
        heights *= 1.0 + 1e-12
    return HarEnvelope((lo, hi), heights)


def har_sample(
    density: CircularDensity, envelope: HarEnvelope, n: int, rng: RngStream
):
    """Streaming histogram acceptance-rejection: draw until n are accepted.

    Each proposal picks a cell by its height share, a position uniformly
    inside it, and keeps the position with probability density/height.
    Returns (n samples, AcceptanceReport with per-cell counters).
    """
    _check_count(n)
    gen = rng.generator
    lo, _ = envelope.support
    width = envelope.bin_length
    heights = envelope.heights
    cum = envelope._cum_probs
    out = np.empty(n)
    cell_proposed = np.zeros(envelope.k, dtype=np.int64)
    cell_accepted = np.zeros(envelope.k, dtype=np.int64)
    got = 0
    proposed = 0
    while got < n:
        m = max(256, int(1.1 * (n - got) * envelope.global_m) + 32)
        u_cell = gen.random(m)
        u_pos = gen.random(m)
        u_acc = gen.random(m)
        cells = np.minimum(
            np.searchsorted(cum, u_cell, side="right"), envelope.k - 1
        )
        x = lo + (cells + u_pos) * width
        accept = u_acc * heights[cells] < density.evaluate(x)
        hits = int(accept.sum())
        if got + hits >= n:
            cut = int(np.nonzero(accept)[0][n - got - 1]) + 1
            cells, x, accept = cells[:cut], x[:cut], accept[:cut]
        taken = x[accept]
        out[got : got + taken.size] = taken
        got += taken.size
        proposed += x.size
        cell_proposed += np.bincount(cells, minlength=envelope.k)
        cell_accepted += np.bincount(cells[accept], minlength=envelope.k)
    report = AcceptanceReport(
        "har",
        {"partitions": envelope.k},
        proposed,
        n,
        cell_proposed=cell_proposed,
        cell_accepted=cell_accepted,
    )
    return out, report


def har_sample_batch(
    density: CircularDensity, envelope: HarEnvelope, n: int, rng: RngStream
):
    """Batched histogram acceptance-rejection with reject recycling.

    Plans floor(n * global_m) + k proposals, splits them across cells in
    proportion to the envelope masses, and sweeps the cells left to right:
    rejected positions are shifted one bin length into the next cell and
    retested there instead of being discarded.  Survivors past the last cell
    wrap once into the first; any remaining shortfall is topped up by the
    streaming sampler.  Returns exactly n samples, randomly permuted, plus a
    report counting every fresh position draw once.
    """
    _check_count(n)
    gen = rng.generator
    lo, hi = envelope.support
    width = envelope.bin_length
    heights = envelope.heights
    planned = np.floor(
        (int(np.floor(n * envelope.global_m)) + envelope.k) * envelope.cell_probs
    ).astype(np.int64)
    chunks = []
    carried = np.empty(0)
    proposed = 0
    accepted = 0
    for i in range(envelope.k):
        fresh = max(int(planned[i]) - carried.size, 0)
        proposed += fresh
        x = np.concatenate([carried, lo + (i + gen.random(fresh)) * width])
        if x.size == 0:
            carried = x
            continue
        accept = gen.random(x.size) * heights[i] < density.evaluate(x)
        chunks.append(x[accept])
        accepted += int(accept.sum())
        carried = x[~accept] + width
    if carried.size:
        x = carried - (hi - lo)
        accept = gen.random(x.size) * heights[0] < density.evaluate(x)
        chunks.append(x[accept])
        accepted += int(accept.sum())
    samples = np.concatenate(chunks) if chunks else np.empty(0)
    if samples.size < n:
        top_up, extra = har_sample(density, envelope, n - samples.size, rng)
        samples = np.concatenate([samples, top_up])
        proposed += extra.proposed
        accepted += extra.accepted
    samples = samples[gen.permutation(samples.size)][:n]
    report = AcceptanceReport(
        "har-batch", {"partitions": envelope.k}, proposed, accepted
    )
    return samples, report


def vmbfr_sample(n: int, mu: float, kappa: float, rng: RngStream):
    """Best-Fisher rejection sampler for the von Mises distribution.

    Proposals follow a wrapped-Cauchy-shaped envelope through the smooth
    transform z = cos(pi*u); acceptance uses the quick polynomial bound first
    and the exact logarithmic bound only where that is inconclusive.
    Returns (n samples, AcceptanceReport).
    """
    _check_count(n)
    if not (np.isfinite(kappa) and kappa > 0):
        raise ValueError(f"kappa must be positive, got {kappa}")
    gen = rng.generator
    tau = 1.0 + np.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - np.sqrt(2.0 * tau)) / (2.0 * kappa)
    s = (1.0 + rho * rho) / (2.0 * rho)
    out = np.empty(n)
    got = 0
    proposed = 0
    while got < n:
        m = max(256, int(1.7 * (n - got)) + 32)
        u1 = gen.random(m)
        u2 = gen.random(m)
        z = np.cos(np.pi * u1)
        w = (1.0 + s * z) / (s + z)
        y = kappa * (s - w)
        with np.errstate(divide="ignore"):
            accept = (y * (2.0 - y) - u2 > 0.0) | (np.log(y / u2) + 1.0 - y >= 0.0)
        hits = int(accept.sum())
        if got + hits >= n:
            cut = int(np.nonzero(accept)[0][n - got - 1]) + 1
            w, accept = w[:cut], accept[:cut]
        taken = w[accept]
        signs = np.where(gen.random(taken.size) < 0.5, -1.0, 1.0)
        out[got : got + taken.size] = mu + signs * np.arccos(np.clip(taken, -1.0, 1.0))
        got += taken.size
        proposed += accept.size
    report = AcceptanceReport("vmbfr", {"mu": mu, "kappa": kappa}, proposed, n)
    return wrap_angle(out), report


def torus_sample(
    sample_theta1: Callable,
    sample_theta2: Callable,
    n: int,
    rng: RngStream,
    geometry: TorusGeometry,
):
    """Compose marginal samplers into surface points.

    ``sample_theta2(n, rng)`` draws the poloidal angles first;
    ``sample_theta1(n, rng, theta2=...)`` then draws the toroidal angles and
    may condition on them (independent samplers simply ignore the keyword).
    Returns (angle pairs (n, 2), embedded points (n, 3)).
    """
    _check_count(n)
    theta2 = wrap_angle(np.asarray(sample_theta2(n, rng), dtype=float))
    theta1 = wrap_angle(np.asarray(sample_theta1(n, rng, theta2=theta2), dtype=float))
    pairs = np.column_stack([theta1, theta2])
    return pairs, embed_angles(theta1, theta2, geometry)


def uniform_angles(n: int, rng: RngStream) -> np.ndarray:
    """Flat-torus baseline: both angles uniform, ignoring surface curvature."""
    _check_count(n)
    return rng.generator.uniform(0.0, TWO_PI, (n, 2))


def uniform_marginal_sampler() -> Callable:
    """A marginal sampler drawing uniform angles; fits ``torus_sample``."""

    def draw(n, rng, theta2=None):
        return rng.generator.uniform(0.0, TWO_PI, n)

    return draw


def har_marginal_sampler(density: CircularDensity, partitions: int = 500) -> Callable:
    """A marginal sampler drawing from ``density`` via a step envelope."""
    envelope = har_build(density, partitions)

    def draw(n, rng, theta2=None):
        return har_sample(density, envelope, n, rng)[0]

    return draw


def _check_count(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"sample count must be a positive integer, got {n!r}")
