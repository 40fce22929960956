"""Cyclic per-offset descent nulling the pattern at a known eavesdropper.

One offset (block) is updated per iteration. The block's kernel value
that minimizes the pattern power at the eavesdropper is a clamped linear
function of the other blocks' kernel values; the offset realizing it is
recovered by linearly interpolating the kernel between the two adjacent
extrema that bracket the wanted value. Every step is guarded: a proposal
that fails to lower the exact power at the eavesdropper is replaced by a
direct one-dimensional refinement of that block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .patterns import (
    ArrayGeometry,
    FieldPoint,
    FoiVector,
    _dirichlet_core,
    dirichlet_kernel,
    phase_terms,
)

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class TargetUnreachable(ValueError):
    """No kernel interval brackets the wanted value."""


@dataclass(frozen=True)
class BcdlaConfig:
    """Settings for the block-descent run.

    epsilon_hz stops the run once a full cycle has been completed and the
    latest block update moved by less than epsilon. initial_offsets_hz
    fixes the starting point; otherwise it is drawn uniformly in bounds
    from rng_seed. half_cross_term selects the printed per-block update
    rule (cross terms halved); the alternative uses the full gradient of
    the quadratic power form.
    """

    bound_hz: float
    epsilon_hz: float = 1.0
    max_iterations: int | None = None
    initial_offsets_hz: tuple[float, ...] | None = None
    rng_seed: int = 1
    half_cross_term: bool = True

    def __post_init__(self) -> None:
        if self.bound_hz <= 0.0:
            raise ValueError("bound_hz must be positive")
        if self.epsilon_hz <= 0.0:
            raise ValueError("epsilon_hz must be positive")


@dataclass(frozen=True)
class KernelPeak:
    """A local extremum of the kernel over the admissible offset interval.

    boundary marks the interval endpoints, included so that values
    attainable only on a clipped outermost lobe can still be bracketed.
    """

    delta_f_hz: float
    gain: float
    boundary: bool = False


@dataclass(frozen=True)
class KernelInterval:
    """Adjacent peak pair used for the linear kernel approximation."""

    neg_peak: KernelPeak
    pos_peak: KernelPeak

    def __post_init__(self) -> None:
        if not self.neg_peak.delta_f_hz < self.pos_peak.delta_f_hz:
            raise ValueError("interval endpoints must be ordered by offset")
        if self.pos_peak.gain == self.neg_peak.gain:
            raise ValueError("degenerate interval: zero slope")

    @property
    def slope(self) -> float:
        return (self.pos_peak.gain - self.neg_peak.gain) / (
            self.pos_peak.delta_f_hz - self.neg_peak.delta_f_hz
        )

    @property
    def intercept(self) -> float:
        return self.neg_peak.gain - self.slope * self.neg_peak.delta_f_hz


def _eve_coefficients(geom, eve, target):
    a, b = phase_terms(geom, eve.cos_theta, eve.range_m, target)
    return float(a), float(b)


def kernel_peaks(
    geom: ArrayGeometry, eve: FieldPoint, target: FieldPoint, bound_hz: float
) -> list[KernelPeak]:
    """All kernel extrema over [-bound, bound], plus flagged endpoints.

    Dense sampling (at least eight points per kernel lobe) brackets each
    extremum; golden-section refinement narrows it to 1e-12 of the span.
    Requires the eavesdropper range to differ from the target's, otherwise
    the kernel does not depend on the offset.
    """
    a, b = _eve_coefficients(geom, eve, target)
    if b == 0.0:
        raise ValueError(
            "eavesdropper at the target range: kernel is constant in the offset"
        )
    if bound_hz <= 0.0:
        raise ValueError("bound_hz must be positive")
    n_sub = geom.elements_per_subarray

    def gain(f):
        return dirichlet_kernel(a - b * np.asarray(f, dtype=float), n_sub)

    lobe_width = np.pi / (n_sub * abs(b))
    step = lobe_width / 8.0
    count = max(int(np.ceil(2.0 * bound_hz / step)), 8)
    xs = np.linspace(-bound_hz, bound_hz, count + 1)
    ys = gain(xs)
    d = np.diff(ys)
    turning = d[:-1] * d[1:] < 0.0
    idx = np.nonzero(turning)[0] + 1
    peaks: list[KernelPeak] = []
    if idx.size:
        lo = xs[idx - 1]
        hi = xs[idx + 1]
        maximize = d[idx - 1] > 0.0
        sign = np.where(maximize, 1.0, -1.0)
        tol = 1e-12 * 2.0 * bound_hz
        while np.max(hi - lo) > tol:
            m1 = hi - _GOLDEN * (hi - lo)
            m2 = lo + _GOLDEN * (hi - lo)
            f1 = sign * gain(m1)
            f2 = sign * gain(m2)
            keep_right = f2 >= f1
            lo = np.where(keep_right, m1, lo)
            hi = np.where(keep_right, hi, m2)
        mid = 0.5 * (lo + hi)
        for f in mid:
            peaks.append(KernelPeak(float(f), float(gain(f))))
    peaks.append(KernelPeak(float(-bound_hz), float(gain(-bound_hz)), boundary=True))
    peaks.append(KernelPeak(float(bound_hz), float(gain(bound_hz)), boundary=True))
    peaks.sort(key=lambda p: p.delta_f_hz)
    return peaks


def attainable_gain_bounds(peaks: list[KernelPeak]) -> tuple[float, float]:
    """Extrema of the kernel over the admissible interval."""
    gains = [p.gain for p in peaks]
    return min(gains), max(gains)


def block_target(
    geom: ArrayGeometry,
    foi: FoiVector,
    m: int,
    eve: FieldPoint,
    target: FieldPoint,
    g_min: float = -1.0,
    g_max: float = 1.0,
    half_cross_term: bool = True,
) -> float:
    """Kernel value wanted for block m to minimize the power at the eavesdropper.

    The unclamped optimum of the per-block quadratic is minus half the
    phase-weighted sum of the other blocks' kernel values; pass
    half_cross_term=False for the full-gradient variant (no halving).
    The result is projected onto the attainable [g_min, g_max].
    """
    if not 0 <= m < len(foi):
        raise ValueError("block index out of range")
    a, b = _eve_coefficients(geom, eve, target)
    if a == 0.0 and b == 0.0:
        raise ValueError("eavesdropper at the target: objective constant in the offset")
    n_sub = geom.elements_per_subarray
    offsets = foi.as_array()
    others = np.delete(np.arange(len(foi)), m)
    g_other = _dirichlet_core(a - b * offsets[others], n_sub)
    coupling = np.cos(2.0 * n_sub * a * (others - m))
    total = float(coupling @ g_other)
    raw = -total / 2.0 if half_cross_term else -total
    return float(np.clip(raw, g_min, g_max))


def select_interval(
    peaks: list[KernelPeak], target_g: float, current_offset_hz: float
) -> KernelInterval:
    """Adjacent peak pair bracketing target_g, nearest the current offset.

    The kernel is monotone between consecutive extrema, so a bracketing
    pair pins the wanted value inside it. Ties are broken toward the
    interval closest to a zero offset.
    """
    if not peaks:
        raise ValueError("no peaks supplied")
    ordered = sorted(peaks, key=lambda p: p.delta_f_hz)
    best: KernelInterval | None = None
    best_key: tuple[float, float] | None = None
    for left, right in zip(ordered, ordered[1:]):
        lo_g, hi_g = sorted((left.gain, right.gain))
        if not lo_g <= target_g <= hi_g or left.gain == right.gain:
            continue
        if current_offset_hz < left.delta_f_hz:
            dist = left.delta_f_hz - current_offset_hz
        elif current_offset_hz > right.delta_f_hz:
            dist = current_offset_hz - right.delta_f_hz
        else:
            dist = 0.0
        center = 0.5 * abs(left.delta_f_hz + right.delta_f_hz)
        key = (dist, center)
        if best_key is None or key < best_key:
            best = KernelInterval(left, right)
            best_key = key
    if best is None:
        raise TargetUnreachable(
            "target gain unreachable; clamp to the nearest attainable extremum"
        )
    return best


def invert_linear(
    interval: KernelInterval, target_g: float, bound_hz: float | None = None
) -> float:
    """Offset whose linearized kernel value equals target_g.

    The result is kept inside the interval; an explicit bound clamps it
    further. Interval endpoints map exactly to themselves.
    """
    slope = interval.slope
    if slope == 0.0:
        raise ValueError("degenerate interval: zero slope")
    out = (target_g - interval.intercept) / slope
    out = float(np.clip(out, interval.neg_peak.delta_f_hz, interval.pos_peak.delta_f_hz))
    if bound_hz is not None:
        out = float(np.clip(out, -bound_hz, bound_hz))
    return out


@dataclass(frozen=True)
class BcdlaTraceEntry:
    iteration: int
    block: int
    offset_change_hz: float
    objective_power: float


def _block_objective(geom, offsets, m, a, b):
    """Pattern power at the eavesdropper as a 1-D function of block m."""
    n_sub = geom.elements_per_subarray
    m_count = offsets.size
    coeff = (m_count - 1 - 2 * np.arange(m_count)) * n_sub
    g_all = _dirichlet_core(np.atleast_1d(a - b * offsets), n_sub)
    rest = (np.exp(1j * coeff * a) * g_all).sum() - np.exp(1j * coeff[m] * a) * g_all[m]

    def value(f):
        g = _dirichlet_core(np.atleast_1d(a - b * np.asarray(f, dtype=float)), n_sub)
        return np.abs(rest + np.exp(1j * coeff[m] * a) * g) ** 2 / m_count**2

    return value


def _refine_block(objective, bound_hz: float) -> float:
    """Dense scan plus golden polish of the 1-D block objective."""
    xs = np.linspace(-bound_hz, bound_hz, 2001)
    ys = objective(xs)
    i = int(np.argmin(ys))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, xs.size - 1)]
    for _ in range(70):
        m1 = hi - _GOLDEN * (hi - lo)
        m2 = lo + _GOLDEN * (hi - lo)
        if objective(np.array([m1]))[0] <= objective(np.array([m2]))[0]:
            hi = m2
        else:
            lo = m1
    return float(0.5 * (lo + hi))


def bcdla_optimize(
    geom: ArrayGeometry,
    target: FieldPoint,
    eve: FieldPoint,
    config: BcdlaConfig,
) -> tuple[FoiVector, list[BcdlaTraceEntry]]:
    """Minimize the pattern power at a known eavesdropper location.

    Blocks are visited cyclically; the run stops once a block update moves
    by less than epsilon after every block has been visited at least once,
    or at the iteration cap. The trace records the per-iteration offset
    change and the exact power at the eavesdropper, which is non-increasing.
    """
    m_count = geom.subarrays
    a, b = _eve_coefficients(geom, eve, target)
    if a == 0.0 and b == 0.0:
        raise ValueError("eavesdropper coincides with the target")
    peaks = kernel_peaks(geom, eve, target, config.bound_hz)
    g_min, g_max = attainable_gain_bounds(peaks)
    r_stop = config.max_iterations if config.max_iterations is not None else 50 * m_count
    if r_stop < m_count:
        raise ValueError("iteration cap must allow at least one full cycle")

    if config.initial_offsets_hz is not None:
        offsets = np.asarray(config.initial_offsets_hz, dtype=float)
        if offsets.size != m_count:
            raise ValueError("initial offset vector length does not match subarray count")
        if np.any(np.abs(offsets) > config.bound_hz * (1.0 + 1e-12)):
            raise ValueError("initial offsets exceed the bound")
        offsets = offsets.copy()
    else:
        rng = np.random.default_rng(config.rng_seed)
        offsets = rng.uniform(-config.bound_hz, config.bound_hz, m_count)

    objective = _block_objective(geom, offsets, 0, a, b)
    current = float(objective(np.array([offsets[0]]))[0])
    trace: list[BcdlaTraceEntry] = []
    for r in range(1, r_stop + 1):
        m = (r - 1) % m_count
        foi = FoiVector(tuple(offsets), config.bound_hz)
        wanted = block_target(
            geom, foi, m, eve, target, g_min, g_max, config.half_cross_term
        )
        try:
            interval = select_interval(peaks, wanted, float(offsets[m]))
            proposal = invert_linear(interval, wanted, config.bound_hz)
        except TargetUnreachable:
            gains = np.array([p.gain for p in peaks])
            proposal = peaks[int(np.argmin(np.abs(gains - wanted)))].delta_f_hz
        block_obj = _block_objective(geom, offsets, m, a, b)
        proposed = float(block_obj(np.array([proposal]))[0])
        if proposed > current:
            refined = _refine_block(block_obj, config.bound_hz)
            refined_val = float(block_obj(np.array([refined]))[0])
            if refined_val <= current:
                proposal, proposed = refined, refined_val
            else:
                proposal, proposed = float(offsets[m]), current
        change = abs(proposal - float(offsets[m]))
        offsets[m] = proposal
        current = proposed
        trace.append(BcdlaTraceEntry(r, m, change, current))
        if change < config.epsilon_hz and r >= m_count:
            break
    return FoiVector(tuple(offsets), config.bound_hz), trace
