"""Geometric structure of subarray-sum beampatterns.

The angle-range plane splits into three regions by how many subarray
mainlobe strips cover a point: all of them (main region, the desired
angle-range cell), some (mixed region), or none (pure sidelobe region).
The peak sidelobe always sits in the mixed region, on a lattice of
phase-aligned directions crossed by subarray mainlobe lines; enumerating
and refining those crossings gives a fast peak-sidelobe search.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .patterns import (
    SPEED_OF_LIGHT,
    _dirichlet_core,
    ArrayGeometry,
    FieldPoint,
    FoiVector,
    phase_terms,
)


class RegionLabel(enum.Enum):
    """Coverage class of a field point by subarray mainlobe strips."""

    MAIN = "main"
    MIXED = "mixed"
    SIDELOBE = "sidelobe"


@dataclass(frozen=True)
class PeakCandidate:
    """A potential sidelobe-peak location.

    cos_theta is absolute (already offset from the target direction).
    range_m is None for candidates generated by a zero-offset subarray,
    whose mainlobe ridge runs along the target direction at every range.
    source is the (lattice index n, subarray index m) pair that produced
    the candidate.
    """

    cos_theta: float
    range_m: float | None
    source: tuple[int, int]


def rotated_angle(geom: ArrayGeometry, delta_f_hz: float) -> float:
    """Tilt of the single-offset mainlobe line in the (cos theta, R) plane.

    Returns arctan(f_c * d / delta_f); a zero offset gives pi/2 (the
    mainlobe line is parallel to the range axis).
    """
    if delta_f_hz == 0.0:
        return np.pi / 2.0
    return float(np.arctan(geom.carrier_hz * geom.spacing_m / delta_f_hz))


def mainlobe_locus_range(
    geom: ArrayGeometry, delta_f_hz: float, cos_theta_offset: float
) -> float:
    """Range offset R - R_T of the tilted mainlobe line at a given cos-theta offset."""
    if delta_f_hz == 0.0:
        raise ValueError(
            "zero offset: the mainlobe locus is the vertical line theta = theta_T"
        )
    return geom.carrier_hz * geom.spacing_m * cos_theta_offset / delta_f_hz


def pattern_and_count(geom: ArrayGeometry, offsets_hz, cos_theta, range_m, target: FieldPoint):
    """Pattern power and covering-strip count, evaluated in one pass.

    Broadcasts over flat coordinate arrays; returns (power, count) where
    count is the number of subarray mainlobe strips covering each point.
    """
    offsets = np.asarray(offsets_hz, dtype=float)
    m_count = offsets.size
    n_sub = geom.elements_per_subarray
    a, b = phase_terms(geom, cos_theta, range_m, target)
    a = np.atleast_1d(a)
    b = np.atleast_1d(b)
    a, b = np.broadcast_arrays(a, b)
    x = a[None, :] - b[None, :] * offsets[:, None]
    g = _dirichlet_core(x, n_sub)
    coeff = (m_count - 1 - 2 * np.arange(m_count)) * n_sub
    phase = np.exp(1j * coeff[:, None] * a[None, :])
    field = (phase * g).sum(axis=0) / m_count
    power = np.abs(field) ** 2
    principal = x - np.pi * np.round(x / np.pi)
    count = (np.abs(principal) < np.pi / n_sub).sum(axis=0)
    return power, count


def strip_count(geom: ArrayGeometry, offsets_hz, cos_theta, range_m, target: FieldPoint):
    """Number of subarray mainlobe strips covering each point.

    A point lies in subarray m's strip when the principal value of
    a - b*offset_m is within pi/N (the first-null half-width of the
    order-N kernel). Broadcasts over array coordinates.
    """
    offsets = np.asarray(offsets_hz, dtype=float)
    a, b = phase_terms(geom, cos_theta, range_m, target)
    half_width = np.pi / geom.elements_per_subarray
    count = np.zeros(np.broadcast(a, b).shape, dtype=int)
    for f in offsets:
        x = a - b * f
        principal = x - np.pi * np.round(x / np.pi)
        count = count + (np.abs(principal) < half_width)
    return count


def classify_region(
    geom: ArrayGeometry, foi: FoiVector, point: FieldPoint, target: FieldPoint
) -> RegionLabel:
    """Label a point as main, mixed or sidelobe region for the given offsets."""
    count = int(strip_count(geom, foi.as_array(), point.cos_theta, point.range_m, target))
    if count == len(foi):
        return RegionLabel.MAIN
    if count == 0:
        return RegionLabel.SIDELOBE
    return RegionLabel.MIXED


def is_antisymmetric(foi: FoiVector, rel_tol: float = 1e-9) -> bool:
    """True when offset_m = -offset_{M-1-m} for every m."""
    arr = foi.as_array()
    scale = max(1.0, float(np.abs(arr).max(initial=0.0)))
    return bool(np.all(np.abs(arr + arr[::-1]) <= rel_tol * scale))


def fold_quadrant(
    point: FieldPoint, target: FieldPoint, foi: FoiVector | None = None
) -> FieldPoint:
    """Map a point to its canonical image in one quadrant about the target.

    Valid only under antisymmetric offsets, for which the pattern magnitude
    is identical at (+/-dcos, +/-dR). When the positive cos-theta image
    leaves [-1, 1] the mirrored direction is used instead.
    """
    if foi is not None and not is_antisymmetric(foi):
        raise ValueError("folding invalid for non-antisymmetric offsets; evaluate the full plane")
    dcos = point.cos_theta - target.cos_theta
    dr = point.range_m - target.range_m
    cos_folded = target.cos_theta + abs(dcos)
    if cos_folded > 1.0:
        cos_folded = target.cos_theta - abs(dcos)
    theta = float(np.arccos(np.clip(cos_folded, -1.0, 1.0)))
    return FieldPoint(theta, target.range_m + abs(dr))


def _lattice(geom: ArrayGeometry) -> tuple[float, int]:
    """Cos-theta lattice (step, max index) of phase-aligned directions."""
    ratio = geom.elements_per_subarray * geom.spacing_m / geom.wavelength_m
    if geom.subarrays % 2 == 1:
        return 1.0 / ratio, int(np.floor(ratio))
    return 0.5 / ratio, int(np.floor(2.0 * ratio))


def sidelobe_candidates(
    geom: ArrayGeometry,
    foi: FoiVector,
    target: FieldPoint,
    range_min_m: float,
    range_max_m: float,
) -> list[PeakCandidate]:
    """Enumerate potential sidelobe-peak locations inside a range window.

    Candidates sit where a subarray mainlobe line crosses a phase-aligned
    lattice direction. The kernel of each subarray repeats every
    c/offset_m in range, so every periodic copy of the mainlobe line that
    falls inside the window is enumerated, not only the central one.
    """
    step, n_max = _lattice(geom)
    out: list[PeakCandidate] = []
    for n in range(-n_max, n_max + 1):
        cos_off = n * step
        cos_abs = target.cos_theta + cos_off
        if abs(cos_abs) > 1.0:
            continue
        for m, f in enumerate(foi.offsets_hz):
            if f == 0.0:
                if n == 0:
                    out.append(PeakCandidate(cos_abs, None, (n, m)))
                continue
            base = geom.carrier_hz * geom.spacing_m * cos_off / f
            period = SPEED_OF_LIGHT / f
            # solve range_min <= R_T + base - k*period <= range_max for integer k
            lo = (target.range_m + base - range_max_m) / period
            hi = (target.range_m + base - range_min_m) / period
            if lo > hi:
                lo, hi = hi, lo
            for k in range(int(np.ceil(lo)), int(np.floor(hi)) + 1):
                out.append(
                    PeakCandidate(cos_abs, target.range_m + base - k * period, (n, m))
                )
    return out


@dataclass(frozen=True)
class SidelobeSearch:
    """Window and resolution settings for the peak-sidelobe search."""

    target: FieldPoint
    range_min_m: float
    range_max_m: float
    theta_min_deg: float = 0.0
    theta_max_deg: float = 179.0
    safety_theta_step_deg: float = 1.0
    safety_range_step_m: float | None = None  # default: target range / 100
    ray_range_step_m: float | None = None  # default: safety range step
    refine_tol: float = 1e-4
    refine_top: int = 64

    def __post_init__(self) -> None:
        if self.range_min_m <= 0.0 or self.range_max_m <= self.range_min_m:
            raise ValueError("range window must satisfy 0 < range_min < range_max")
        if self.theta_max_deg <= self.theta_min_deg:
            raise ValueError("empty theta window")

    @property
    def resolved_safety_range_step(self) -> float:
        if self.safety_range_step_m is not None:
            return self.safety_range_step_m
        return self.target.range_m / 100.0

    @property
    def resolved_ray_step(self) -> float:
        if self.ray_range_step_m is not None:
            return self.ray_range_step_m
        return self.resolved_safety_range_step


def _candidate_arrays(geom, offsets, target, search):
    """Expanded candidate coordinates plus per-point refinement scales."""
    cos_list: list[np.ndarray] = []
    r_list: list[np.ndarray] = []
    rstep_list: list[np.ndarray] = []
    step, n_max = _lattice(geom)
    n_sub = geom.elements_per_subarray
    ray_step = search.resolved_ray_step
    rmin, rmax = search.range_min_m, search.range_max_m
    cos_lo = np.cos(np.deg2rad(search.theta_max_deg))
    cos_hi = np.cos(np.deg2rad(search.theta_min_deg))
    for m, f in enumerate(offsets):
        if f == 0.0:
            cos_abs = target.cos_theta
            if cos_lo <= cos_abs <= cos_hi:
                rays = np.arange(rmin, rmax + 0.5 * ray_step, ray_step)
                cos_list.append(np.full(rays.size, cos_abs))
                r_list.append(rays)
                rstep_list.append(np.full(rays.size, 0.5 * ray_step))
            continue
        period = SPEED_OF_LIGHT / f
        lobe_halfwidth_r = abs(period) / n_sub
        for n in range(-n_max, n_max + 1):
            cos_off = n * step
            cos_abs = target.cos_theta + cos_off
            if not (-1.0 <= cos_abs <= 1.0 and cos_lo <= cos_abs <= cos_hi):
                continue
            base = target.range_m + geom.carrier_hz * geom.spacing_m * cos_off / f
            lo = (base - rmax) / period
            hi = (base - rmin) / period
            if lo > hi:
                lo, hi = hi, lo
            ks = np.arange(int(np.ceil(lo)), int(np.floor(hi)) + 1)
            if ks.size == 0:
                continue
            rs = base - ks * period
            cos_list.append(np.full(rs.size, cos_abs))
            r_list.append(rs)
            rstep_list.append(np.full(rs.size, 0.5 * lobe_halfwidth_r))
    if not cos_list:
        empty = np.zeros(0)
        return empty, empty.copy(), empty.copy()
    return np.concatenate(cos_list), np.concatenate(r_list), np.concatenate(rstep_list)


def _masked_power(geom, offsets, target, search, cos_v, r_v):
    """Pattern power with points outside the window or inside the main region masked."""
    power, count = pattern_and_count(geom, offsets, cos_v, r_v, target)
    cos_lo = np.cos(np.deg2rad(search.theta_max_deg))
    cos_hi = np.cos(np.deg2rad(search.theta_min_deg))
    bad = (
        (count == len(offsets))
        | (r_v < search.range_min_m)
        | (r_v > search.range_max_m)
        | (cos_v < cos_lo)
        | (cos_v > cos_hi)
        | (np.abs(cos_v) > 1.0)
    )
    return np.where(bad, -np.inf, power)


_MOVES = np.array([(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)])


def _pattern_search(geom, offsets, target, search, cos_v, r_v, step_cos, step_r):
    """Batched derivative-free local ascent of the masked pattern power.

    All four stencil moves of every point are evaluated in a single call
    per round; points shrink their stencil when no move improves them.
    """
    cos_v = np.array(cos_v, dtype=float)
    r_v = np.array(r_v, dtype=float)
    step_r = np.broadcast_to(np.asarray(step_r, dtype=float), cos_v.shape)
    best = _masked_power(geom, offsets, target, search, cos_v, r_v)
    scale = np.ones_like(cos_v)
    n_pts = cos_v.size
    for _ in range(90):
        if not (scale > search.refine_tol).any():
            break
        trial_cos = (cos_v[None, :] + _MOVES[:, 0:1] * step_cos * scale[None, :]).ravel()
        trial_r = (r_v[None, :] + _MOVES[:, 1:2] * step_r[None, :] * scale[None, :]).ravel()
        vals = _masked_power(geom, offsets, target, search, trial_cos, trial_r)
        vals = vals.reshape(4, n_pts)
        pick = np.argmax(vals, axis=0)
        pick_val = vals[pick, np.arange(n_pts)]
        take = pick_val > best
        idx = np.arange(n_pts)[take]
        cos_v[take] = trial_cos.reshape(4, n_pts)[pick[take], idx]
        r_v[take] = trial_r.reshape(4, n_pts)[pick[take], idx]
        best[take] = pick_val[take]
        scale = np.where(take, scale, 0.5 * scale)
    return best, cos_v, r_v


def _safety_grid(search: SidelobeSearch):
    theta = np.arange(
        search.theta_min_deg,
        search.theta_max_deg + 0.5 * search.safety_theta_step_deg,
        search.safety_theta_step_deg,
    )
    rstep = search.resolved_safety_range_step
    ranges = np.arange(search.range_min_m, search.range_max_m + 0.5 * rstep, rstep)
    cos_g, r_g = np.meshgrid(np.cos(np.deg2rad(theta)), ranges, indexing="ij")
    return cos_g.ravel(), r_g.ravel()


def _to_point(cos_v: float, r_v: float) -> FieldPoint:
    # keep theta strictly inside (0, pi) when the argmax hits cos = +/-1
    theta = float(np.arccos(np.clip(cos_v, -1.0 + 1e-15, 1.0 - 1e-15)))
    return FieldPoint(theta, max(r_v, np.finfo(float).tiny))


class _FitnessEvaluator:
    """Peak-sidelobe search with cached safety-grid phases.

    The safety grid and its per-subarray phase factors depend only on the
    geometry and window, so they are computed once; each call then costs
    one trig pass over the grid plus the candidate refinement.
    """

    def __init__(self, geom: ArrayGeometry, search: SidelobeSearch):
        self.geom = geom
        self.search = search
        cos_g, r_g = _safety_grid(search)
        self.grid_cos, self.grid_r = cos_g, r_g
        a, b = phase_terms(geom, cos_g, r_g, search.target)
        self._a, self._b = a, b
        m_count = geom.subarrays
        coeff = (m_count - 1 - 2 * np.arange(m_count)) * geom.elements_per_subarray
        self._grid_phase = np.exp(1j * coeff[:, None] * a[None, :])
        step, _ = _lattice(geom)
        self.step_cos = 0.5 * step

    def _grid_best(self, offsets: np.ndarray) -> tuple[float, int]:
        n_sub = self.geom.elements_per_subarray
        x = self._a[None, :] - self._b[None, :] * offsets[:, None]
        g = _dirichlet_core(x, n_sub)
        field = (self._grid_phase * g).sum(axis=0) / offsets.size
        power = np.abs(field) ** 2
        principal = x - np.pi * np.round(x / np.pi)
        main = (np.abs(principal) < np.pi / n_sub).all(axis=0)
        power[main] = -np.inf
        i = int(np.argmax(power))
        return float(power[i]), i

    def best(self, offsets: np.ndarray) -> tuple[float, float, float]:
        geom, search, target = self.geom, self.search, self.search.target
        offsets = np.asarray(offsets, dtype=float)
        cos_c, r_c, step_r = _candidate_arrays(geom, offsets, target, search)
        best_val = -np.inf
        best_cos = best_r = np.nan
        if cos_c.size:
            raw = _masked_power(geom, offsets, target, search, cos_c, r_c)
            order = np.argsort(raw)[::-1]
            keep = order[: search.refine_top]
            keep = keep[np.isfinite(raw[keep])]
            if keep.size:
                val, cos_f, r_f = _pattern_search(
                    geom, offsets, target, search,
                    cos_c[keep], r_c[keep], self.step_cos, step_r[keep],
                )
                i = int(np.argmax(val))
                best_val, best_cos, best_r = float(val[i]), cos_f[i], r_f[i]
        grid_val, i = self._grid_best(offsets)
        if np.isfinite(grid_val):
            val, cos_f, r_f = _pattern_search(
                geom, offsets, target, search,
                self.grid_cos[i : i + 1], self.grid_r[i : i + 1],
                self.step_cos,
                np.array([0.5 * search.resolved_safety_range_step]),
            )
            if val[0] > best_val:
                best_val, best_cos, best_r = float(val[0]), cos_f[0], r_f[0]
        return best_val, float(best_cos), float(best_r)

    def __call__(self, offsets) -> float:
        return self.best(np.asarray(offsets, dtype=float))[0]


def max_sidelobe(
    geom: ArrayGeometry, foi: FoiVector, search: SidelobeSearch
) -> tuple[float, FieldPoint]:
    """Peak pattern power outside the main region, with its location.

    Maximizes over (i) the refined sidelobe-peak candidates and (ii) a
    coarse safety grid whose best point is refined as well.
    """
    if len(foi) != geom.subarrays:
        raise ValueError("offset vector length does not match subarray count")
    evaluator = _FitnessEvaluator(geom, search)
    power, cos_v, r_v = evaluator.best(foi.as_array())
    if not np.isfinite(power):
        raise ValueError("search window contains no points outside the main region")
    return power, _to_point(cos_v, r_v)


def sidelobe_fitness(geom: ArrayGeometry, search: SidelobeSearch):
    """Callable mapping an offset array to its peak-sidelobe power."""
    return _FitnessEvaluator(geom, search)
