"""Closed-form array factors for a frequency-diverse subarray transmitter.

A uniform linear array of M subarrays times N elements supports three
steering modes: a conventional phased beam (fab), a single-offset
frequency-diverse beam whose mainlobe tilts in the angle-range plane (rab),
and the subarray beam with one frequency-offset increment per subarray
(frb) whose mainlobe is confined to an angle-range cell around the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 2.99792458e8
"""Propagation speed, m/s."""

# below this |sin x| the Dirichlet ratio switches to the reduced form
_SINGULAR_SIN = 1e-3
# float64 pi plus its residual: pi = _PI_HI + _PI_LO to ~1e-33
_PI_HI = np.pi
_PI_LO = 1.2246467991473532e-16


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array split into equal non-overlapping subarrays.

    Attributes:
        carrier_hz: carrier frequency in Hz.
        spacing_m: inter-element spacing in meters; must not exceed half a
            wavelength (anti-aliasing condition).
        subarrays: number of subarrays M.
        elements_per_subarray: elements per subarray N.
    """

    carrier_hz: float
    spacing_m: float
    subarrays: int
    elements_per_subarray: int

    def __post_init__(self) -> None:
        if self.carrier_hz <= 0.0:
            raise ValueError("carrier_hz must be positive")
        if self.spacing_m <= 0.0:
            raise ValueError("spacing_m must be positive")
        if self.subarrays < 1 or self.elements_per_subarray < 1:
            raise ValueError("subarrays and elements_per_subarray must be >= 1")
        if self.spacing_m > 0.5 * self.wavelength_m * (1.0 + 1e-12):
            raise ValueError(
                "spacing_m exceeds half a wavelength; the pattern would alias"
            )

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def total_elements(self) -> int:
        """Total element count L = M * N."""
        return self.subarrays * self.elements_per_subarray


@dataclass(frozen=True)
class FoiVector:
    """Per-subarray frequency-offset increments with a common bound.

    Attributes:
        offsets_hz: the M offsets, one per subarray.
        max_offset_hz: bound; every |offset| must be <= max_offset_hz.
    """

    offsets_hz: tuple[float, ...]
    max_offset_hz: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "offsets_hz", tuple(float(f) for f in self.offsets_hz))
        if self.max_offset_hz < 0.0:
            raise ValueError("max_offset_hz must be non-negative")
        bound = self.max_offset_hz * (1.0 + 1e-12)
        if any(abs(f) > bound for f in self.offsets_hz):
            raise ValueError("an offset exceeds max_offset_hz")

    def __len__(self) -> int:
        return len(self.offsets_hz)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.offsets_hz, dtype=float)

    @classmethod
    def zero(cls, subarrays: int, max_offset_hz: float = 0.0) -> "FoiVector":
        return cls((0.0,) * subarrays, max_offset_hz)


@dataclass(frozen=True)
class FieldPoint:
    """An (azimuth, range) evaluation location.

    theta_rad is measured from the array axis, so the pattern depends on
    cos(theta); valid values lie strictly inside (0, pi).
    """

    theta_rad: float
    range_m: float

    def __post_init__(self) -> None:
        if not 0.0 < self.theta_rad < np.pi:
            raise ValueError("theta_rad must lie in (0, pi)")
        if self.range_m <= 0.0:
            raise ValueError("range_m must be positive")

    @classmethod
    def from_degrees(cls, theta_deg: float, range_m: float) -> "FieldPoint":
        return cls(np.deg2rad(theta_deg), range_m)

    @property
    def theta_deg(self) -> float:
        return float(np.rad2deg(self.theta_rad))

    @property
    def cos_theta(self) -> float:
        return float(np.cos(self.theta_rad))


@dataclass(frozen=True)
class BeamSample:
    """Complex array-factor value and its power."""

    value: complex

    @property
    def power(self) -> float:
        return abs(self.value) ** 2

    @property
    def amplitude(self) -> float:
        return abs(self.value)


def _dirichlet_core(x: np.ndarray, order: int) -> np.ndarray:
    """Dirichlet ratio on an ndarray.

    Near multiples of pi the direct form loses digits to argument
    rounding (sin(order*x) with a large rounded product), so those
    entries are re-evaluated from the accurately reduced remainder
    r = x - k*pi: the ratio equals (-1)^(k*(order-1)) * sin(order*r) /
    (order*sin(r)), which is exactly +/-1 at r = 0.
    """
    s = np.sin(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(order * x) / (order * s)
    near = np.abs(s) < _SINGULAR_SIN
    if near.any():
        xs = x[near]
        k = np.round(xs / np.pi)
        r = (xs - k * _PI_HI) - k * _PI_LO
        sign = np.where((k.astype(np.int64) * (order - 1)) % 2 == 0, 1.0, -1.0)
        sr = np.sin(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.sin(order * r) / (order * sr)
        out[near] = sign * np.where(sr == 0.0, 1.0, ratio)
    return out


def dirichlet_kernel(x, order: int):
    """Normalized uniform-array pattern sin(order*x) / (order*sin(x)).

    Removable singularities at multiples of pi are evaluated by the limit
    cos(order*x)/cos(x), which reduces to +/-1 exactly on the singular set.
    Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    out = _dirichlet_core(np.atleast_1d(arr), order)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def phase_terms(geom: ArrayGeometry, cos_theta, range_m, target: FieldPoint):
    """Angle and range phase coefficients (a, b) relative to the target.

    a = pi * f_c * d * (cos(theta) - cos(theta_T)) / c
    b = pi * (R - R_T) / c
    Broadcasts over array-valued cos_theta / range_m.
    """
    cos_theta = np.asarray(cos_theta, dtype=float)
    range_m = np.asarray(range_m, dtype=float)
    a = np.pi * geom.carrier_hz * geom.spacing_m * (cos_theta - target.cos_theta) / SPEED_OF_LIGHT
    b = np.pi * (range_m - target.range_m) / SPEED_OF_LIGHT
    return a, b


def element_frequency(geom: ArrayGeometry, foi: FoiVector, m: int, n: int) -> float:
    """Radiated frequency of element n inside subarray m."""
    if not 0 <= m < geom.subarrays:
        raise ValueError(f"subarray index {m} out of range [0, {geom.subarrays})")
    if not 0 <= n < geom.elements_per_subarray:
        raise ValueError(
            f"element index {n} out of range [0, {geom.elements_per_subarray})"
        )
    if len(foi) != geom.subarrays:
        raise ValueError("offset vector length does not match subarray count")
    half = (geom.elements_per_subarray - 1) / 2.0
    return geom.carrier_hz - (half - n) * foi.offsets_hz[m]


def fab_gain(
    geom: ArrayGeometry, total_elements: int, point: FieldPoint, target: FieldPoint
) -> BeamSample:
    """Fixed angular beam: L-element phased-array factor, range-independent."""
    if total_elements < 1:
        raise ValueError("total_elements must be >= 1")
    a, _ = phase_terms(geom, point.cos_theta, point.range_m, target)
    return BeamSample(complex(dirichlet_kernel(a, total_elements)))


def rab_gain(
    geom: ArrayGeometry,
    total_elements: int,
    delta_f_hz: float,
    point: FieldPoint,
    target: FieldPoint,
) -> BeamSample:
    """Rotated angular beam: L-element uniform frequency-diverse array factor."""
    if total_elements < 1:
        raise ValueError("total_elements must be >= 1")
    a, b = phase_terms(geom, point.cos_theta, point.range_m, target)
    return BeamSample(complex(dirichlet_kernel(a - b * delta_f_hz, total_elements)))


def subbeam_gain(
    geom: ArrayGeometry, delta_f_m_hz: float, point: FieldPoint, target: FieldPoint
) -> float:
    """Real pattern of one N-element subarray with offset delta_f_m."""
    a, b = phase_terms(geom, point.cos_theta, point.range_m, target)
    return float(dirichlet_kernel(a - b * delta_f_m_hz, geom.elements_per_subarray))


def frb_field(geom: ArrayGeometry, offsets_hz, cos_theta, range_m, target: FieldPoint):
    """Complex subarray-sum array factor over broadcastable coordinates.

    Each subarray contributes its kernel weighted by the subarray-center
    phase factor exp(j*(M-1-2m)*N*a); the mean over subarrays is returned.
    """
    offsets = np.asarray(offsets_hz, dtype=float)
    m_count = offsets.size
    n_sub = geom.elements_per_subarray
    a, b = phase_terms(geom, cos_theta, range_m, target)
    # exp(j*(M-1-2m)*N*a) built by cumulative products of exp(-2jNa)
    lead = np.exp(1j * (m_count - 1) * n_sub * a)
    step = np.exp(-2j * n_sub * a)
    total = np.zeros(np.broadcast(a, b).shape, dtype=complex)
    phase = lead
    for m in range(m_count):
        total = total + phase * dirichlet_kernel(a - b * offsets[m], n_sub)
        if m + 1 < m_count:
            phase = phase * step
    return total / m_count


def frb_power(geom: ArrayGeometry, offsets_hz, cos_theta, range_m, target: FieldPoint):
    """|frb_field|^2 over broadcastable coordinates."""
    field = frb_field(geom, offsets_hz, cos_theta, range_m, target)
    return np.abs(field) ** 2


def frb_gain(
    geom: ArrayGeometry, foi: FoiVector, point: FieldPoint, target: FieldPoint
) -> BeamSample:
    """Subarray-sum array factor at a single field point."""
    if len(foi) != geom.subarrays:
        raise ValueError("offset vector length does not match subarray count")
    value = frb_field(geom, foi.as_array(), point.cos_theta, point.range_m, target)
    return BeamSample(complex(value))


def frb_power_expansion(
    geom: ArrayGeometry, foi: FoiVector, point: FieldPoint, target: FieldPoint
) -> float:
    """Pattern power via the real cosine double sum over subarray pairs.

    Algebraically identical to frb_gain(...).power; kept as the quadratic
    form used by the per-block optimizer.
    """
    if len(foi) != geom.subarrays:
        raise ValueError("offset vector length does not match subarray count")
    a, b = phase_terms(geom, point.cos_theta, point.range_m, target)
    n_sub = geom.elements_per_subarray
    offsets = foi.as_array()
    g = np.array([dirichlet_kernel(a - b * f, n_sub) for f in offsets])
    m_idx = np.arange(len(foi))
    cos_mat = np.cos(2.0 * n_sub * a * (m_idx[None, :] - m_idx[:, None]))
    return float(g @ cos_mat @ g) / len(foi) ** 2


def beamformer_layout(
    geom: ArrayGeometry,
    kind: str,
    offsets_hz=None,
    rab_delta_f_hz: float | None = None,
) -> tuple[ArrayGeometry, np.ndarray]:
    """Map a beamformer name onto the common subarray-sum evaluator.

    fab and rab collapse to a single L-element subarray (with zero or one
    offset); frb keeps the configured split. Returns the effective geometry
    and offset array to pass to frb_field / frb_power.
    """
    if kind == "fab":
        eff = ArrayGeometry(geom.carrier_hz, geom.spacing_m, 1, geom.total_elements)
        return eff, np.zeros(1)
    if kind == "rab":
        if rab_delta_f_hz is None:
            raise ValueError("rab beamformer requires a frequency-offset increment")
        eff = ArrayGeometry(geom.carrier_hz, geom.spacing_m, 1, geom.total_elements)
        return eff, np.array([float(rab_delta_f_hz)])
    if kind == "frb":
        if offsets_hz is None:
            raise ValueError("frb beamformer requires an offset vector")
        offsets = np.asarray(offsets_hz, dtype=float)
        if offsets.size != geom.subarrays:
            raise ValueError("offset vector length does not match subarray count")
        return geom, offsets
    raise ValueError(f"unknown beamformer {kind!r}; expected fab, rab or frb")
