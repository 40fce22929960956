"""Secrecy metrics: SNR, rates, secrecy-rate maps, outage, bandwidth cost.

All SNR arithmetic is linear; dBm values are converted once at the edge.
The legitimate receiver sits at the beam target, so its pattern gain is
unity and only the optional path loss changes its SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import strip_count
from .patterns import ArrayGeometry, FieldPoint, frb_power

PATH_LOSS_INTERCEPT_DB = 69.8
PATH_LOSS_EXPONENT = 2.0


def dbm_to_mw(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0)


def mw_to_dbm(value_mw: float) -> float:
    if value_mw <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * np.log10(value_mw)


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise powers in mW."""

    bob_noise_mw: float
    eve_noise_mw: float

    def __post_init__(self) -> None:
        if self.bob_noise_mw <= 0.0 or self.eve_noise_mw <= 0.0:
            raise ValueError("noise powers must be positive")

    @classmethod
    def from_dbm(cls, bob_dbm: float, eve_dbm: float) -> "NoiseModel":
        return cls(dbm_to_mw(bob_dbm), dbm_to_mw(eve_dbm))


@dataclass(frozen=True)
class GridSpec:
    """Angle-range evaluation grid."""

    theta_start_deg: float = 0.0
    theta_stop_deg: float = 179.0
    theta_step_deg: float = 0.5
    range_start_m: float = 50.0
    range_stop_m: float = 1000.0
    range_step_m: float = 5.0

    def __post_init__(self) -> None:
        if self.theta_step_deg <= 0.0 or self.range_step_m <= 0.0:
            raise ValueError("grid steps must be positive")
        if self.theta_stop_deg < self.theta_start_deg:
            raise ValueError("empty theta window")
        if self.range_stop_m < self.range_start_m or self.range_start_m <= 0.0:
            raise ValueError("invalid range window")

    def theta_values_deg(self) -> np.ndarray:
        return np.arange(
            self.theta_start_deg,
            self.theta_stop_deg + 0.5 * self.theta_step_deg,
            self.theta_step_deg,
        )

    def range_values_m(self) -> np.ndarray:
        return np.arange(
            self.range_start_m,
            self.range_stop_m + 0.5 * self.range_step_m,
            self.range_step_m,
        )


def path_loss_db(range_m) -> float | np.ndarray:
    """Log-distance path loss: 69.8 + 20*log10(R) dB."""
    range_m = np.asarray(range_m, dtype=float)
    if np.any(range_m <= 0.0):
        raise ValueError("range must be positive")
    out = PATH_LOSS_INTERCEPT_DB + 10.0 * PATH_LOSS_EXPONENT * np.log10(range_m)
    return float(out) if out.ndim == 0 else out


def path_loss_factor(range_m):
    """Linear attenuation 10^(-PL/10)."""
    return 10.0 ** (-np.asarray(path_loss_db(range_m)) / 10.0)


def snr(power, noise_mw: float, tx_power_mw: float, use_path_loss: bool = False, range_m=None):
    """Linear receive SNR for a normalized pattern power.

    Path loss is off by default; when on, range_m is required and the SNR
    is scaled by the log-distance attenuation.
    """
    power = np.asarray(power, dtype=float)
    out = tx_power_mw * power / noise_mw
    if use_path_loss:
        if range_m is None:
            raise ValueError("range_m is required when path loss is enabled")
        out = out * path_loss_factor(range_m)
    return float(out) if out.ndim == 0 else out


def secrecy_rate(bob_snr, eve_snr):
    """Positive part of the rate difference, bits/s/Hz."""
    bob_snr = np.asarray(bob_snr, dtype=float)
    eve_snr = np.asarray(eve_snr, dtype=float)
    out = np.maximum(0.0, np.log2(1.0 + bob_snr) - np.log2(1.0 + eve_snr))
    return float(out) if out.ndim == 0 else out


def _bob_cell_mask(geom, offsets_hz, bob, theta_deg, range_m, cos_g, r_g):
    """Mainlobe cells within one grid step of the legitimate receiver.

    An eavesdropper sharing the receiver's cell trivially drives the
    secrecy rate to zero, so outage statistics skip the immediate
    neighborhood of the target when it lies in the mainlobe region.
    """
    mask = np.zeros(cos_g.shape, dtype=bool)
    if not (theta_deg.min() <= bob.theta_deg <= theta_deg.max()):
        return mask
    if not (range_m.min() <= bob.range_m <= range_m.max()):
        return mask
    i0 = int(np.argmin(np.abs(theta_deg - bob.theta_deg)))
    j0 = int(np.argmin(np.abs(range_m - bob.range_m)))
    i_lo, i_hi = max(0, i0 - 1), min(theta_deg.size, i0 + 2)
    j_lo, j_hi = max(0, j0 - 1), min(range_m.size, j0 + 2)
    count = strip_count(
        geom, offsets_hz, cos_g[i_lo:i_hi, j_lo:j_hi], r_g[i_lo:i_hi, j_lo:j_hi], bob
    )
    mask[i_lo:i_hi, j_lo:j_hi] = count == np.asarray(offsets_hz).size
    return mask


@dataclass(frozen=True)
class SecrecyMap:
    """Secrecy rate over a grid of eavesdropper positions.

    sr has shape (theta, range). excluded marks the mainlobe cell around
    the legitimate receiver, which outage statistics skip.
    """

    theta_deg: np.ndarray
    range_m: np.ndarray
    sr: np.ndarray
    excluded: np.ndarray

    def counted(self) -> np.ndarray:
        return self.sr[~self.excluded]


def sr_map(
    geom: ArrayGeometry,
    offsets_hz,
    bob: FieldPoint,
    noise: NoiseModel,
    tx_power_mw: float,
    grid: GridSpec,
    use_path_loss: bool = False,
) -> SecrecyMap:
    """Secrecy rate against an eavesdropper at every grid point.

    offsets_hz is the effective offset vector (see beamformer_layout for
    mapping fab/rab onto it); the legitimate receiver stays at the beam
    target where the pattern gain is exactly one.
    """
    theta = grid.theta_values_deg()
    ranges = grid.range_values_m()
    cos_g, r_g = np.meshgrid(np.cos(np.deg2rad(theta)), ranges, indexing="ij")
    power = frb_power(geom, offsets_hz, cos_g, r_g, bob)
    bob_snr = snr(1.0, noise.bob_noise_mw, tx_power_mw, use_path_loss, bob.range_m)
    eve_snr = snr(power, noise.eve_noise_mw, tx_power_mw, use_path_loss, r_g)
    sr = secrecy_rate(bob_snr, eve_snr)
    excluded = _bob_cell_mask(geom, offsets_hz, bob, theta, ranges, cos_g, r_g)
    return SecrecyMap(theta, ranges, sr, excluded)


def secrecy_outage_probability(srmap: SecrecyMap, gamma: float) -> float:
    """Fraction of counted grid points with secrecy rate below gamma."""
    counted = srmap.counted()
    if counted.size == 0:
        raise ValueError("no grid points outside the excluded mainlobe cell")
    return float((counted < gamma).mean())


def relative_bandwidth(max_offset_hz: float, fab_bandwidth_hz: float) -> float:
    """Bandwidth fraction kept after reserving spectrum for the offsets.

    The reference double-sideband system spans fab_bandwidth_hz around the
    carrier, so half of it is available on each side.
    """
    if fab_bandwidth_hz <= 0.0:
        raise ValueError("reference bandwidth must be positive")
    half = fab_bandwidth_hz / 2.0
    if max_offset_hz > half:
        raise ValueError("offset bound exceeds half the reference bandwidth")
    return 1.0 - max_offset_hz / half


def angle_averaged_sr(srmap: SecrecyMap) -> np.ndarray:
    """Mean secrecy rate over the angle axis, one value per range."""
    return srmap.sr.mean(axis=0)


def angle_range_averaged_sr(srmap: SecrecyMap) -> float:
    """Mean secrecy rate over the whole grid."""
    return float(srmap.sr.mean())


@dataclass(frozen=True)
class SecrecyProfile:
    """Secrecy rate along a one-dimensional eavesdropper trajectory."""

    parameter: np.ndarray
    theta_deg: np.ndarray
    range_m: np.ndarray
    sr: np.ndarray
    excluded: np.ndarray


TRAJECTORIES = ("T12", "T13", "T14")


def sr_profile(
    geom: ArrayGeometry,
    offsets_hz,
    bob: FieldPoint,
    noise: NoiseModel,
    tx_power_mw: float,
    grid: GridSpec,
    trajectory: str,
    profile_range_m: float | None = None,
    profile_theta_deg: float | None = None,
    locus_delta_f_hz: float | None = None,
    use_path_loss: bool = False,
) -> SecrecyProfile:
    """Secrecy rate along one of the canonical eavesdropper trajectories.

    T12 sweeps angle at a fixed range; T13 follows the tilted mainlobe
    line of a single-offset beam (requires locus_delta_f_hz); T14 sweeps
    range at a fixed angle.
    """
    if trajectory not in TRAJECTORIES:
        raise ValueError(f"unknown trajectory {trajectory!r}; expected one of {TRAJECTORIES}")
    if trajectory == "T12":
        theta = grid.theta_values_deg()
        fixed_r = bob.range_m if profile_range_m is None else profile_range_m
        ranges = np.full(theta.size, float(fixed_r))
        param = theta
    elif trajectory == "T13":
        if locus_delta_f_hz in (None, 0.0):
            raise ValueError("trajectory T13 requires a nonzero locus offset")
        theta = grid.theta_values_deg()
        dcos = np.cos(np.deg2rad(theta)) - bob.cos_theta
        ranges = bob.range_m + geom.carrier_hz * geom.spacing_m * dcos / locus_delta_f_hz
        keep = ranges > 0.0
        theta, ranges = theta[keep], ranges[keep]
        param = theta
    else:  # T14
        ranges = grid.range_values_m()
        fixed_t = bob.theta_deg if profile_theta_deg is None else profile_theta_deg
        theta = np.full(ranges.size, float(fixed_t))
        param = ranges
    cos_v = np.cos(np.deg2rad(theta))
    power = frb_power(geom, offsets_hz, cos_v, ranges, bob)
    bob_snr = snr(1.0, noise.bob_noise_mw, tx_power_mw, use_path_loss, bob.range_m)
    eve_snr = snr(power, noise.eve_noise_mw, tx_power_mw, use_path_loss, ranges)
    sr = secrecy_rate(bob_snr, eve_snr)
    # skip samples sharing the receiver's cell, as in the outage statistics
    cell_cos = np.abs(np.sin(np.deg2rad(theta))) * np.deg2rad(grid.theta_step_deg) + 1e-15
    near = (np.abs(cos_v - bob.cos_theta) <= cell_cos) & (
        np.abs(ranges - bob.range_m) <= grid.range_step_m
    )
    count = strip_count(geom, offsets_hz, cos_v, ranges, bob)
    excluded = near & (count == np.asarray(offsets_hz, dtype=float).size)
    return SecrecyProfile(param, theta, ranges, sr, excluded)


def point_secrecy_rate(
    geom: ArrayGeometry,
    offsets_hz,
    bob: FieldPoint,
    eve: FieldPoint,
    noise: NoiseModel,
    tx_power_mw: float,
    use_path_loss: bool = False,
) -> float:
    """Secrecy rate for one eavesdropper location."""
    power = float(frb_power(geom, offsets_hz, eve.cos_theta, eve.range_m, bob))
    bob_snr = snr(1.0, noise.bob_noise_mw, tx_power_mw, use_path_loss, bob.range_m)
    eve_snr = snr(power, noise.eve_noise_mw, tx_power_mw, use_path_loss, eve.range_m)
    return float(secrecy_rate(bob_snr, eve_snr))
