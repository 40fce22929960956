"""Independent oracles shared by the test modules.

Everything here recomputes quantities from first principles (per-element
phase sums, dense-grid scans, mod-arithmetic strip tests) so the library
paths are checked against code that shares no internals with them.
"""

import numpy as np

from fdsabeam import ArrayGeometry, FieldPoint

C = 2.99792458e8


def per_element_field(geom: ArrayGeometry, offsets, point: FieldPoint, target: FieldPoint):
    """Brute-force subarray-sum field from per-element phase differences.

    Element (m, n) radiates at f_c - ((N-1)/2 - n)*offset_m and sits at
    x = [((M-1)/2 - m)N + (N-1)/2 - n]*d; the phase difference against the
    array center keeps the angle, range and subarray-constant terms and
    drops the tiny offset*spacing cross term, matching the closed form.
    """
    m_count, n_count = geom.subarrays, geom.elements_per_subarray
    fc, d = geom.carrier_hz, geom.spacing_m
    offsets = np.asarray(offsets, dtype=float)
    nn = (n_count - 1) / 2.0 - np.arange(n_count)
    mm = (m_count - 1) / 2.0 - np.arange(m_count)

    def phases(cos_t, rng):
        return (2.0 * np.pi / C) * (
            nn[None, :] * fc * d * cos_t
            - nn[None, :] * rng * offsets[:, None]
            + mm[:, None] * fc * n_count * d * cos_t
        )

    diff = phases(point.cos_theta, point.range_m) - phases(
        target.cos_theta, target.range_m
    )
    return complex(np.exp(1j * diff).sum() / (m_count * n_count))


def uniform_sum_field(total: int, psi: float) -> complex:
    """Plain phased-array sum (1/L) * sum_l exp(-j((L-1)/2 - l) * 2*psi)."""
    ll = (total - 1) / 2.0 - np.arange(total)
    return complex(np.exp(-1j * ll * 2.0 * psi).sum() / total)


def mod_strip_count(geom: ArrayGeometry, offsets, cos_g, r_g, target: FieldPoint):
    """Strip membership via mod arithmetic (independent of the library's round)."""
    offsets = np.asarray(offsets, dtype=float)
    a = np.pi * geom.carrier_hz * geom.spacing_m * (np.asarray(cos_g) - target.cos_theta) / C
    b = np.pi * (np.asarray(r_g) - target.range_m) / C
    count = np.zeros(np.broadcast(a, b).shape, dtype=int)
    for f in offsets:
        x = a - b * f
        wrapped = np.mod(x + np.pi / 2.0, np.pi) - np.pi / 2.0
        count = count + (np.abs(wrapped) < np.pi / geom.elements_per_subarray)
    return count


def dense_sidelobe_max(
    geom: ArrayGeometry,
    offsets,
    target: FieldPoint,
    theta_deg,
    ranges_m,
    chunk: int = 200_000,
):
    """Dense-grid peak power outside the all-strips region.

    Returns (power, theta_deg, range_m) of the argmax. Power values come
    from the library field evaluator (checked elsewhere against the
    per-element oracle); the exclusion predicate is the independent mod
    form above.
    """
    from fdsabeam import frb_power

    cos_t = np.cos(np.deg2rad(np.asarray(theta_deg)))
    cos_g, r_g = np.meshgrid(cos_t, np.asarray(ranges_m), indexing="ij")
    cos_flat, r_flat = cos_g.ravel(), r_g.ravel()
    best = -np.inf
    best_i = -1
    offsets = np.asarray(offsets, dtype=float)
    for start in range(0, cos_flat.size, chunk):
        sl = slice(start, start + chunk)
        power = frb_power(geom, offsets, cos_flat[sl], r_flat[sl], target)
        count = mod_strip_count(geom, offsets, cos_flat[sl], r_flat[sl], target)
        power = np.where(count == offsets.size, -np.inf, power)
        i = int(np.argmax(power))
        if power[i] > best:
            best = float(power[i])
            best_i = start + i
    i_t, i_r = np.unravel_index(best_i, cos_g.shape)
    return best, float(np.asarray(theta_deg)[i_t]), float(np.asarray(ranges_m)[i_r])


def random_geometry(rng, max_m=12, max_n=12, min_m=1, min_n=1) -> ArrayGeometry:
    fc = rng.uniform(10e9, 100e9)
    d = rng.uniform(0.2, 0.5) * C / fc
    return ArrayGeometry(
        fc, d, int(rng.integers(min_m, max_m + 1)), int(rng.integers(min_n, max_n + 1))
    )


def random_point(rng, theta_lo=5.0, theta_hi=175.0, r_lo=30.0, r_hi=3000.0) -> FieldPoint:
    return FieldPoint.from_degrees(rng.uniform(theta_lo, theta_hi), rng.uniform(r_lo, r_hi))
