"""Frequency-diverse subarray beampattern synthesis and secrecy analysis."""

from .patterns import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    BeamSample,
    FieldPoint,
    FoiVector,
    beamformer_layout,
    dirichlet_kernel,
    element_frequency,
    fab_gain,
    frb_field,
    frb_gain,
    frb_power,
    frb_power_expansion,
    phase_terms,
    rab_gain,
    subbeam_gain,
)
from .geometry import (
    PeakCandidate,
    RegionLabel,
    SidelobeSearch,
    classify_region,
    fold_quadrant,
    is_antisymmetric,
    mainlobe_locus_range,
    max_sidelobe,
    rotated_angle,
    sidelobe_candidates,
    sidelobe_fitness,
    strip_count,
)

__all__ = [name for name in dir() if not name.startswith("_")]
