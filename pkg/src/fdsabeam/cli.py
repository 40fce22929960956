"""Command-line surface: patterns, profiles, optimizers, outage sweeps.

Every subcommand reads a scenario (config file plus --set overrides),
writes one deterministic CSV (stdout or --out) and optionally renders a
figure next to it with --plot. Exit codes: 0 success, 2 configuration
error, 3 numeric/domain error; failures print one "ERROR: ..." line to
stderr.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bcdla import bcdla_optimize
from .config import ConfigError, ScenarioConfig, load_scenario
from .geometry import max_sidelobe, sidelobe_fitness, strip_count
from .patterns import FoiVector, beamformer_layout, frb_field
from .secrecy import (
    point_secrecy_rate,
    relative_bandwidth,
    secrecy_outage_probability,
    sr_map,
    sr_profile,
)
from .soa import soa_optimize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


def _fmt(value) -> str:
    """Full round-trip decimal representation."""
    return repr(float(value))


def _write_rows(path: str | None, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _region_names(count: np.ndarray, total: int) -> np.ndarray:
    names = np.where(count == total, "main", np.where(count == 0, "sidelobe", "mixed"))
    return names


def _pattern_grids(cfg: ScenarioConfig):
    grid = cfg.grid()
    theta = grid.theta_values_deg()
    ranges = grid.range_values_m()
    cos_g, r_g = np.meshgrid(np.cos(np.deg2rad(theta)), ranges, indexing="ij")
    return grid, theta, ranges, cos_g, r_g


def cmd_pattern(cfg: ScenarioConfig, args) -> int:
    geom, offsets, _ = cfg.resolve_offsets()
    grid, theta, ranges, cos_g, r_g = _pattern_grids(cfg)
    target = cfg.target()
    gain_geom, gain_offsets = geom, offsets
    if geom.subarrays > 1 and not np.any(offsets):
        # all-zero offsets: the subarray sum equals the single-array kernel
        gain_geom, gain_offsets = beamformer_layout(geom, "fab")
    amp = np.abs(frb_field(gain_geom, gain_offsets, cos_g, r_g, target))
    with np.errstate(divide="ignore"):
        gain_db = 20.0 * np.log10(amp)
    count = strip_count(geom, offsets, cos_g, r_g, target)
    labels = _region_names(count, offsets.size)
    rows = []
    for i, t in enumerate(theta):
        for j, r in enumerate(ranges):
            rows.append(
                (_fmt(t), _fmt(r), _fmt(amp[i, j]), _fmt(gain_db[i, j]), str(labels[i, j]))
            )
    _write_rows(args.out, ["theta_deg", "range_m", "gain_abs", "gain_db", "region_label"], rows)
    if args.plot:
        from .plots import save_pattern_figure

        save_pattern_figure(args.plot, theta, ranges, gain_db,
                            title=f"{cfg.beamformer} beampattern")
    return EXIT_OK


def cmd_profile(cfg: ScenarioConfig, args) -> int:
    if args.trajectory == "T13" and not cfg.rab_delta_f_hz:
        raise ConfigError("trajectory T13 follows the tilted mainlobe line; set rab_delta_f_hz")
    geom, offsets, _ = cfg.resolve_offsets()
    profile = sr_profile(
        geom,
        offsets,
        cfg.target(),
        cfg.noise(),
        cfg.tx_power_mw(),
        cfg.grid(),
        args.trajectory,
        profile_range_m=cfg.profile_range_m,
        profile_theta_deg=cfg.profile_theta_deg,
        locus_delta_f_hz=cfg.rab_delta_f_hz,
        use_path_loss=cfg.path_loss,
    )
    rows = [
        (_fmt(p), _fmt(t), _fmt(r), _fmt(s))
        for p, t, r, s in zip(profile.parameter, profile.theta_deg, profile.range_m, profile.sr)
    ]
    _write_rows(args.out, ["parameter", "theta_deg", "range_m", "sr_bits"], rows)
    if args.plot:
        from .plots import save_profile_figure

        xlabel = "range (m)" if args.trajectory == "T14" else "theta (deg)"
        save_profile_figure(args.plot, profile.parameter, profile.sr, xlabel,
                            title=f"secrecy rate on {args.trajectory}")
    return EXIT_OK


def _foi_cell(offsets) -> str:
    return ";".join(_fmt(f) for f in offsets)


def cmd_optimize(cfg: ScenarioConfig, args) -> int:
    geom = cfg.geometry()
    target = cfg.target()
    noise = cfg.noise()
    eve = cfg.eve()
    rows: list[tuple[str, str, str, str]] = []
    if args.algorithm == "soa":
        search = cfg.sidelobe_search()
        fitness = sidelobe_fitness(geom, search)
        foi, trace = soa_optimize(geom, target, cfg.soa_config(), fitness)
        for entry in trace:
            it = str(entry.iteration)
            rows.append(("trace", it, "best_fitness", _fmt(entry.best_fitness)))
            rows.append(("trace", it, "foi_hz", _foi_cell(entry.best_offsets_hz)))
        peak_power, peak_at = max_sidelobe(geom, foi, search)
        rows.append(("final", "", "foi_hz", _foi_cell(foi.offsets_hz)))
        rows.append(("final", "", "objective_power", _fmt(peak_power)))
        rows.append(("final", "", "peak_sidelobe_theta_deg", _fmt(peak_at.theta_deg)))
        rows.append(("final", "", "peak_sidelobe_range_m", _fmt(peak_at.range_m)))
        worst_sr = point_secrecy_rate(
            geom, foi.as_array(), target, peak_at, noise, cfg.tx_power_mw(), cfg.path_loss
        )
        rows.append(("final", "", "worst_case_sr_bits", _fmt(worst_sr)))
        trace_x = [e.iteration for e in trace]
        trace_y = [e.best_fitness for e in trace]
        ylabel = "peak sidelobe power"
    else:  # bcdla
        if eve is None:
            raise ConfigError(
                "optimize bcdla needs the eavesdropper location "
                "(eve_theta_deg, eve_range_m): the scheme nulls a known position"
            )
        foi, trace = bcdla_optimize(geom, target, eve, cfg.bcdla_config())
        for entry in trace:
            it = str(entry.iteration)
            rows.append(("trace", it, "block", str(entry.block)))
            rows.append(("trace", it, "offset_change_hz", _fmt(entry.offset_change_hz)))
            rows.append(("trace", it, "objective_power", _fmt(entry.objective_power)))
        rows.append(("final", "", "foi_hz", _foi_cell(foi.offsets_hz)))
        rows.append(("final", "", "objective_power", _fmt(trace[-1].objective_power)))
        trace_x = [e.iteration for e in trace]
        trace_y = [e.offset_change_hz for e in trace]
        ylabel = "offset change (Hz)"
    if eve is not None:
        sr_eve = point_secrecy_rate(
            geom, foi.as_array(), target, eve, noise, cfg.tx_power_mw(), cfg.path_loss
        )
        rows.append(("final", "", "sr_at_eve_bits", _fmt(sr_eve)))
    _write_rows(args.out, ["record", "iteration", "key", "value"], rows)
    if args.plot:
        from .plots import save_trace_figure

        save_trace_figure(args.plot, trace_x, trace_y, ylabel,
                          title=f"{args.algorithm} trace")
    return EXIT_OK


def _parse_float_list(raw: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag}: cannot parse {raw!r}") from exc
    if not values:
        raise ConfigError(f"{flag}: list is empty")
    return values


def cmd_sop(cfg: ScenarioConfig, args) -> int:
    gammas = _parse_float_list(args.gammas, "--gammas")
    bounds = _parse_float_list(args.foi_max_list, "--foi-max-list")
    geom = cfg.geometry()
    target = cfg.target()
    rows = []
    triples = []
    for bound in bounds:
        if bound == 0.0:
            eff, offsets = beamformer_layout(geom, "fab")
        else:
            fitness = sidelobe_fitness(geom, cfg.sidelobe_search())
            foi, _ = soa_optimize(geom, target, cfg.soa_config(bound), fitness)
            eff, offsets = geom, foi.as_array()
        srm = sr_map(
            eff, offsets, target, cfg.noise(), cfg.tx_power_mw(), cfg.grid(), cfg.path_loss
        )
        for gamma in gammas:
            sop = secrecy_outage_probability(srm, gamma)
            rows.append((_fmt(bound), _fmt(gamma), _fmt(sop)))
            triples.append((bound, gamma, sop))
    _write_rows(args.out, ["delta_f_max_hz", "gamma", "sop"], rows)
    if args.plot:
        from .plots import save_sop_figure

        save_sop_figure(args.plot, triples)
    return EXIT_OK


def cmd_rbw(cfg: ScenarioConfig, args) -> int:
    bounds = _parse_float_list(args.foi_max_list, "--foi-max-list")
    width = args.fab_bandwidth_hz
    rows = [
        (_fmt(bound), _fmt(width), _fmt(relative_bandwidth(bound, width)))
        for bound in bounds
    ]
    _write_rows(args.out, ["delta_f_max_hz", "fab_bandwidth_hz", "rbw"], rows)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdsabeam",
        description="Frequency-diverse subarray beampattern and secrecy analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario file (key=value lines)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one configuration key (repeatable)")
        p.add_argument("--seed", type=int, help="override the RNG seed")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--plot", help="also render a figure to this path")
        p.add_argument("--dump-config", action="store_true",
                       help="print the fully-resolved configuration and exit")

    p = sub.add_parser("pattern", help="beampattern over the angle-range grid")
    common(p)
    p = sub.add_parser("profile", help="secrecy rate along a trajectory")
    p.add_argument("--trajectory", required=True, choices=("T12", "T13", "T14"))
    common(p)
    p = sub.add_parser("optimize", help="run an offset optimizer")
    p.add_argument("--algorithm", required=True, choices=("soa", "bcdla"))
    common(p)
    p = sub.add_parser("sop", help="secrecy outage over offset bounds and thresholds")
    p.add_argument("--gammas", default="1.0", help="comma list of SR thresholds")
    p.add_argument("--foi-max-list", required=True,
                   help="comma list of offset bounds in Hz (0 = fixed angular beam)")
    common(p)
    p = sub.add_parser("rbw", help="relative bandwidth kept per offset bound")
    p.add_argument("--fab-bandwidth-hz", type=float, required=True)
    p.add_argument("--foi-max-list", required=True,
                   help="comma list of offset bounds in Hz")
    common(p)
    return parser


_COMMANDS = {
    "pattern": cmd_pattern,
    "profile": cmd_profile,
    "optimize": cmd_optimize,
    "sop": cmd_sop,
    "rbw": cmd_rbw,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    try:
        cfg = load_scenario(args.config, overrides)
        if args.dump_config:
            sys.stdout.write(cfg.dump())
            return EXIT_OK
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
