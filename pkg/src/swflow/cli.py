"""Command line front end: ``run``, ``diagnose`` and ``check``.

Every failure exits nonzero and prints one line to stderr of the form
``error kind=<kind> <message>``.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .clifford import chirality_projector, gamma_matrices
from .config import RunConfig, format_config, parse_config
from .errors import (
    BlowUpError,
    ConfigurationError,
    DomainError,
    FormatError,
    PreconditionError,
    SWFlowError,
)
from .fields import covariant_diff_values, gauge_transform, make_initial
from .flow import FlowState, evolve
from .functional import ModelParams, gradient_check, sw_functional
from .lattice import d_link_to_plaq
from .snapshot import read_history, snapshot_name, write_snapshot

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_PRECONDITION = 4
EXIT_FORMAT = 5
EXIT_INTERNAL = 6


def fmt(value) -> str:
    """17 significant digits so every float in a CSV round-trips exactly."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_energy_csv(path: Path, records):
    _write_csv(
        path,
        ["step", "t", "sw", "sup_phi", "dsw_dt", "identity_residual"],
        [(r.step, r.t, r.sw, r.sup_phi, r.dsw_dt, r.identity_residual) for r in records],
    )


def _load_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc.strerror}", key="config") from None
    return parse_config(text)


def run_command(config: RunConfig, out_dir: str | Path | None = None) -> int:
    out = Path(out_dir or config.out_dir or "swflow-out")
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(format_config(config), encoding="utf-8")
    params = config.model()
    phi, a = make_initial(config.initial_spec(), params.lattice, params.N)

    def spill(state, step):
        write_snapshot(state, params, out / snapshot_name(step))

    status, blow_t = "ok", None
    try:
        history = evolve(FlowState(0.0, phi, a), params, config.integrator_config(), on_snapshot=spill)
    except BlowUpError as exc:
        history, blow_t = exc.history, exc.t
        status = f"blowup t={exc.t!r}"

    records = dg.energy_report(history, params)
    write_energy_csv(out / "energy.csv", records)
    maxp = dg.max_principle_check(history, params)
    summary = [
        f"status = {status}",
        f"snapshots = {len(history)}",
        f"t_final = {fmt(history.times[-1])}",
        f"sw_initial = {fmt(records[0].sw)}",
        f"sw_final = {fmt(records[-1].sw)}",
        f"sw_increases = {sum(r.increased for r in records)}",
        f"max_principle = {'pass' if maxp.passed else 'fail'}",
        f"max_principle_bound = {fmt(maxp.bound)}",
        f"max_principle_margin = {fmt(maxp.margin)}",
    ]
    (out / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    print("\n".join(summary))
    if blow_t is not None:
        raise BlowUpError(blow_t, history)
    return EXIT_OK


def _point(text, lat, default):
    if text is None:
        return tuple(default)
    values = tuple(float(v) for v in text.split(","))
    if len(values) != lat.m:
        raise ConfigurationError(f"expected {lat.m} coordinates", key="x0")
    return values


def _radii(text):
    if text is None:
        return None
    return tuple(float(v) for v in text.split(",") if v.strip())


def _snapshot_at(history, t0):
    if t0 is None:
        return history[-1]
    times = history.times
    i = int(np.argmin(np.abs(times - t0)))
    if abs(times[i] - t0) > 1e-12 * max(1.0, abs(t0)):
        raise PreconditionError(f"no snapshot at t={t0!r}")
    return history[i]


def diagnose_command(args) -> int:
    history = read_history(args.history)
    params = history.params
    lat = params.lattice
    out = Path(args.out or args.history)
    out.mkdir(parents=True, exist_ok=True)
    center = (lat.L / 2,) * lat.m
    x0 = _point(args.x0, lat, center)

    if args.kind == "monotonicity":
        t0 = float(history.times[-1]) if args.t0 is None else args.t0
        radii = _radii(args.radii)
        if radii is None:
            cap = min(lat.injectivity_radius, math.sqrt(t0) / 2)
            radii = tuple(cap * q for q in (0.25, 0.5, 0.75, 1.0))
        table = dg.monotonicity_scan(history, x0, t0, radii, params)
        _write_csv(
            out / "monotonicity.csv",
            ["R", "Phi", "F", "fitted_a", "fitted_c"],
            [(R, p, f, table.fitted_a, table.fitted_c) for R, p, f in table.rows],
        )
        if table.attainable:
            print(f"fitted_a = {fmt(table.fitted_a)}\nfitted_c = {fmt(table.fitted_c)}")
        else:
            print("fitted constants unattainable on the search grid")
        return EXIT_OK

    if args.kind == "detect":
        snap = _snapshot_at(history, args.t0)
        config = dg.DetectorConfig(delta=args.delta, radii=_radii(args.radii))
        det = dg.detect_singular_set(snap, config, params)
        flagged = np.zeros(lat.shape, dtype=bool)
        flagged[tuple(det.sites.T)] = True
        coords = lat.coords().reshape(lat.m, -1).T
        cols = [det.energies[R].ravel() for R in det.radii]
        rows = (
            (*coords[i], *(c[i] for c in cols), bool(flagged.flat[i]))
            for i in range(lat.site_count)
        )
        header = [f"x{k}" for k in range(lat.m)] + [f"E_R={fmt(R)}" for R in det.radii] + ["flagged"]
        _write_csv(out / "detector.csv", header, rows)
        weights = [det.energies[det.radii[-1]][tuple(s)] for s in det.sites]
        first = history[0]
        report = dg.vitali_cover(
            lat, det.sites, min(det.radii), weights,
            sw0=sw_functional(first.phi, first.a, params), delta=args.delta,
        )
        print(f"flagged = {len(det)}")
        print(f"vitali_centers = {len(report.centers)}")
        print(f"hausdorff_sum = {fmt(report.hausdorff_sum)}")
        print(f"energy_bound = {fmt(report.energy_bound)}")
        return EXIT_OK

    if args.kind == "profile":
        snap = _snapshot_at(history, args.t0)
        r_list = _radii(args.radii) or tuple(lat.L / 16 * q for q in range(1, 9))
        rows = dg.curvature_scaling_profile(snap.phi, snap.a, x0, r_list, params)
        _write_csv(out / "profile.csv", ["r", "value"], rows)
        print(f"profile rows = {len(rows)}")
        return EXIT_OK

    # rescale
    snap = _snapshot_at(history, args.t0)
    site = tuple(int(round(v / lat.h)) % lat.n for v in x0)
    k = args.ratio
    phi_n, a_n = dg.rescale_blowup(history, site, snap.t, k)
    R_n = k * lat.h
    shift = tuple(-s for s in site)
    axes = tuple(range(lat.m))
    f = np.roll(d_link_to_plaq(lat, snap.a.values), shift, axis=tuple(x + 1 for x in axes))
    D = np.roll(covariant_diff_values(lat, snap.phi.values, snap.a.values), shift, axis=tuple(x + 1 for x in axes))
    f_n = d_link_to_plaq(phi_n.lattice, a_n.values)
    D_n = covariant_diff_values(phi_n.lattice, phi_n.values, a_n.values)
    err_f = float(np.max(np.abs(f_n**2 - R_n**4 * f**2)))
    err_d = float(np.max(np.abs(np.abs(D_n) ** 2 - R_n**2 * np.abs(D) ** 2)))
    zoom_params = ModelParams(S=params.S, lattice=phi_n.lattice, N=params.N)
    write_snapshot(FlowState(snap.t, phi_n, a_n), zoom_params, out / "rescaled.swfl.out")
    _write_csv(
        out / "rescale.csv",
        ["quantity", "R_n", "max_abs_deviation"],
        [("curvature_sq", R_n, err_f), ("covariant_diff_sq", R_n, err_d)],
    )
    print(f"R_n = {fmt(R_n)}\ncurvature_sq_dev = {fmt(err_f)}\ncovariant_diff_sq_dev = {fmt(err_d)}")
    return EXIT_OK


def check_command(args) -> int:
    config = _load_config(args.config)
    params = config.model()
    lat = params.lattice
    if args.what == "clifford":
        rep = gamma_matrices(config.m)
        eye = np.eye(rep.N)
        worst = max(
            float(np.max(np.abs(rep.anticommutator(j, k) - 2 * (j == k) * eye)))
            for j in range(rep.m)
            for k in range(rep.m)
        )
        ok = worst <= 1e-13
        print(f"m = {rep.m}\nN = {rep.N}\nmax_anticommutator_dev = {fmt(worst)}")
        if config.m % 2 == 0:
            rank = int(round(np.trace(chirality_projector(rep)).real))
            print(f"half_spinor_rank = {rank}")
    else:
        phi, a = make_initial(config.initial_spec(), lat, params.N)
        if args.what == "gauge":
            rng = np.random.Generator(np.random.PCG64(config.seed + 1))
            chi = rng.standard_normal(lat.shape)
            before = sw_functional(phi, a, params)
            after = sw_functional(*gauge_transform(phi, a, chi), params)
            rel = abs(after - before) / max(abs(before), 1e-300)
            ok = rel <= 1e-12
            print(f"sw = {fmt(before)}\nsw_gauged = {fmt(after)}\nrel_dev = {fmt(rel)}")
        else:
            report = gradient_check(phi, a, params, step=1e-4, seed=config.seed)
            ok = report.max_rel_err <= 1e-6
            print(f"max_rel_err = {fmt(report.max_rel_err)}\nmax_abs_err = {fmt(report.max_abs_err)}")
    print(f"check {args.what}: {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evolve a configuration and write snapshots and energy.csv")
    run.add_argument("--config", required=True)
    run.add_argument("--out")

    diag = sub.add_parser("diagnose", help="analyse a stored history")
    diag.add_argument("kind", choices=["monotonicity", "detect", "profile", "rescale"])
    diag.add_argument("--history", required=True)
    diag.add_argument("--out", help="directory for CSV output (default: the history directory)")
    diag.add_argument("--x0", help="comma separated point")
    diag.add_argument("--t0", type=float)
    diag.add_argument("--radii", help="comma separated radii")
    diag.add_argument("--delta", type=float, default=0.05)
    diag.add_argument("--ratio", type=int, default=2)

    check = sub.add_parser("check", help="self-checks on a configuration")
    check.add_argument("what", choices=["clifford", "gauge", "gradient"])
    check.add_argument("--config", required=True)
    return parser


def _fail(exc: SWFlowError, code: int) -> int:
    message = " ".join(str(exc).split())
    print(f"error kind={exc.kind} {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return run_command(_load_config(args.config), args.out)
        if args.command == "diagnose":
            return diagnose_command(args)
        return check_command(args)
    except ConfigurationError as exc:
        return _fail(exc, EXIT_CONFIG)
    except BlowUpError as exc:
        return _fail(exc, EXIT_BLOWUP)
    except (PreconditionError, DomainError) as exc:
        return _fail(exc, EXIT_PRECONDITION)
    except FormatError as exc:
        return _fail(exc, EXIT_FORMAT)
    except SWFlowError as exc:
        return _fail(exc, EXIT_PRECONDITION)
    except OSError as exc:
        print(f"error kind=io {exc.strerror}: {exc.filename}", file=sys.stderr)
        return EXIT_FORMAT
    except Exception as exc:  # keep the single-line contract for unexpected failures
        message = " ".join(str(exc).split())
        print(f"error kind=internal {type(exc).__name__}: {message}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
