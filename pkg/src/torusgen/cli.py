"""Command-line interface: sample, bench, validate, plot.

Exit codes: 0 success, 1 validation failure, 2 invalid arguments or
parameters, 3 output I/O failure.  Every command takes --seed and, with it
fixed, writes byte-identical output (bench additionally needs --no-timing,
since wall-clock columns vary by run).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import validation
from .distributions import (
    AreaUniformMarginal,
    KatoJones,
    TorusWeighted,
    VonMises,
    WrappedCauchy,
)
from .geometry import TWO_PI, TorusGeometry, embed_angles
from .samplers import (
    RngStream,
    aur_sample,
    eau_sample,
    har_build,
    har_marginal_sampler,
    har_sample,
    har_sample_batch,
    torus_sample,
    uniform_marginal_sampler,
    vmbfr_sample,
)

__all__ = ["main"]

_TORUS_DISTS = ("torus-uniform", "vm-torus", "wc-torus", "kj-torus")
_CIRCLE_DISTS = ("area-marginal", "von-mises", "wrapped-cauchy", "kato-jones")
_DEFAULT_SAMPLER = {
    "torus-uniform": "eau",
    "area-marginal": "eau",
    "vm-torus": "har",
    "wc-torus": "har",
    "kj-torus": "har",
    "von-mises": "har",
    "wrapped-cauchy": "har",
    "kato-jones": "har",
}
_VALID_SAMPLERS = {
    "torus-uniform": ("eau", "aur", "har", "har-batch"),
    "area-marginal": ("eau", "aur", "har", "har-batch"),
    "vm-torus": ("har", "har-batch"),
    "wc-torus": ("har", "har-batch"),
    "kj-torus": ("har", "har-batch"),
    "von-mises": ("har", "har-batch", "vmbfr"),
    "wrapped-cauchy": ("har", "har-batch"),
    "kato-jones": ("har", "har-batch"),
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusgen",
        description="Random-variate generation on the circle and the curved torus surface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="RNG seed (default 0)")
    common.add_argument(
        "--algorithm", choices=("pcg64", "philox"), default="pcg64",
        help="bit generator backing the seed",
    )
    common.add_argument("--out", type=Path, default=None, help="output path (default stdout)")

    p = sub.add_parser(
        "sample", parents=[common], help="draw angles or surface points"
    )
    p.add_argument("--dist", required=True, choices=_TORUS_DISTS + _CIRCLE_DISTS)
    p.add_argument(
        "--sampler", default="auto",
        choices=("auto", "eau", "aur", "har", "har-batch", "vmbfr"),
    )
    p.add_argument("-n", "--count", type=int, default=1000, help="number of draws")
    p.add_argument("-R", "--major-radius", type=float, default=2.0, dest="major_radius")
    p.add_argument("-r", "--minor-radius", type=float, default=1.0, dest="minor_radius")
    p.add_argument("-a", "--aspect", type=float, default=None,
                   help="aspect ratio for circle-only area marginals (default r/R)")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.3)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--partitions", type=int, default=validation.DEFAULT_PARTITIONS)
    p.add_argument("--coords", choices=("angles", "xyz"), default="angles",
                   help="emit parameter angles or embedded 3-D points")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser(
        "bench", parents=[common], help="reproduce an acceptance-rate table"
    )
    p.add_argument("--table", type=int, required=True, choices=sorted(validation.TABLE_GRIDS))
    p.add_argument("-n", "--count", type=int, default=None, help="draws per cell")
    p.add_argument("--partitions", type=int, default=validation.DEFAULT_PARTITIONS)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall-clock columns for byte-reproducible output")
    p.add_argument("--no-figure", action="store_true",
                   help="skip the acceptance-rate figure next to the report")
    p.set_defaults(handler=_cmd_bench)

    p = sub.add_parser(
        "validate", parents=[common], help="run distributional and envelope checks"
    )
    p.add_argument("--check", action="append", default=None,
                   choices=validation.available_checks(),
                   help="run one named check (repeatable; default: all)")
    p.add_argument("-n", "--count", type=int, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("-a", "--aspect", type=float, default=None)
    p.add_argument("-R", "--major-radius", type=float, default=None, dest="major_radius")
    p.add_argument("-r", "--minor-radius", type=float, default=None, dest="minor_radius")
    p.add_argument("--partitions", type=int, default=None)
    p.add_argument("--grid-size", type=int, default=None)
    p.add_argument("--endpoint-only", action="store_true",
                   help="build envelopes without interior-maximum lifting")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser(
        "plot", parents=[common], help="render a figure from samples or a bench report"
    )
    p.add_argument("--kind", required=True, choices=("histogram", "quadrants", "bench"))
    p.add_argument("--in", dest="input", type=Path, required=True,
                   help="sample CSV (histogram, quadrants) or bench JSON (bench)")
    p.add_argument("--bins", type=int, default=36)
    p.add_argument("--column", default=None,
                   help="which sample column to histogram (default: theta2 or theta)")
    p.add_argument("--dist", default=None, choices=_TORUS_DISTS + _CIRCLE_DISTS,
                   help="overlay this target density on the histogram")
    p.add_argument("-R", "--major-radius", type=float, default=2.0, dest="major_radius")
    p.add_argument("-r", "--minor-radius", type=float, default=1.0, dest="minor_radius")
    p.add_argument("-a", "--aspect", type=float, default=None)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.3)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--format", choices=("svg",), default="svg")
    p.set_defaults(handler=_cmd_plot)

    return parser


def _u64(text: str) -> int:
    value = int(text)
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


# ---------------------------------------------------------------------------
# sample


def _marginal_density(args, aspect: float):
    """The circle density selected by --dist, minus any torus weighting."""
    if args.dist in ("torus-uniform", "area-marginal"):
        return AreaUniformMarginal(aspect)
    if args.dist in ("vm-torus", "von-mises"):
        return VonMises(args.mu, args.kappa)
    if args.dist in ("wc-torus", "wrapped-cauchy"):
        return WrappedCauchy(args.mu, args.rho)
    return KatoJones(args.mu, args.nu, args.rho, args.kappa)


def _cmd_sample(args) -> int:
    n = args.count
    if n < 1:
        raise ValueError(f"count must be positive, got {n}")
    sampler = args.sampler if args.sampler != "auto" else _DEFAULT_SAMPLER[args.dist]
    if sampler not in _VALID_SAMPLERS[args.dist]:
        raise ValueError(
            f"sampler {sampler!r} cannot draw from {args.dist!r}; "
            f"choose from {_VALID_SAMPLERS[args.dist]}"
        )
    rng = RngStream(args.seed, args.algorithm)
    torus = args.dist in _TORUS_DISTS
    geometry = None
    if torus or args.aspect is None:
        geometry = TorusGeometry(args.major_radius, args.minor_radius)
    aspect = geometry.aspect if args.aspect is None else args.aspect

    if torus:
        pairs = _draw_torus(args, sampler, n, aspect, rng)
        if args.coords == "xyz":
            columns = ("x", "y", "z")
            data = embed_angles(pairs[:, 0], pairs[:, 1], geometry)
        else:
            columns = ("theta1", "theta2")
            data = pairs
    else:
        if args.coords == "xyz":
            raise ValueError("--coords xyz requires a torus distribution")
        columns = ("theta",)
        data = _draw_circle(args, sampler, n, aspect, rng)[:, None]

    payload = {
        "columns": list(columns),
        "dist": args.dist,
        "sampler": sampler,
        "seed": args.seed,
        "n": n,
        "data": [[float(v) for v in row] for row in data],
    }
    if args.format == "csv":
        _write_csv(args.out, columns, data)
    else:
        _write_json(args.out, payload)
    return 0


def _draw_torus(args, sampler, n, aspect, rng):
    """Angle pairs for a torus distribution, theta2 first then theta1."""
    if args.dist == "torus-uniform":
        if sampler == "eau":
            return eau_sample(n, aspect, rng)
        if sampler == "aur":
            theta2_fn = lambda count, stream: aur_sample(count, aspect, stream)[0]
        else:
            marginal = AreaUniformMarginal(aspect)
            theta2_fn = _har_engine(marginal, sampler, args.partitions)
        theta1_fn = uniform_marginal_sampler()
    else:
        base = _marginal_density(args, aspect)
        theta2_fn = _har_engine(TorusWeighted(base, aspect), sampler, args.partitions)
        theta1_fn = har_marginal_sampler(base, args.partitions)
    geometry = TorusGeometry(args.major_radius, args.minor_radius)
    pairs, _ = torus_sample(theta1_fn, theta2_fn, n, rng, geometry)
    return pairs


def _draw_circle(args, sampler, n, aspect, rng):
    density = _marginal_density(args, aspect)
    if sampler == "eau":
        return eau_sample(n, aspect, rng)[:, 1]
    if sampler == "aur":
        return aur_sample(n, aspect, rng)[0]
    if sampler == "vmbfr":
        return vmbfr_sample(n, args.mu, args.kappa, rng)[0]
    envelope = har_build(density, args.partitions)
    draw = har_sample if sampler == "har" else har_sample_batch
    return draw(density, envelope, n, rng)[0]


def _har_engine(density, sampler, partitions):
    envelope = har_build(density, partitions)
    draw = har_sample_batch if sampler == "har-batch" else har_sample

    def fn(count, stream):
        return draw(density, envelope, count, stream)[0]

    return fn


# ---------------------------------------------------------------------------
# bench


def _cmd_bench(args) -> int:
    if args.count is not None and args.count < 1:
        raise ValueError(f"count must be positive, got {args.count}")
    table = validation.reference_table(
        args.table,
        n=args.count,
        seed=args.seed,
        partitions=args.partitions,
        algorithm=args.algorithm,
        include_timing=not args.no_timing,
    )
    if args.format == "json":
        _write_json(args.out, table)
    else:
        _write_bench_csv(args.out, table)
    if args.out is not None and not args.no_figure:
        from .figures import bench_figure, save_figure

        save_figure(bench_figure(table), Path(args.out).with_suffix(".svg"))
    return 0


def _write_bench_csv(out, table):
    """One row per (sampler, metric), one column per grid value."""
    param = validation.TABLE_GRIDS[table["table_id"]][0]
    values = validation.TABLE_GRIDS[table["table_id"]][1]
    samplers = list(dict.fromkeys(row["sampler"] for row in table["rows"]))
    lines = [["sampler", "metric", *[_fmt(v) for v in values]]]
    for name in samplers:
        rows = [r for r in table["rows"] if r["sampler"] == name]
        rows.sort(key=lambda r: values.index(r["params"][param]))
        lines.append([name, "rate_percent", *[_fmt(r["rate_percent"]) for r in rows]])
        timing = [r["ns_per_sample"] for r in rows]
        if all(t is not None for t in timing):
            lines.append([name, "ns_per_sample", *[_fmt(t) for t in timing]])
    _write_rows(out, lines)


# ---------------------------------------------------------------------------
# validate


def _cmd_validate(args) -> int:
    names = args.check or list(validation.available_checks())
    params = {
        key: value
        for key, value in (
            ("kappa", args.kappa),
            ("mu", args.mu),
            ("a", args.aspect),
            ("R", args.major_radius),
            ("r", args.minor_radius),
            ("partitions", args.partitions),
            ("grid_size", args.grid_size),
            ("n", args.count),
        )
        if value is not None
    }
    if args.endpoint_only:
        params["endpoint_only"] = True
    results = []
    for name in names:
        result = validation.run_check(name, seed=args.seed, params=params)
        results.append(result)
        status = "pass" if result["passed"] else "FAIL"
        print(f"check {name}: {status}")
    report = {
        "seed": args.seed,
        "params": params,
        "checks": results,
        "passed": all(r["passed"] for r in results),
    }
    if args.out is not None:
        _write_json(args.out, report)
    if not report["passed"]:
        failing = ", ".join(r["name"] for r in results if not r["passed"])
        print(f"validation failed: {failing}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# plot


def _cmd_plot(args) -> int:
    from . import figures

    if args.out is None:
        raise ValueError("plot requires --out (SVG output path)")
    if args.kind == "bench":
        with open(args.input) as fh:
            table = json.load(fh)
        figures.save_figure(figures.bench_figure(table), args.out)
        return 0

    columns, data = _read_csv(args.input)
    if args.kind == "quadrants":
        if columns[:2] != ["theta1", "theta2"]:
            raise ValueError("quadrants plot needs theta1,theta2 sample columns")
        geometry = TorusGeometry(args.major_radius, args.minor_radius)
        table = validation.chi_square_quadrants(data[:, :2], geometry)
        figures.save_figure(figures.quadrant_figure(table), args.out)
        return 0

    column = args.column or ("theta2" if "theta2" in columns else "theta")
    if column not in columns:
        raise ValueError(f"column {column!r} not in input columns {columns}")
    sample = data[:, columns.index(column)]
    edges, densities = validation.histogram(sample, bins=args.bins)
    mass = float((densities * np.diff(edges)).sum())
    if abs(mass - 1.0) > 1e-3:
        raise ValueError(f"histogram bar integrals sum to {mass}, expected 1")
    overlay = None
    if args.dist is not None:
        aspect = args.aspect
        if aspect is None:
            aspect = TorusGeometry(args.major_radius, args.minor_radius).aspect
        base = _marginal_density(args, aspect)
        target = TorusWeighted(base, aspect) if args.dist in _TORUS_DISTS[1:] else base
        overlay = target.evaluate
    figures.save_figure(
        figures.histogram_figure(edges, densities, overlay=overlay, xlabel=column),
        args.out,
    )
    return 0


# ---------------------------------------------------------------------------
# I/O helpers


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_rows(out, rows) -> None:
    with _open_out(out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


def _write_csv(out, columns, data) -> None:
    rows = [list(columns)]
    rows.extend([_fmt(v) for v in row] for row in np.atleast_2d(data))
    _write_rows(out, rows)


def _write_json(out, payload) -> None:
    with _open_out(out) as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _read_csv(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            columns = [c.strip() for c in next(reader)]
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        values = [[float(v) for v in row] for row in reader if row]
    if not values:
        raise ValueError(f"{path} contains no samples")
    return columns, np.asarray(values)


if __name__ == "__main__":
    sys.exit(main())
