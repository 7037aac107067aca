"""Command-line front end.

Every subcommand accepts ``--scenario FILE`` (a JSON object whose keys are the
snake_case field names, optionally grouped under ``"link"`` and ``"region"``)
and explicit flags, which take precedence.  Output goes to stdout or
``--out PATH``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

from spacemimo import channel, geometry, kernel, linkmodel, montecarlo, tradeoff
from spacemimo.errors import NumericalError, ValidationError

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

LINK_FIELDS = (
    "power_watts", "bandwidth_hz", "tx_aperture_m2", "rx_aperture_m2",
    "range_m", "wavelength_m", "loss_factor", "noise_psd_w_per_hz",
)
# flags whose values may start with "-" (negative dB ranges)
_RANGE_FLAGS = ("--eta-db",)


def fmt(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return f"{float(x):.12g}"


def parse_range(text: str) -> tuple[float, float, int]:
    """Parse ``lo:hi:steps`` (inclusive endpoints)."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValidationError(f"'eta_db' must look like lo:hi:steps, got {text!r}", field="eta_db")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"'eta_db' must look like lo:hi:steps, got {text!r}", field="eta_db")
    return lo, hi, steps


def parse_int_list(text, field):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"'{field}' must be a comma-separated list of integers", field=field)


def parse_float_list(text, field):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"'{field}' must be a comma-separated list of numbers", field=field)


class Scenario:
    """Merged view of a scenario file and command-line flags (flags win)."""

    def __init__(self, args):
        self.file = {}
        if getattr(args, "scenario", None):
            try:
                with open(args.scenario) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read scenario file: {exc}", field="scenario")
            if not isinstance(data, dict):
                raise ValidationError("scenario file must hold a JSON object", field="scenario")
            for group in ("link", "region"):
                sub = data.pop(group, None)
                if isinstance(sub, dict):
                    for k, v in sub.items():
                        data.setdefault(k, v)
            self.file = data
        self.flags = {k: v for k, v in vars(args).items() if v is not None}

    def get(self, name, default=None):
        if name in self.flags:
            return self.flags[name]
        return self.file.get(name, default)

    def has(self, name):
        return self.get(name) is not None

    def require(self, name):
        v = self.get(name)
        if v is None:
            raise ValidationError(f"missing required field '{name}'", field=name)
        return v

    def number(self, name, default=None, required=True):
        v = self.get(name, default)
        if v is None:
            if required:
                raise ValidationError(f"missing required field '{name}'", field=name)
            return None
        try:
            return float(v)
        except (TypeError, ValueError):
            raise ValidationError(f"field '{name}' must be a number, got {v!r}", field=name)

    def integer(self, name, default=None):
        v = self.get(name, default)
        if v is None:
            raise ValidationError(f"missing required field '{name}'", field=name)
        try:
            iv = int(v)
        except (TypeError, ValueError):
            raise ValidationError(f"field '{name}' must be an integer, got {v!r}", field=name)
        if iv != float(v):
            raise ValidationError(f"field '{name}' must be an integer, got {v!r}", field=name)
        return iv

    def loss_factor(self):
        # an explicit flag of either kind beats any file value
        for source in (self.flags, self.file):
            if source.get("loss_factor") is not None:
                return float(source["loss_factor"])
            if source.get("loss_db") is not None:
                return linkmodel.loss_db_to_factor(float(source["loss_db"]))
        return 1.0

    def link_budget(self):
        values = {name: self.get(name) for name in LINK_FIELDS}
        values["loss_factor"] = self.loss_factor()
        for name in LINK_FIELDS:
            if values[name] is None:
                raise ValidationError(f"missing required field '{name}'", field=name)
        return linkmodel.LinkBudget.from_dict(values)

    def _has_link(self):
        return all(self.has(n) for n in LINK_FIELDS if n != "loss_factor")

    def region(self, strict=True):
        if self.has("c"):
            c = self.number("c")
            return linkmodel.ApertureRegion.from_ratio(
                c, self.number("wavelength_m", 1.0), self.number("range_m", 1.0), strict=strict
            )
        return linkmodel.ApertureRegion(
            self.number("radius_m"), self.number("wavelength_m"), self.number("range_m"), strict=strict
        )

    def gamma(self):
        if "gamma" in self.flags:
            return self.number("gamma")
        if "snr_db" in self.flags:
            return linkmodel.db_to_linear(self.number("snr_db"))
        if self.file.get("gamma") is not None:
            return self.number("gamma")
        if self.file.get("snr_db") is not None:
            return linkmodel.db_to_linear(self.number("snr_db"))
        if self._has_link():
            return linkmodel.input_snr(self.link_budget())
        raise ValidationError("missing required field 'gamma' (or 'snr_db')", field="gamma")

    def g(self, default=None):
        if self.has("g"):
            return self.number("g")
        if self._has_link():
            return linkmodel.channel_gain(self.link_budget())
        if default is not None:
            return default
        raise ValidationError("missing required field 'g'", field="g")


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def tabular(args, header, rows, extra=None) -> str:
    if args.format == "json":
        records = [dict(zip(header, r)) for r in rows]
        return write_json(records if extra is None else {**extra, "rows": records})
    return write_csv(header, rows)


# -- subcommands -----------------------------------------------------------

def cmd_link(args) -> str:
    sc = Scenario(args)
    lb = sc.link_budget()
    g = linkmodel.channel_gain(lb)
    gamma = linkmodel.input_snr(lb)
    return write_json({
        "g": g,
        "gamma": gamma,
        "gamma_db": linkmodel.linear_to_db(gamma),
        "xi_siso": linkmodel.siso_spectral_efficiency(g, gamma),
        "loss_factor": lb.loss_factor,
    })


TRADEOFF_HEADER = ("eta_db", "eta", "xi", "m", "g")


def cmd_tradeoff(args) -> str:
    sc = Scenario(args)
    lo, hi, steps = parse_range(sc.require("eta_db"))
    g = sc.g(default=1.0)
    if sc.has("all_m"):
        ms = sc.get("all_m")
        ms = parse_int_list(ms, "all_m") if isinstance(ms, str) else [int(v) for v in ms]
    else:
        ms = [sc.integer("m")]
    dof_cap = sc.integer("dof_cap") if sc.has("dof_cap") else None
    rows = []
    for m in ms:
        for p in tradeoff.tradeoff_curve(m, g, (lo, hi), steps, dof_cap=dof_cap):
            rows.append((p.eta_db, p.eta, p.xi, p.m, p.g))
    return tabular(args, TRADEOFF_HEADER, rows)


OPTIMAL_HEADER = ("eta_db", "m_star", "xi_star")


def cmd_optimal_m(args) -> str:
    sc = Scenario(args)
    lo, hi, steps = parse_range(sc.require("eta_db"))
    g = sc.g(default=1.0)
    m_max = sc.integer("m_max", tradeoff.DEFAULT_M_MAX)
    dof_cap = sc.integer("dof_cap") if sc.has("dof_cap") else None
    grid = tradeoff.db_grid(lo, hi, steps)
    m_star, xi_star = tradeoff.optimal_antenna_scan(grid, g, m_max=m_max, dof_cap=dof_cap)
    rows = [(float(e), int(m), float(x)) for e, m, x in zip(grid, m_star, xi_star)]
    return tabular(args, OPTIMAL_HEADER, rows)


def cmd_mc(args) -> str:
    sc = Scenario(args)
    m = sc.integer("m")
    gamma = sc.gamma()
    g = sc.g(default=1.0)
    trials = sc.integer("trials", montecarlo.DEFAULT_TRIALS)
    seed = sc.integer("seed", 0)
    workers = sc.integer("workers", 1)
    if sc.has("sweep"):
        ratios = sc.get("sweep")
        ratios = parse_float_list(ratios, "sweep") if isinstance(ratios, str) else ratios
        rows = montecarlo.convergence_sweep(m, gamma, g, ratios, trials, seed, workers)
        return tabular(args, montecarlo.SWEEP_HEADER, [r.as_row() for r in rows])
    cfg = montecarlo.McConfig(m, sc.region(), gamma, g, trials, seed)
    summary = montecarlo.ergodic_estimate(cfg, workers=workers)
    return write_json({**summary.to_dict(), "m": m, "c": cfg.region.aperture_ratio,
                       "gamma": gamma, "g": g, "master_seed": seed})


EIGEN_HEADER = ("index", "singular_value", "squared", "cumulative_fraction")


def cmd_eigen(args) -> str:
    sc = Scenario(args)
    # the operator is defined for any disc, including the rank-one limit c < 1
    region = sc.region(strict=False)
    loss = sc.loss_factor()
    nr = sc.integer("radial_order") if sc.has("radial_order") else None
    na = sc.integer("angular_order") if sc.has("angular_order") else None
    grid = kernel.build_disc_quadrature(region, nr, na)
    spec = kernel.kernel_spectrum(region, loss, grid, method=sc.get("method", "circulant"))
    rows = list(spec.rows())
    if sc.has("top"):
        rows = rows[: sc.integer("top")]
    extra = {
        "region": region.to_dict(),
        "aperture_ratio": region.aperture_ratio,
        "dof": linkmodel.dof_count(region),
        "loss_factor": loss,
        "grid_order": spec.grid_order,
        "expected_energy": spec.expected_energy,
    }
    return tabular(args, EIGEN_HEADER, rows, extra=extra)


def cmd_capacity(args) -> str:
    sc = Scenario(args)
    geo = sc.require("geometry")
    if isinstance(geo, str):
        try:
            with open(geo) as fh:
                geo = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read geometry file: {exc}", field="geometry")
    geom = geometry.ArrayGeometry.from_dict(geo)
    gamma = sc.gamma()
    g = sc.g(default=1.0)
    result = channel.spectral_efficiency(channel.build_channel_matrix(geom), gamma, g)
    out = result.to_dict()
    out["upper_bound"] = channel.capacity_upper_bound(
        geom.m, linkmodel.dof_count(geom.region), gamma, g
    )
    return write_json(out)


# -- parser ----------------------------------------------------------------

def _common(p, tabular_output=True):
    p.add_argument("--scenario", help="JSON scenario file; flags override its values")
    p.add_argument("--out", help="write output here instead of stdout")
    if tabular_output:
        p.add_argument("--format", choices=("csv", "json"), default="csv")


def _region_flags(p):
    p.add_argument("--c", type=float, help="aperture ratio |S|/(lambda d); sets wavelength=range=1 unless given")
    p.add_argument("--radius-m", dest="radius_m", type=float)
    p.add_argument("--wavelength-m", dest="wavelength_m", type=float)
    p.add_argument("--range-m", dest="range_m", type=float)


def _snr_flags(p):
    p.add_argument("--gamma", type=float, help="input SNR, linear")
    p.add_argument("--snr-db", dest="snr_db", type=float, help="input SNR in dB")
    p.add_argument("--g", type=float, help="channel gain, linear")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spacemimo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link", help="channel gain, input SNR and SISO spectral efficiency")
    _common(p, tabular_output=False)
    for name in LINK_FIELDS:
        if name == "loss_factor":
            continue
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    loss = p.add_mutually_exclusive_group()
    loss.add_argument("--loss-factor", dest="loss_factor", type=float, help="linear loss, 0 < L <= 1")
    loss.add_argument("--loss-db", dest="loss_db", type=float, help="loss in dB (positive = attenuation)")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("tradeoff", help="spectral efficiency vs energy per bit curves")
    _common(p)
    p.add_argument("--m", type=int)
    p.add_argument("--all-m", dest="all_m", help="comma-separated antenna counts, one curve each")
    p.add_argument("--g", type=float, help="channel gain (default 1)")
    p.add_argument("--eta-db", dest="eta_db", help="grid lo:hi:steps in dB, inclusive")
    p.add_argument("--dof-cap", dest="dof_cap", type=int, help="cap on usable spatial streams")
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("optimal-m", help="best antenna count per energy per bit")
    _common(p)
    p.add_argument("--g", type=float, help="channel gain (default 1)")
    p.add_argument("--eta-db", dest="eta_db", help="grid lo:hi:steps in dB, inclusive")
    p.add_argument("--m-max", dest="m_max", type=int, help=f"default {tradeoff.DEFAULT_M_MAX}")
    p.add_argument("--dof-cap", dest="dof_cap", type=int)
    p.set_defaults(func=cmd_optimal_m)

    p = sub.add_parser("mc", help="Monte Carlo ergodic spectral efficiency")
    _common(p)
    p.add_argument("--m", type=int)
    _region_flags(p)
    _snr_flags(p)
    p.add_argument("--trials", type=int, help=f"default {montecarlo.DEFAULT_TRIALS}")
    p.add_argument("--seed", type=int, help="64-bit master seed (default 0)")
    p.add_argument("--workers", type=int, help="worker threads; output does not depend on it")
    p.add_argument("--sweep", help="comma-separated aperture ratios; emits the convergence table")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("eigen", help="kernel operator singular-value spectrum")
    _common(p)
    _region_flags(p)
    loss = p.add_mutually_exclusive_group()
    loss.add_argument("--loss-factor", dest="loss_factor", type=float)
    loss.add_argument("--loss-db", dest="loss_db", type=float)
    p.add_argument("--radial-order", dest="radial_order", type=int)
    p.add_argument("--angular-order", dest="angular_order", type=int)
    p.add_argument("--method", choices=("circulant", "dense"))
    p.add_argument("--top", type=int, help="emit only the leading rows")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("capacity", help="spectral efficiency of one geometry file")
    _common(p, tabular_output=False)
    p.add_argument("--geometry", help="geometry JSON: {region, tx, rx}")
    _snr_flags(p)
    p.set_defaults(func=cmd_capacity)
    return parser


def _join_range_flags(argv):
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_join_range_flags(argv))
    args_func = args.func
    del args.func
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            text = args_func(args)
    except ValidationError as exc:
        print(f"spacemimo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"spacemimo {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
