"""Command line driver: tower, approx, conjugate, wm, sample, roundtrip.

Exit codes: 0 success, 1 configuration error (bad flags, bad config file,
bad scenario parameters), 2 precondition or verification failure.  Every
subcommand is deterministic given its flags; thread count never changes
output bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from pathlib import Path

from .core import CellSpace, perm_from_text, perm_to_text, rotation
from .approx import make_piecewise, piecewise_approximate
from .conjugation import conjugation_pipeline
from .errors import ConfigError, ErgolabError
from .mixing import WMReport, wm_profile
from .scenarios import Scenario, genericity_sample, scenario_build
from .skew import flatten, skew_from_text, skew_to_text
from .towers import build_tower

_INT_KEYS = {"N", "M", "n", "seed", "trials", "steps", "threads", "depth", "kmax"}
_FRACTION_KEYS = {"eps"}
_STR_KEYS = {"scenario", "out"}
_BOOL_KEYS = {"exact"}
_ALL_KEYS = _INT_KEYS | _FRACTION_KEYS | _STR_KEYS | _BOOL_KEYS


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract here is exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _coerce(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FRACTION_KEYS:
            return Fraction(raw)
        if key in _BOOL_KEYS:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return raw
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None


def load_config(path: str) -> dict:
    """Parse a UTF-8 ``key = value`` file; ``#`` starts a comment line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    options = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        options[key] = _coerce(key, value.strip())
    return options


def _merge(args: argparse.Namespace, keys: dict) -> dict:
    """CLI value if given, else config file value, else the built-in default."""
    config = load_config(args.config) if args.config else {}
    merged = {}
    for key, default in keys.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
        elif key in config:
            merged[key] = config[key]
        else:
            merged[key] = default
    return merged


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _cell_list(members) -> str:
    return " ".join(str(c) for c in sorted(members))


def _value_str(v) -> str:
    return _frac(v) if isinstance(v, Fraction) else repr(v)


def _cmd_tower(args) -> int:
    o = _merge(args, {"N": 12, "n": 5, "eps": Fraction(1, 4), "out": None})
    if o["N"] < 1:
        raise ConfigError("N must be >= 1")
    t0 = rotation(CellSpace(o["N"]))
    tower = build_tower(t0, o["n"], Fraction(o["eps"]))
    lines = [
        "ergolab-tower v1",
        f"N {o['N']}",
        f"height {tower.height}",
        f"error_mass {_frac(tower.error_mass)}",
        f"base: {_cell_list(tower.base_set.members)}",
    ]
    lines.extend(
        f"level {i}: {_cell_list(level.members)}"
        for i, level in enumerate(tower.levels)
    )
    lines.append(f"error: {_cell_list(tower.error_set.members)}")
    _emit("\n".join(lines) + "\n", o["out"])
    return 0


def _cmd_approx(args) -> int:
    o = _merge(
        args,
        {
            "scenario": "random_piecewise",
            "N": 16,
            "M": 4,
            "eps": Fraction(1, 4),
            "seed": 1,
            "out": None,
        },
    )
    system = scenario_build(Scenario(o["scenario"], o["N"], o["M"], o["seed"]))
    spec = piecewise_approximate(system, Fraction(o["eps"]))
    rebuilt = make_piecewise(system.base_map, spec)
    original, approx_flat = flatten(system), flatten(rebuilt)
    differing = sum(
        1 for a, b in zip(original.images, approx_flat.images) if a != b
    )
    distance = Fraction(differing, original.space.resolution)
    lines = [
        "ergolab-approx v1",
        f"N {o['N']}",
        f"M {o['M']}",
        f"eps {_frac(Fraction(o['eps']))}",
        f"labels {len(spec.reps)}",
    ]
    for j, rep in enumerate(spec.reps):
        cells = _cell_list(spec.partition.cells_of(j).members)
        images = " ".join(str(i) for i in rep.images)
        lines.append(f"label {j} cells {cells} rep {images}")
    lines.append(f"distance {_frac(distance)}")
    _emit("\n".join(lines) + "\n", o["out"])
    return 0


def _cmd_conjugate(args) -> int:
    o = _merge(
        args,
        {
            "scenario": "conjugation_demo",
            "N": 60,
            "M": 4,
            "n": None,
            "eps": Fraction(1, 4),
            "seed": 1,
            "out": None,
        },
    )
    eps = Fraction(o["eps"])
    if eps <= 0:
        raise ConfigError("eps must be positive")
    height = o["n"] if o["n"] is not None else int(2 / eps) + 1
    system = scenario_build(Scenario(o["scenario"], o["N"], o["M"], o["seed"]))
    result = conjugation_pipeline(
        system, cluster_eps=eps, height=height, tower_eps=eps / 2
    )
    report = result.report
    lines = [
        "ergolab-conjugate v1",
        f"scenario {o['scenario']}",
        f"N {o['N']}",
        f"M {o['M']}",
        f"height {height}",
        f"cluster_eps {_frac(eps)}",
        f"tower_error {_frac(result.refined.tower.error_mass)}",
        f"columns {len(result.refined.columns)}",
        f"distance {_frac(report.distance)}",
        f"bound {_frac(report.bound)}",
        f"ok {'true' if report.ok else 'false'}",
    ]
    _emit("\n".join(lines) + "\n", o["out"])
    return 0 if report.ok else 2


def _census_summary(census) -> str:
    counts: dict[int, int] = {}
    for length in census:
        counts[length] = counts.get(length, 0) + 1
    return " ".join(f"{length}^{counts[length]}" for length in sorted(counts))


def _wm_csv(report: WMReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["system_id", "A_index", "B_index", "N_steps", "DN", "eps", "member"])
    for row in report.pairs:
        writer.writerow(
            [
                report.system_id,
                row.a_index,
                row.b_index,
                row.n_steps,
                _value_str(row.dn_value),
                _frac(row.eps),
                int(row.member),
            ]
        )
    return buffer.getvalue()


def _cmd_wm(args) -> int:
    o = _merge(
        args,
        {
            "scenario": "product_wm",
            "N": 8,
            "M": 5,
            "seed": 1,
            "steps": 32,
            "depth": 1,
            "kmax": 3,
            "exact": False,
            "threads": 1,
            "out": None,
        },
    )
    scenario = Scenario(o["scenario"], o["N"], o["M"], o["seed"])
    system = scenario_build(scenario)
    report = wm_profile(
        system,
        family_depth=o["depth"],
        k_max=o["kmax"],
        n_max=o["steps"],
        exact=o["exact"],
        system_id=scenario.system_id(),
        threads=o["threads"],
    )
    _emit(_wm_csv(report), o["out"])
    if o["out"]:
        defect = _frac(report.defect) if report.defect is not None else "NA"
        sys.stdout.write(
            f"system {report.system_id}\n"
            f"defect {defect}\n"
            f"diagonal_census {_census_summary(report.diagonal_census)}\n"
            f"offdiag_census {_census_summary(report.off_diagonal_census)}\n"
            f"rows {len(report.pairs)}\n"
        )
    return 0


def _cmd_sample(args) -> int:
    o = _merge(
        args,
        {
            "N": 32,
            "M": 5,
            "trials": 10,
            "seed": 1,
            "steps": 64,
            "eps": Fraction(1, 20),
            "exact": False,
            "threads": 1,
            "out": None,
        },
    )
    base = rotation(CellSpace(o["N"]))
    rows = genericity_sample(
        base,
        trials=o["trials"],
        fiber_resolution=o["M"],
        seed=o["seed"],
        n_steps=o["steps"],
        eps=Fraction(o["eps"]),
        exact=o["exact"],
        threads=o["threads"],
    )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["trial", "scenario", "defect", "DN", "eps", "member"])
    for row in rows:
        writer.writerow(
            [
                row.trial,
                row.label,
                _frac(row.defect),
                _value_str(row.dn_value),
                _frac(row.eps),
                int(row.member),
            ]
        )
    _emit(buffer.getvalue(), o["out"])
    return 0


def _cmd_roundtrip(args) -> int:
    o = _merge(
        args,
        {"scenario": "random_piecewise", "N": 8, "M": 3, "seed": 1, "out": None},
    )
    scenario = Scenario(o["scenario"], o["N"], o["M"], o["seed"])
    system = scenario_build(scenario)

    perm_text = perm_to_text(system.base_map)
    perm_ok = (
        perm_from_text(perm_text) == system.base_map
        and perm_to_text(perm_from_text(perm_text)) == perm_text
    )
    skew_text = skew_to_text(system)
    skew_ok = (
        skew_from_text(skew_text) == system
        and skew_to_text(skew_from_text(skew_text)) == skew_text
    )
    lines = [
        "ergolab-roundtrip v1",
        f"system {scenario.system_id()}",
        f"perm_bytes {len(perm_text.encode('utf-8'))} {'ok' if perm_ok else 'FAIL'}",
        f"skew_bytes {len(skew_text.encode('utf-8'))} {'ok' if skew_ok else 'FAIL'}",
    ]
    _emit("\n".join(lines) + "\n", o["out"])
    return 0 if perm_ok and skew_ok else 2


def _add_options(sub: argparse.ArgumentParser, names: list[str]) -> None:
    for name in names:
        if name in _INT_KEYS:
            sub.add_argument(f"--{name}", type=int, default=None)
        elif name in _FRACTION_KEYS:
            sub.add_argument(f"--{name}", type=Fraction, default=None)
        elif name in _BOOL_KEYS:
            sub.add_argument(
                f"--{name}", action="store_const", const=True, default=None
            )
        else:
            sub.add_argument(f"--{name}", default=None)
    sub.add_argument("--config", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ergolab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    handlers = {
        "tower": (_cmd_tower, ["N", "n", "eps", "out"]),
        "approx": (_cmd_approx, ["scenario", "N", "M", "eps", "seed", "out"]),
        "conjugate": (_cmd_conjugate, ["scenario", "N", "M", "n", "eps", "seed", "out"]),
        "wm": (
            _cmd_wm,
            ["scenario", "N", "M", "seed", "steps", "depth", "kmax", "exact", "threads", "out"],
        ),
        "sample": (
            _cmd_sample,
            ["N", "M", "trials", "seed", "steps", "eps", "exact", "threads", "out"],
        ),
        "roundtrip": (_cmd_roundtrip, ["scenario", "N", "M", "seed", "out"]),
    }
    for name, (handler, options) in handlers.items():
        sp = sub.add_parser(name)
        _add_options(sp, options)
        sp.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except ConfigError as exc:
        print(f"ergolab: error: {exc}", file=sys.stderr)
        return 1
    except ErgolabError as exc:
        print(f"ergolab: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return int(code) if code is not None else 0


run_cli = main


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
