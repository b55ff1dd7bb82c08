"""Command-line entry point: ``raqm <subcommand> [flags]``.

Exit codes: 0 success (or a defined verdict), 1 undefined verdict,
2 usage/config error, 3 runtime infeasibility (no compatible setting).

Flags can also come from a flat ``key = value`` file given with
``--config``; explicit flags win over the file, the file wins over the
``RAQM_SEED`` environment variable, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional

from . import __version__
from .bell import NominalSetting, mi_diagnostic, run_bell_experiment
from .bitstring import HiddenPermutation, make_qubit
from .errors import DomainError, NoCompatibleSetting, RaqmError
from .exact import RationalAngle, format_rational, parse_rational
from .geometry import complementarity_census, swap_counterfactual_defined
from .padic import PadicWord, encode_2adic, shift_collapse
from .quaternion import check_quaternion_relations

EXIT_OK, EXIT_UNDEFINED, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3

DEFAULTS = {
    "L": 3600,
    "seed": 0,
    "runs": 10_000,
    "tolerance": "1/360",
    "out": None,
    "format": "json",
    "nominals": "0,1/6,1/3",
    "nominal": "0",
    "window": "1/100",
    "bins": 30,
    "m": None,
    "n": 0,
}

SUBCOMMAND_DEFAULTS = {
    "mi-diagnostic": {"runs": 1000},
}


class UsageError(Exception):
    pass


def read_config(path: str) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(args: argparse.Namespace) -> Dict[str, object]:
    """Merge flags, config file, RAQM_SEED and defaults, in that order."""
    cfg = dict(DEFAULTS)
    cfg.update(SUBCOMMAND_DEFAULTS.get(args.command, {}))
    env_seed = os.environ.get("RAQM_SEED")
    if env_seed is not None:
        cfg["seed"] = env_seed
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config", "func"):
            cfg[key] = value
    return cfg


def _int(cfg, key, minimum=None) -> int:
    try:
        v = int(cfg[key])
    except (TypeError, ValueError):
        raise UsageError(f"--{key} must be an integer, got {cfg[key]!r}") from None
    if minimum is not None and v < minimum:
        raise UsageError(f"--{key} must be at least {minimum}, got {v}")
    return v


def _rat(cfg, key) -> Fraction:
    try:
        return parse_rational(str(cfg[key]))
    except ValueError as exc:
        raise UsageError(f"--{key}: {exc}") from None


def _seed(cfg) -> int:
    seed = _int(cfg, "seed", 0)
    if seed >= 1 << 64:
        raise UsageError("--seed must fit in 64 bits")
    return seed


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _out_dir(cfg, default: str) -> Path:
    return Path(cfg["out"] if cfg["out"] is not None else default)


# ---------------------------------------------------------------------------


def _settings(cfg) -> Dict[str, NominalSetting]:
    tol = _rat(cfg, "tolerance")
    if tol <= 0:
        raise UsageError("--tolerance must be positive")
    parts = [p.strip() for p in str(cfg["nominals"]).split(",")]
    if len(parts) != 3:
        raise UsageError("--nominals takes three comma-separated angles in turns")
    try:
        angles = [parse_rational(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"--nominals: {exc}") from None
    return {k: NominalSetting(RationalAngle(a), tol) for k, a in zip("ABC", angles)}


def cmd_bell(cfg) -> int:
    L = _int(cfg, "L", 2)
    runs = _int(cfg, "runs", 1)
    seed = _seed(cfg)
    fmt = cfg["format"]
    settings = _settings(cfg)
    exp = run_bell_experiment(settings, L, runs, seed)
    out = _out_dir(cfg, "raqm-bell")
    _write(out / "bell_report.json", dump_json(exp.report.to_json()))
    if fmt == "json":
        _write(out / "bell_runs.jsonl", "".join(
            json.dumps(log.to_json(), sort_keys=True) + "\n" for log in exp.logs
        ))
    else:
        _write(out / "bell_runs.csv", _csv_text(
            ["run_id", "ensemble", "xi_seed", "jitter_seed", "exact_cos", "alice", "bob", "position"],
            ([log.run_id, log.ensemble_tag, log.xi_seed, log.jitter_seed, format_rational(log.exact_cos),
              log.outcomes[0], log.outcomes[1], log.position] for log in exp.logs),
        ))
    table = exp.correlation_table()
    _write(out / "bell_correlation.csv", _csv_text(
        ["ensemble", "exact_cos", "runs", "empirical_Co", "exact_Co"],
        ([r["ensemble"], r["exact_cos"], r["runs"], r["empirical_Co"], r["exact_Co"]] for r in table),
    ))
    rep = exp.report
    print(f"exact statistic: {format_rational(rep.statistic)} (violates Bell: {rep.statistic > 1})")
    print(f"empirical statistic: {rep.empirical_statistic:.6f} +/- {rep.empirical_stderr:.6f}")
    print(f"seed: {seed}  artifacts: {out}")
    return EXIT_OK


def cmd_mz(cfg) -> int:
    L = _int(cfg, "L", 1)
    window = _rat(cfg, "window")
    if window <= 0:
        raise UsageError("--window must be positive")
    nominal = RationalAngle(_rat(cfg, "nominal"))
    report = complementarity_census(L, nominal, window).to_json()
    report["schema"] = "raqm.census/1"
    text = dump_json(report)
    if cfg["out"] is not None:
        _write(Path(cfg["out"]) / "mz_census.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_triangle(cfg) -> int:
    try:
        a = parse_rational(cfg["cos_AB"])
        c = parse_rational(cfg["cos_BC"])
        phi = RationalAngle(parse_rational(cfg["phi_B"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    verdict = swap_counterfactual_defined(a, c, phi)
    report = verdict.to_json()
    report.update({
        "schema": "raqm.triangle/1",
        "cos_AB": format_rational(a),
        "cos_BC": format_rational(c),
        "phi_B": phi.to_json(),
    })
    text = dump_json(report)
    if cfg["out"] is not None:
        _write(Path(cfg["out"]) / "triangle.json", text)
    sys.stdout.write(text)
    return EXIT_OK if verdict.defined else EXIT_UNDEFINED


def cmd_collapse(cfg) -> int:
    meta = {}
    if cfg.get("word"):
        try:
            word = PadicWord.parse(cfg["word"], 2)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        if cfg["m"] is None:
            raise UsageError("give a word, or --L/--m (with optional --n, --seed)")
        L = _int(cfg, "L", 1)
        m = _int(cfg, "m", 0)
        n = _int(cfg, "n", 0)
        seed = _seed(cfg)
        try:
            state = make_qubit(L, m, n, HiddenPermutation.from_seed(seed, L))
        except RaqmError as exc:
            raise UsageError(str(exc)) from None
        word = encode_2adic(state.ordered)
        meta = {"L": L, "m": m, "n": n, "xi_seed": seed}
    trace = shift_collapse(word)
    report = {"schema": "raqm.collapse/1", "step_count": trace.step_count, "steps": trace.to_json()}
    report.update(meta)
    if cfg["out"] is not None:
        out = Path(cfg["out"])
        if cfg["format"] == "csv":
            _write(out / "collapse.csv", _csv_text(["step", "word", "length"], trace.csv_rows()))
        else:
            _write(out / "collapse.json", dump_json(report))
    print(f"steps: {trace.step_count}")
    print(f"final: {trace.final}")
    return EXIT_OK


def cmd_mi(cfg) -> int:
    L = _int(cfg, "L", 2)
    runs = _int(cfg, "runs", 1000)
    seed = _seed(cfg)
    bins = _int(cfg, "bins", 2)
    report = mi_diagnostic(_settings(cfg), L, runs, seed, bins).to_json()
    report.update({"L": L, "master_seed": seed, "runs": runs})
    text = dump_json(report)
    if cfg["out"] is not None:
        _write(Path(cfg["out"]) / "mi_report.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_quaternion(cfg) -> int:
    raw = cfg.get("levels") or ",".join(str(4 << i) for i in range(9))
    try:
        levels = [int(x) for x in str(raw).split(",")]
        results = {str(L): check_quaternion_relations(L) for L in levels}
    except (ValueError, RaqmError) as exc:
        raise UsageError(str(exc)) from None
    ok = all(all(r.values()) for r in results.values())
    text = dump_json({"schema": "raqm.quaternion_check/1", "all_hold": ok, "levels": results})
    if cfg["out"] is not None:
        _write(Path(cfg["out"]) / "quaternion_check.json", text)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_UNDEFINED


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, runs=False, tolerance=False) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--L", type=str, help="discretisation level")
    p.add_argument("--seed", type=str, help="master seed (falls back to $RAQM_SEED)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("json", "csv"))
    if runs:
        p.add_argument("--runs", type=str)
    if tolerance:
        p.add_argument("--tolerance", type=str, help="nominal half-width in turns, p/q")
        p.add_argument("--nominals", type=str, help="A,B,C directions in turns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="raqm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"raqm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bell", help="run a three-ensemble Bell experiment")
    _common(p, runs=True, tolerance=True)
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("mz", help="complementarity census around a nominal phase")
    _common(p)
    p.add_argument("--nominal", help="nominal phase in turns, p/q")
    p.add_argument("--window", help="half-width in turns, p/q")
    p.set_defaults(func=cmd_mz)

    p = sub.add_parser("triangle", help="is the third side of a triangle rational?")
    p.add_argument("cos_AB")
    p.add_argument("cos_BC")
    p.add_argument("phi_B", help="angle at B in turns, p/q")
    p.add_argument("--out")
    p.set_defaults(func=cmd_triangle)

    p = sub.add_parser("collapse", help="shift-map collapse of a 2-adic word")
    _common(p)
    p.add_argument("word", nargs="?", help="digit string such as 10011010")
    p.add_argument("--m", type=str, help="number of +1 bits when building a state")
    p.add_argument("--n", type=str, help="phase rotation when building a state")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("mi-diagnostic", help="measurement-independence diagnostic")
    _common(p, runs=True, tolerance=True)
    p.add_argument("--bins", type=str)
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("quaternion-check", help="verify the quaternion relations")
    _common(p)
    p.add_argument("--levels", help="comma-separated L values (default 4,8,...,1024)")
    p.set_defaults(func=cmd_quaternion)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return args.func(cfg)
    except UsageError as exc:
        print(f"raqm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoCompatibleSetting as exc:
        print(f"raqm {args.command}: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, RaqmError) as exc:
        print(f"raqm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())


def load_schema(name: str) -> dict:
    """One of the shipped JSON schemas, e.g. ``load_schema("bell_report")``."""
    from importlib.resources import files

    return json.loads((files("raqm") / "schemas" / f"{name}.json").read_text(encoding="utf-8"))
