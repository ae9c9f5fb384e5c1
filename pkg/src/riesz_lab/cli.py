"""``riesz-lab`` command line.

Exit codes: 0 all certificates pass, 1 certificate failure, 2 bad
configuration, 3 budget or hypothesis violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bundle import CERT_FILE, COEFF_RE, SPEC_FILE, dumps, read_bundle, write_bundle
from .errors import (BlockFailure, BudgetExceeded, ConfigError, HypothesisFailure, Overflow,
                     RieszLabError, ScheduleViolation, SpecViolation)
from .pipelines import PIPELINES, validate

EXIT_OK, EXIT_CERT, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riesz-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", type=Path, help="JSON config; flags override its fields")
        p.add_argument("--out", type=Path, help="bundle directory (default: out/<command>)")
        return p

    p = add("bad-range", "adapted product for a divergent weighted sum")
    p.add_argument("--lambda", dest="lambda_", help="power:s | csv:path | necreg:path[:n_max]")
    p.add_argument("--depth", type=int)
    p.add_argument("--safety", type=float)
    p.add_argument("--no-classical", action="store_true")

    p = add("hadamard", "lacunary Hadamard partial sums")
    p.add_argument("--n", type=_ints, help="comma separated frequencies")
    p.add_argument("--c", type=_floats, help="comma separated coefficients")
    p.add_argument("--lambda", dest="lambda_")

    p = add("small-support", "classical product against dipping weights")
    p.add_argument("--weights")
    p.add_argument("--eps", type=float)
    p.add_argument("--N", type=_ints)
    p.add_argument("--a", type=_floats)
    p.add_argument("--select", action="store_true")
    p.add_argument("--budget", type=float)

    p = add("psi", "nonnegative polynomial with a spread zero set")
    p.add_argument("--N", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--M", type=int)

    p = add("necreg", "necessary-regularity weights and envelope checks")
    p.add_argument("--schedule", type=Path, help="JSON file with keys N and eps")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = add("uncertainty", "random search for gapped measures")
    p.add_argument("--N", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = add("kernels", "dump kernel coefficients")
    p.add_argument("--kind")
    p.add_argument("--N", type=int)
    p.add_argument("--K-cut", dest="K_cut", type=int)
    p.add_argument("--arc-start", dest="arc_start", type=float)
    p.add_argument("--arc-length", dest="arc_length", type=float)
    p.add_argument("--M", type=int)

    v = sub.add_parser("verify", help="recompute certificates of a saved bundle")
    v.add_argument("bundle", type=Path)
    return ap


_SKIP = {"command", "config", "out", "no_classical", "select"}


def config_from_args(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config is not None:
        try:
            cfg = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config: {e}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    cfg["command"] = args.command
    for key, val in vars(args).items():
        if key in _SKIP or val is None:
            continue
        cfg["lambda" if key == "lambda_" else key] = val
    if getattr(args, "no_classical", False):
        cfg["compare_classical"] = False
    if getattr(args, "select", False):
        cfg["select"] = True
    if args.command == "necreg" and isinstance(cfg.get("schedule"), Path):
        try:
            cfg["schedule"] = json.loads(cfg["schedule"].read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read schedule: {e}") from None
    return validate(cfg)


def _report(command: str, certs, extra: dict | None = None) -> dict:
    failed = [c.name for c in certs if not c.passed]
    return {"command": command, "pass": not failed, "failures": failed,
            "certificates": len(certs), **(extra or {})}


def run_command(cfg: dict, out: Path) -> tuple[int, dict]:
    run, certify = PIPELINES[cfg["command"]]
    res = run(cfg, {})
    # certify exactly what verify will see so the round trip is bit-identical
    certs = certify(cfg, res.polys, res.files)
    write_bundle(out, cfg, res.polys, certs, res.files)
    rep = _report(cfg["command"], certs, {"bundle": str(out)})
    return (EXIT_OK if rep["pass"] else EXIT_CERT), rep


def verify_bundle(path: Path) -> tuple[int, dict]:
    """Recompute certificates from the stored coefficients and compare with the stored ones."""
    spec, polys, stored = read_bundle(path)
    cfg = validate(spec)
    reserved = {SPEC_FILE, CERT_FILE}
    files = {f.name: f.read_text(encoding="utf-8") for f in sorted(path.iterdir())
             if f.is_file() and f.name not in reserved and not COEFF_RE.match(f.name)}
    _, certify = PIPELINES[cfg["command"]]
    fresh = certify(cfg, polys, files)
    old = {c.name: c.to_dict() for c in stored}
    new = {c.name: c.to_dict() for c in fresh}
    mismatched = sorted(n for n in old.keys() | new.keys() if old.get(n) != new.get(n))
    rep = _report(cfg["command"], fresh, {"mismatched": mismatched})
    rep["pass"] = rep["pass"] and not mismatched
    return (EXIT_OK if rep["pass"] else EXIT_CERT), rep


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            code, rep = verify_bundle(args.bundle)
        else:
            cfg = config_from_args(args)
            code, rep = run_command(cfg, args.out or Path("out") / args.command)
    except (ConfigError, SpecViolation, ScheduleViolation, ValueError, OSError) as e:
        code, rep = EXIT_CONFIG, {"command": args.command, "error": type(e).__name__, "detail": str(e)}
    except (BudgetExceeded, HypothesisFailure, Overflow) as e:
        code, rep = EXIT_BUDGET, {"command": args.command, "error": type(e).__name__, "detail": str(e)}
    except BlockFailure as e:
        code, rep = EXIT_CERT, {"command": args.command, "error": type(e).__name__, "detail": str(e)}
    except RieszLabError as e:
        code, rep = EXIT_CONFIG, {"command": args.command, "error": type(e).__name__, "detail": str(e)}
    sys.stdout.write(dumps(rep))
    return code


if __name__ == "__main__":
    sys.exit(main())
