"""Command-line front end.

    dde-certify certify    SYSTEM.json [--grid N] [--tol X] [--no-fast-path]
    dde-certify hyperbolic SYSTEM.json
    dde-certify spectrum   SYSTEM.json --tau 20[,400] [--format csv]
    dde-certify asymptotic SYSTEM.json [--omega-range a:b] [--level k] [--tau T | --epsilon E]
    dde-certify resonances SYSTEM.json [--n-range a:b] [--epsilon E]

Exit codes: 0 certified / success, 1 certified-not, 2 inconclusive,
11 unreadable or malformed input, 12 numerical failure, 13 bad usage.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import asdict, replace

import numpy as np

from . import asymptotic, charroots, criteria, resonance
from .linalg import EigenvalueError
from .model import ValidationError, Verdict, _jsonable, system_from_json_dict

EXIT_OK, EXIT_NOT, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_PARSE, EXIT_NUMERIC, EXIT_USAGE = 11, 12, 13

ENV_PREFIX = "DDE_CERTIFY_"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _range(text: str) -> tuple:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("system", help="system JSON file")
    common.add_argument("--grid", type=int, help="coarse torus points per phase")
    common.add_argument("--tol", type=float, help="margin tolerance")
    common.add_argument("--threads", type=int, help="worker threads for sweeps")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="dde-certify", description="Delay-independent stability certificates for linear DDEs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", parents=[common], help="absolute stability certificate")
    c.add_argument("--no-fast-path", action="store_true", help="skip the scalar closed form")
    c.add_argument("--method", choices=("theorem1", "theorem2"), default="theorem2")

    sub.add_parser("hyperbolic", parents=[common], help="absolute hyperbolicity certificate")

    s = sub.add_parser("spectrum", parents=[common], help="characteristic roots at given delays")
    s.add_argument("--tau", type=_floats, required=True, help="delays, comma separated")
    s.add_argument("--nodes", type=int, help="discretisation nodes")
    s.add_argument("--window", help="re_min:re_max:im_min:im_max")

    a = sub.add_parser("asymptotic", parents=[common], help="asymptotic continuous spectrum")
    a.add_argument("--omega-range", type=_range)
    a.add_argument("--samples", type=int, default=2049)
    a.add_argument("--level", type=int, default=1)
    a.add_argument("--phases", type=_floats, default=[], help="fixed phases for levels > 1")
    scale = a.add_mutually_exclusive_group()
    scale.add_argument("--tau", type=float)
    scale.add_argument("--epsilon", type=float)

    r = sub.add_parser("resonances", parents=[common], help="resonance witness and delay families")
    r.add_argument("--n-range", type=_range, default=(1, 10), help="period indices a:b for the first delay")
    r.add_argument("--epsilon", type=float, default=0.01)
    r.add_argument("--omega0", type=float, help="use this resonance frequency instead of searching")
    r.add_argument("--phi", type=_floats, help="phases that go with --omega0")
    return p


def effective_config(args) -> dict:
    """Defaults, overridden by ``DDE_CERTIFY_*`` environment variables, then flags."""
    env_threads = os.environ.get(ENV_PREFIX + "THREADS")
    env_tol = os.environ.get(ENV_PREFIX + "TOL")
    try:
        torus = criteria.TorusSweepConfig()
        if env_threads:
            torus = replace(torus, threads=int(env_threads))
        if env_tol:
            torus = replace(torus, margin_tolerance=float(env_tol))
        if args.grid is not None:
            torus = replace(torus, coarse_points_per_dim=args.grid)
        if args.tol is not None:
            torus = replace(torus, margin_tolerance=args.tol)
        if args.threads is not None:
            torus = replace(torus, threads=args.threads)
    except ValueError as exc:
        raise UsageError(f"bad configuration: {exc}") from None
    return {"torus": torus}


def _load(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None
    return system_from_json_dict(data), hashlib.sha256(raw).hexdigest()


def _verdict_code(verdict: Verdict) -> int:
    return {Verdict.CERTIFIED_STABLE: EXIT_OK, Verdict.CERTIFIED_NOT: EXIT_NOT,
            Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}[verdict]


def cmd_certify(sys_, args, cfg, timings):
    torus = cfg["torus"]
    t0 = time.perf_counter()
    if sys_.n == 1 and not args.no_fast_path:
        cert = criteria.certify_scalar(sys_, torus.margin_tolerance, torus.zero_frequency_tolerance)
    else:
        cert = criteria.certify_absolute_stability(sys_, torus, method=args.method)
    timings["certify"] = 1000 * (time.perf_counter() - t0)
    return cert.to_json_dict(), None, _verdict_code(cert.verdict)


def cmd_hyperbolic(sys_, args, cfg, timings):
    t0 = time.perf_counter()
    cert = criteria.certify_absolute_hyperbolicity(sys_, cfg["torus"])
    timings["hyperbolic"] = 1000 * (time.perf_counter() - t0)
    return cert.to_json_dict(), None, _verdict_code(cert.verdict)


def cmd_spectrum(sys_, args, cfg, timings):
    if len(args.tau) != sys_.m:
        raise UsageError(f"--tau needs {sys_.m} delays, got {len(args.tau)}")
    window = None
    if args.window:
        try:
            window = tuple(float(v) for v in args.window.split(":"))
        except ValueError:
            raise UsageError("--window expects re_min:re_max:im_min:im_max") from None
        if len(window) != 4:
            raise UsageError("--window expects re_min:re_max:im_min:im_max")
    try:
        dcfg = charroots.DiscretizationConfig(nodes=args.nodes, window=window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg["discretization"] = dcfg
    t0 = time.perf_counter()
    rep = charroots.compute_spectrum(sys_, args.tau, dcfg)
    timings["spectrum"] = 1000 * (time.perf_counter() - t0)
    buf = io.StringIO()
    rep.write_csv(buf)
    return rep.to_json_dict(), buf.getvalue(), EXIT_OK


def cmd_asymptotic(sys_, args, cfg, timings):
    if not 1 <= args.level <= sys_.m:
        raise UsageError(f"--level must be in 1..{sys_.m}")
    if len(args.phases) != args.level - 1:
        raise UsageError(f"--level {args.level} needs {args.level - 1} --phases")
    if args.tau is not None and args.level != 1:
        raise UsageError("--tau scaling applies to level 1; use --epsilon for higher levels")
    for name in ("tau", "epsilon"):
        v = getattr(args, name)
        if v is not None and not v > 0:
            raise UsageError(f"--{name} must be positive")
    if args.omega_range is not None:
        a, b = args.omega_range
        if not a < b:
            raise UsageError("--omega-range needs a < b")
        grid = np.linspace(a, b, args.samples)
    else:
        grid = asymptotic.default_omega_grid(sys_, args.samples)
    cfg["asymptotic"] = {"omega_min": float(grid[0]), "omega_max": float(grid[-1]), "samples": int(grid.size),
                         "level": args.level, "phases": args.phases, "tau": args.tau, "epsilon": args.epsilon}
    t0 = time.perf_counter()
    brs = asymptotic.branches(sys_, grid, args.phases, args.level)
    timings["asymptotic"] = 1000 * (time.perf_counter() - t0)
    buf = io.StringIO()
    asymptotic.write_branches_csv(buf, brs, tau=args.tau, epsilon=args.epsilon)
    result = {
        "branches": [
            {"level": b.level, "branch": b.branch_index, "phases": list(b.phases), "samples": int(b.omega.size),
             "gamma_max": float(np.max(b.gamma)) if b.gamma.size else None}
            for b in brs
        ],
        "singular_frequencies": [s.omega_s for s in asymptotic.singular_frequencies(sys_)],
    }
    if sys_.n == 1 and sys_.m == 1:
        result["hopf_frequencies"] = list(asymptotic.hopf_frequencies_scalar(sys_))
    if args.format == "json":
        result["csv"] = buf.getvalue()
    return result, buf.getvalue(), EXIT_OK


def cmd_resonances(sys_, args, cfg, timings):
    torus = cfg["torus"]
    t0 = time.perf_counter()
    if args.omega0 is not None:
        if args.omega0 == 0:
            raise UsageError("--omega0 must be nonzero")
        if args.phi is None or len(args.phi) != sys_.m:
            raise UsageError(f"--omega0 needs --phi with {sys_.m} phases")
        witness = (args.omega0, np.asarray(args.phi))
    else:
        witness = resonance.find_resonance_witness(sys_, torus)
    timings["search"] = 1000 * (time.perf_counter() - t0)
    if witness is None:
        return {"found": False, "message": "no resonance found"}, None, EXIT_OK
    a, b = int(args.n_range[0]), int(args.n_range[1])
    if a > b:
        raise UsageError("--n-range needs a <= b")
    t0 = time.perf_counter()
    ranges = [range(a, b + 1)] + [range(a, a + 1)] * (sys_.m - 1)
    try:
        fam = resonance.build_family(sys_, witness[0], witness[1], ranges, args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    h = fam.hierarchical
    hier_res = abs(charroots.quasipolynomial(sys_, h.taus, 1j * fam.omega0)) if h is not None else None
    timings["family"] = 1000 * (time.perf_counter() - t0)
    cfg["resonances"] = {"n_range": [a, b], "epsilon": args.epsilon}
    result = {"found": True, **fam.to_json_dict(), "hierarchical_residual": hier_res,
              "residual_scale": resonance.residual_scale(sys_)}
    return result, None, EXIT_OK


COMMANDS = {
    "certify": cmd_certify,
    "hyperbolic": cmd_hyperbolic,
    "spectrum": cmd_spectrum,
    "asymptotic": cmd_asymptotic,
    "resonances": cmd_resonances,
}


def _echo(cfg: dict) -> dict:
    out = {}
    for k, v in cfg.items():
        out[k] = asdict(v) if hasattr(v, "__dataclass_fields__") else v
    return _jsonable(out)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    timings = {}
    try:
        cfg = effective_config(args)
        t0 = time.perf_counter()
        sys_, digest = _load(args.system)
        timings["load"] = 1000 * (time.perf_counter() - t0)
        result, csv_text, code = COMMANDS[args.command](sys_, args, cfg, timings)
    except UsageError as exc:
        print(f"dde-certify: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"dde-certify: invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (EigenvalueError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"dde-certify: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    report = {
        "command": args.command,
        "input_digest": digest,
        "config_echo": _echo(cfg),
        "result": _jsonable(result),
        "timings": timings,
    }
    report_text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.format == "csv" and csv_text is not None:
        # CSV goes to --out (or stdout); with --out the report still goes to stdout
        if args.out:
            _write(args.out, csv_text)
            stdout.write(report_text)
        else:
            stdout.write(csv_text)
    elif args.out:
        _write(args.out, report_text)
    else:
        stdout.write(report_text)
    return code


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def payload_bytes(report_text: str) -> bytes:
    """Canonical bytes of the ``result`` payload of a JSON run report."""
    return json.dumps(json.loads(report_text)["result"], sort_keys=True).encode()


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
