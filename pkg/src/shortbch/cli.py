"""Command-line front end: build-matrix, simulate, analyze, calibrate, replay.

Exit codes: 0 success, 2 usage error, 3 data or file error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bch import code_from_nk, standard_pcm
from .hybrid import TABLE_63_45, complexity_ratio, parse_entry
from .matrixio import MatrixFormatError, read_matrix, to_alist, to_dense_text
from .nms import DEFAULT_ALPHA_GRID, calibrate_alpha
from .pcmopt import AnnealConfig, OptimizedPcm, build_optimized_pcm, rank_deficiency_report
from .gf2 import weight_profile
from .presets import (CALIBRATED_ALPHA, CALIBRATION_SNR, DEFAULT_BETA, DEFAULT_ITERS,
                      parse_code)
from .sim import DECODERS, StopRule, make_decoder, sweep, write_csv

SEED_ENV = "SHORTBCH_SEED"
EXIT_USAGE = 2
EXIT_DATA = 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class RunManifest:
    """Everything needed to reproduce a command's outputs."""

    command: str
    argv: list[str]
    params: dict
    seed: int
    artifacts: list[str] = field(default_factory=list)
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def write(self, path: Path) -> None:
        _write_text(path, self.to_json())

    @classmethod
    def read(cls, path) -> "RunManifest":
        try:
            return cls(**json.loads(Path(path).read_text()))
        except (OSError, ValueError, TypeError) as exc:
            raise DataError(f"cannot read manifest {path}: {exc}") from None


def parse_grid(text: str) -> list[float]:
    """``start:step:stop`` (inclusive), a comma list, or a single value."""
    text = text.strip()
    try:
        if ":" in text:
            start, step, stop = (float(p) for p in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 10) for i in range(count)]
        return [float(p) for p in text.split(",") if p]
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use start:step:stop, a,b,c or a single value") from None


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def _code(args):
    try:
        n, k = parse_code(args.code)
        return code_from_nk(n, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _load_matrix(path: str, n: int | None = None) -> np.ndarray:
    try:
        h = read_matrix(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except MatrixFormatError as exc:
        raise DataError(f"{path}: {exc}") from None
    if n is not None and h.shape[1] != n:
        raise DataError(f"{path} has {h.shape[1]} columns but the code has N={n}")
    return h


def _profile_text(prof, extra: dict | None = None) -> str:
    d = prof.as_dict()
    d.update(extra or {})
    return "".join(f"{k}={v}\n" for k, v in d.items())


def _anneal_cfg(args, seed: int) -> AnnealConfig:
    return AnnealConfig(max_steps=args.anneal_steps, seed=seed, restarts=args.restarts)


def _build(spec, beta, args, seed) -> OptimizedPcm:
    if beta < 1:
        raise UsageError("beta must be >= 1")
    try:
        return build_optimized_pcm(spec, beta=beta, rounds=args.rounds, cfg=_anneal_cfg(args, seed))
    except ValueError as exc:
        raise DataError(str(exc)) from None


def cmd_build_matrix(args, argv) -> int:
    spec = _code(args)
    seed = _seed(args)
    beta = args.beta if args.beta is not None else DEFAULT_BETA.get((spec.n, spec.k), 2)
    pcm = _build(spec, beta, args, seed)
    out = Path(args.out)
    stem = f"H_o_{spec.n}_{spec.k}_b{beta}"
    paths = [out / f"{stem}.alist", out / f"{stem}.txt", out / f"{stem}.profile"]
    _write_text(paths[0], to_alist(pcm.matrix))
    _write_text(paths[1], to_dense_text(pcm.matrix))
    w_min, r_min, full = rank_deficiency_report(pcm)
    _write_text(paths[2], _profile_text(pcm.profile, {
        "code": f"{spec.n},{spec.k}", "beta": beta, "base_rows": pcm.base_rows,
        "min_weight": w_min, "min_weight_rank": r_min, "min_weight_full_rank": full}))
    RunManifest("build-matrix", argv, vars_clean(args), seed, [str(p) for p in paths]).write(
        out / f"{stem}.manifest.json")
    print(f"({spec.n},{spec.k}) beta={beta}  {pcm.profile.table_row()}")
    return 0


def cmd_simulate(args, argv) -> int:
    spec = _code(args)
    seed = _seed(args)
    key = (spec.n, spec.k)
    snrs = parse_grid(args.snr)
    if not snrs:
        raise UsageError("empty SNR grid")
    if args.decoder not in DECODERS:
        raise UsageError(f"unknown decoder {args.decoder!r}")
    alpha = args.alpha if args.alpha is not None else CALIBRATED_ALPHA.get(key, 0.8)
    iters = args.iters if args.iters is not None else DEFAULT_ITERS.get(spec.n, 4)
    beta = None
    pcm = None
    if args.decoder != "osd":
        if args.matrix:
            pcm = _load_matrix(args.matrix, spec.n)
        else:
            beta = args.beta if args.beta is not None else DEFAULT_BETA.get(key, 2)
            pcm = _build(spec, beta, args, seed).matrix
    try:
        dec = make_decoder(args.decoder, spec, pcm, alpha=alpha, max_iters=iters,
                           osd_order=args.osd_order, beta=beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    stop = StopRule(args.min_errors, args.max_frames)
    reports = sweep(dec, spec, snrs, stop, seed=seed, workers=args.workers)
    text = write_csv(reports, dec, seed)
    if args.out:
        out = Path(args.out)
        _write_text(out, text)
        RunManifest("simulate", argv, vars_clean(args), seed, [str(out)]).write(
            out.with_name(out.name + ".manifest.json"))
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args, argv) -> int:
    if args.matrix is None and args.standard is None and args.complexity is None:
        raise UsageError("give a matrix file, --standard N,K or --complexity")
    h = None
    if args.standard is not None:
        args.code = args.standard
        h = standard_pcm(_code(args))
    elif args.matrix is not None:
        h = _load_matrix(args.matrix)
    if h is not None:
        prof = weight_profile(h)
        w_min, r_min, full = rank_deficiency_report(h)
        print(_profile_text(prof), end="")
        print(f"min_weight={w_min}\nmin_weight_rank={r_min}\nmin_weight_full_rank={full}")
    if args.complexity is not None:
        try:
            e = parse_entry(args.complexity, "decoder")
            base = parse_entry(args.baseline, "baseline") if args.baseline else TABLE_63_45[0]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(f"complexity_ratio={complexity_ratio(e, base):.2g}")
    return 0


def cmd_calibrate(args, argv) -> int:
    spec = _code(args)
    seed = _seed(args)
    key = (spec.n, spec.k)
    if args.matrix:
        pcm = _load_matrix(args.matrix, spec.n)
    else:
        beta = args.beta if args.beta is not None else DEFAULT_BETA.get(key, 2)
        pcm = _build(spec, beta, args, seed).matrix
    grid = parse_grid(args.grid)
    if not grid or any(not 0 < a <= 1 for a in grid):
        raise UsageError("alpha grid values must lie in (0, 1]")
    snr = args.snr if args.snr is not None else CALIBRATION_SNR.get(spec.n, 3.0)
    iters = args.iters if args.iters is not None else DEFAULT_ITERS.get(spec.n, 4)
    best, scores = calibrate_alpha(spec, pcm, snr, grid, frames=args.frames, seed=seed,
                                   max_iters=iters, return_scores=True)
    for a, f in scores.items():
        print(f"alpha={a:g} fer={f:.4g}")
    print(f"best_alpha={best:g}")
    return 0


def cmd_replay(args, argv) -> int:
    man = RunManifest.read(args.manifest)
    return main(man.argv)


def vars_clean(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}


def _add_build_opts(p):
    p.add_argument("--beta", type=int, help="redundancy factor (default per code)")
    p.add_argument("--rounds", type=int, default=4, help="shifted search rounds Q")
    p.add_argument("--anneal-steps", type=int, default=None, help="annealing steps (default 200 per row)")
    p.add_argument("--restarts", type=int, default=1, help="annealing restarts")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shortbch", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--config", help="key=value file supplying default flags")
    sub = ap.add_subparsers(dest="command", required=True)

    def seed_opt(p):
        p.add_argument("--seed", type=int, default=None, help=f"master seed (env {SEED_ENV}, else 0)")

    p = sub.add_parser("build-matrix", help="construct H_o and its profile")
    p.add_argument("--code", required=True, help="N,K")
    _add_build_opts(p)
    seed_opt(p)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_build_matrix)

    p = sub.add_parser("simulate", help="Monte-Carlo FER/BER sweep to CSV")
    p.add_argument("--code", required=True, help="N,K")
    p.add_argument("--decoder", required=True, choices=DECODERS)
    p.add_argument("--matrix", help="H_o file (.alist or dense text); built on the fly otherwise")
    _add_build_opts(p)
    p.add_argument("--alpha", type=float, help="normalization factor (default: calibrated value)")
    p.add_argument("--iters", type=int, help="iteration budget I_m")
    p.add_argument("--osd-order", type=int, default=2)
    p.add_argument("--snr", required=True, help="Eb/N0 grid in dB, start:step:stop inclusive")
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default: standard output)")
    seed_opt(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="cycle count, weights, rank, complexity ratio")
    p.add_argument("matrix", nargs="?", help="matrix file")
    p.add_argument("--standard", help="analyze the standard PCM of N,K instead")
    p.add_argument("--complexity", help="autos,iters,branches,rows")
    p.add_argument("--baseline", help="autos,iters,branches,rows (default mRRD(1))")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("calibrate", help="grid search of alpha")
    p.add_argument("--code", required=True, help="N,K")
    p.add_argument("--matrix")
    _add_build_opts(p)
    p.add_argument("--snr", type=float, help="training Eb/N0 in dB")
    p.add_argument("--grid", default=",".join(f"{a:g}" for a in DEFAULT_ALPHA_GRID))
    p.add_argument("--frames", type=int, default=2000)
    p.add_argument("--iters", type=int)
    seed_opt(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return ap


def _config_tokens(path: str) -> list[str]:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from None
    tokens = []
    for ln, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{ln}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        tokens += [f"--{key.replace('_', '-')}", val]
    return tokens


def _expand_config(argv: list[str]) -> list[str]:
    """Insert config-file flags right after the subcommand so explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a file")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    cmds = {"build-matrix", "simulate", "analyze", "calibrate", "replay"}
    at = next((j for j, a in enumerate(rest) if a in cmds), None)
    if at is None:
        return rest
    return rest[:at + 1] + _config_tokens(path) + rest[at + 1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        expanded = _expand_config(argv)
        args = build_parser().parse_args(expanded)
        return args.func(args, expanded)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
