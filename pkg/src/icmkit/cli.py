"""Batch command line: construct, verify, sweep, volume, tomo."""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import io as iio
from .constructions import (local_embedding, local_tomography_measurement, mpicm_family, mub_family,
                            naimark_dilate_rank_one, povm_from_bases, random_bases, rank_one_ic_povm,
                            tensor_povm)
from .constructions.families import SAMPLERS, BasisFamily, _general_unchecked
from .criteria import information_volume, mpicm_available, mub_available, single_measurement_volume
from .errors import IcmkitError, ValidationError
from .linalg import Tolerance
from .measurement import (Povm, SubspaceBasis, TensorEmbedding, canonical_ic_set, full_space, is_ic,
                          is_ic_over_subspace, povm_frame_potential, trace_balance_check,
                          trace_optimal_check)
from .tomography import DensityState, random_density, run_experiment

KINDS = ("mpicm", "rank-one-ic", "canonical", "mub", "random-bases", "theorem4", "dilate", "tensor")
SCHEMES = ("mub", "mpicm", "random", "single", "all")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _default_seed() -> int:
    raw = os.environ.get("ICMKIT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"ICMKIT_SEED must be an integer, got {raw!r}") from None


def _global_options(parser: argparse.ArgumentParser, suppress: bool):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--tol-rank", type=float, default=default(1e-10), help="relative rank cutoff")
    parser.add_argument("--tol-abs", type=float, default=default(1e-10), help="absolute comparison cutoff")
    parser.add_argument("--seed", type=int, default=default(None), help="base seed (env ICMKIT_SEED)")
    parser.add_argument("--out", default=default(None), help="output file (default stdout)")
    parser.add_argument("--jobs", type=int, default=default(None), help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    # no abbreviations: "--to" would otherwise clash with the global "--tol-*" flags
    parser = argparse.ArgumentParser(prog="icmkit", description=__doc__, allow_abbrev=False)
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a measurement and write it as JSON")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--x", type=parse_complex, help="parameter of the rank-one IC POVM (prime n)")
    p.add_argument("--count", type=int, help="number of random bases (default n+1)")
    p.add_argument("--factors", type=int, nargs="+", help="dimensions of the tensor factors")
    p.add_argument("--source", choices=("auto", "mpicm", "mub"), default="auto",
                   help="family behind theorem4")
    p.add_argument("--povm", help="POVM file to dilate instead of the rank-one IC POVM")
    p.add_argument("--sampler", choices=SAMPLERS, default="haar")

    p = sub.add_parser("verify", parents=[common], help="rank test of a POVM or basis-family file")
    p.add_argument("file")
    p.add_argument("--subspace", help="embedded-D, natural-D or tensor-D")

    p = sub.add_parser("sweep", parents=[common], help="rank sweep of the general MPICM construction")
    p.add_argument("--from", dest="start", type=int, default=10)
    p.add_argument("--to", dest="stop", type=int, default=40)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--full", action="store_true", help="sweep up to n=100")

    p = sub.add_parser("volume", parents=[common], help="information-volume survey as CSV")
    p.add_argument("--scheme", choices=SCHEMES, default="all")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seeds", type=int, default=20, help="number of random families")
    p.add_argument("--sampler", choices=SAMPLERS, default="haar")

    p = sub.add_parser("tomo", parents=[common], help="simulate tomography through a POVM file")
    p.add_argument("povm")
    p.add_argument("--state", default="random", help="random, maximally-mixed, or a matrix JSON file")
    p.add_argument("--rank", type=int)
    p.add_argument("--state-seed", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--psd", dest="psd", action="store_true", default=None)
    p.add_argument("--no-psd", dest="psd", action="store_false")
    p.add_argument("--subspace")
    return parser


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(msg: str):
    print(msg, file=sys.stderr)


def _need_n(args) -> int:
    if args.n is None:
        raise ValidationError(f"construct {args.kind} needs --n")
    return args.n


def _family_summary(fam: BasisFamily, tol) -> str:
    rep = is_ic(povm_from_bases(fam), tol)
    return f"dim {fam.dim}, bases {len(fam)}, effects {rep.effect_count}, IC: {str(rep.is_ic).lower()}, rank {rep.rank}"


def _povm_summary(povm: Povm, rep) -> str:
    return (f"dim {povm.dim}, effects {len(povm)}, complete {str(povm.complete).lower()}, "
            f"IC: {str(rep.is_ic).lower()}, rank {rep.rank}")


def cmd_construct(args, tol) -> int:
    kind = args.kind
    if kind in ("mpicm", "mub", "random-bases"):
        n = _need_n(args)
        if kind == "mpicm":
            if n <= 8 and n not in (4, 6):
                raise ValidationError(f"construction not defined for n ≤ 8 (got n={n}); use n in {{4, 6}} or even n >= 10")
            fam = mpicm_family(n)
        elif kind == "mub":
            fam = mub_family(n)
        else:
            fam = random_bases(n, args.count or n + 1, args.seed, args.sampler)
        _emit(iio.dumps(iio.family_to_json(fam)) + "\n", args.out)
        _summary(_family_summary(fam, tol))
        return 0

    embedding = None
    if kind == "rank-one-ic":
        povm = rank_one_ic_povm(_need_n(args), args.x)
        rep = is_ic(povm, tol)
    elif kind == "canonical":
        povm = canonical_ic_set(_need_n(args))
        rep = is_ic(povm, tol)
    elif kind == "theorem4":
        n = _need_n(args)
        source = args.source
        if source == "auto":
            source = "mpicm" if mpicm_available(n) else "mub"
        fam = mpicm_family(n) if source == "mpicm" else mub_family(n)
        povm = local_tomography_measurement(fam, tol)
        embedding = {"kind": "tensor", "dim": n}
        rep = is_ic_over_subspace(povm, local_embedding(n), tol)
    elif kind == "dilate":
        if args.povm:
            source = iio.povm_from_json(iio.read_json(args.povm), args.povm)
        else:
            source = rank_one_ic_povm(_need_n(args), args.x)
        povm = naimark_dilate_rank_one(source, tol)
        embedding = {"kind": "natural", "dim": source.dim}
        rep = is_ic_over_subspace(povm, SubspaceBasis.natural(source.dim, povm.dim), tol)
    else:
        if not args.factors:
            raise ValidationError("construct tensor needs --factors")
        povm = tensor_povm([rank_one_ic_povm(f) for f in args.factors])
        rep = is_ic(povm, tol)
    _emit(iio.dumps(iio.povm_to_json(povm, embedding)) + "\n", args.out)
    _summary(_povm_summary(povm, rep))
    return 0


def resolve_subspace(spec: str | None, povm: Povm, hint: dict | None):
    """Turn ``embedded-D`` / ``natural-D`` / ``tensor-D`` into an embedding object."""
    if spec is None:
        return full_space(povm.dim)
    kind, _, dim = spec.partition("-")
    try:
        d = int(dim)
    except ValueError:
        raise ValidationError(f"subspace must look like embedded-D, natural-D or tensor-D, got {spec!r}") from None
    if kind == "embedded":
        kind = (hint or {}).get("kind", "natural")
    if kind == "natural":
        return SubspaceBasis.natural(d, povm.dim)
    if kind == "tensor":
        if d < 1 or povm.dim % d:
            raise ValidationError(f"C^{d} does not tensor-embed into C^{povm.dim}")
        return TensorEmbedding.maximally_mixed(d, povm.dim // d)
    raise ValidationError(f"unknown subspace kind {kind!r}")


def _load_measurement(path):
    obj = iio.read_json(path)
    if isinstance(obj, dict) and "bases" in obj:
        fam = iio.family_from_json(obj, path)
        return povm_from_bases(fam), None, fam
    return iio.povm_from_json(obj, path), (obj.get("embedding") if isinstance(obj, dict) else None), None


def cmd_verify(args, tol) -> int:
    povm, hint, fam = _load_measurement(args.file)
    space = resolve_subspace(args.subspace, povm, hint)
    rep = is_ic_over_subspace(povm, space, tol)
    try:
        fp = povm_frame_potential(povm)
    except ValidationError:
        fp = None
    bal = trace_balance_check(povm, space, tol)
    result = {
        "rank": rep.rank,
        "required": rep.required,
        "is_ic": rep.is_ic,
        "effect_count": rep.effect_count,
        "dim": povm.dim,
        "subspace_dim": space.dim,
        "frame_potential": fp,
        "trace_balance": {"balanced": bal.balanced, "min": float(bal.averages.min()),
                          "max": float(bal.averages.max())},
        "trace_optimal": trace_optimal_check(povm, space, tol),
    }
    if fam is not None:
        result["bases"] = len(fam)
    _emit(iio.dumps(result) + "\n", args.out)
    return 0


def _jobs(args) -> int:
    if args.jobs is not None and args.jobs < 1:
        raise ValidationError(f"--jobs must be >= 1, got {args.jobs}")
    return args.jobs or os.cpu_count() or 1


def sweep_row(n: int, tol: Tolerance) -> tuple:
    start = time.perf_counter()
    rep = is_ic(povm_from_bases(_general_unchecked(n), scaled=False), tol)
    return n, rep.rank, rep.required, rep.is_ic, time.perf_counter() - start


def cmd_sweep(args, tol) -> int:
    stop = 100 if args.full else args.stop
    if args.start % 2 or stop % 2 or args.start < 10 or args.step < 2 or args.step % 2:
        raise ValidationError("sweep needs even --from/--to >= 10 and an even --step")
    ns = list(range(args.start, stop + 1, args.step))
    rows = _map(sweep_row, _jobs(args), ns, [tol] * len(ns))
    rows.sort(key=lambda r: r[0])
    _emit(iio.table_to_csv(["n", "rank", "required", "is_ic", "seconds"], rows), args.out)
    return 0


def random_volume(n: int, seed: int, sampler: str, tol: Tolerance):
    return information_volume(random_bases(n, n + 1, seed, sampler), tol)


def _map(fn, jobs, *columns) -> list:
    """``map`` over worker processes when it pays off; results keep input order."""
    count = len(columns[0])
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, count)) as pool:
            return list(pool.map(fn, *columns))
    return list(map(fn, *columns))


def volume_rows(scheme: str, n: int, seeds, sampler: str, tol, jobs: int = 1) -> list:
    rows = []
    schemes = ("mub", "mpicm", "single", "random") if scheme == "all" else (scheme,)
    for s in schemes:
        if s == "mub" and (scheme == s or mub_available(n)):
            rows.append((n, "mub", None, information_volume(mub_family(n), tol)))
        elif s == "mpicm" and (scheme == s or mpicm_available(n)):
            if n <= 8 and n not in (4, 6):
                raise ValidationError(f"construction not defined for n ≤ 8 (got n={n})")
            rows.append((n, "mpicm", None, information_volume(mpicm_family(n), tol)))
        elif s == "single":
            rows.append((n, "single", None,
                         single_measurement_volume(naimark_dilate_rank_one(rank_one_ic_povm(n), tol), tol)))
        elif s == "random":
            seeds = list(seeds)
            reports = _map(random_volume, jobs, [n] * len(seeds), seeds, [sampler] * len(seeds),
                           [tol] * len(seeds))
            rows += [(n, "random", seed, r) for seed, r in zip(seeds, reports)]
    return rows


def cmd_volume(args, tol) -> int:
    seeds = range(args.seed, args.seed + args.seeds)
    rows = volume_rows(args.scheme, args.n, seeds, args.sampler, tol, _jobs(args))
    table = [(n, s, seed, r.log10_volume, r.volume, r.operator_count) for n, s, seed, r in rows]
    _emit(iio.table_to_csv(["n", "scheme", "seed", "log10_volume", "volume", "operator_count"], table), args.out)
    return 0


def _load_state(args, d: int) -> DensityState:
    seed = args.state_seed if args.state_seed is not None else args.seed
    if args.state == "random":
        return random_density(d, args.rank, seed)
    if args.state == "maximally-mixed":
        return DensityState.maximally_mixed(d)
    rho = iio.matrix_from_json(iio.read_json(args.state), args.state)
    if rho.shape != (d, d):
        raise ValidationError(f"state file is {rho.shape[0]}-dimensional, expected {d}")
    return DensityState(rho)


def cmd_tomo(args, tol) -> int:
    povm, hint, _ = _load_measurement(args.povm)
    embedding = None
    if args.subspace is not None:
        embedding = resolve_subspace(args.subspace, povm, hint)
    d = embedding.dim if embedding is not None else povm.dim
    rho = _load_state(args, d)
    report = run_experiment(povm, rho, shots=args.shots, seed=args.seed, project_psd=args.psd,
                            embedding=embedding, tol=tol)
    result = {
        "estimate": iio.matrix_to_json(report.estimate.matrix),
        "hs_error": report.hs_error,
        "trace_error": report.trace_error,
        "shots": report.shots,
        "residual": report.residual,
    }
    _emit(iio.dumps(result) + "\n", args.out)
    return 0


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "sweep": cmd_sweep,
            "volume": cmd_volume, "tomo": cmd_tomo}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        tol = Tolerance(args.tol_rank, args.tol_abs)
        return COMMANDS[args.command](args, tol)
    except IcmkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
