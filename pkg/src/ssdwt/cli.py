"""Command-line front end: compress, decompress, bench, cost, corpus."""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus
from ._format import Mode
from .coding import Evaluator, encode_region, h0_estimate
from .container import CompressConfig, compress_detailed, decompress
from .errors import CodecError
from .imageio import SampleGrid, load_pgm, read_pgm, save_pgm, write_pgm
from .rdls import FilterId
from .search import Heuristic, SearchConfig, classify, predicted_cost
from .transform import CostCounters, FixedVariant, fixed_variant_decisions, forward_ssdwt, nominal_regions

MODES = {"dwt": Mode.DWT, "nodwt": Mode.NO_DWT, "fix1": Mode.FIX1, "fix2": Mode.FIX2, "ss": Mode.SSDWT, "rdls-ss": Mode.RDLS_SSDWT}
FIXED_NAMES = {"fix1": "FIX1", "fix2": "FIX2", "dwt": "DWT", "nodwt": "NO_DWT"}


def _filters(text: str):
    try:
        return tuple(FilterId[name.strip().upper()] for name in text.split(",") if name.strip())
    except KeyError as exc:
        raise argparse.ArgumentTypeError(f"unknown filter {exc.args[0]}") from None


def _parse_variant(text: str, levels: int, evaluator: Evaluator, filters) -> CompressConfig:
    """Variant grammar: dwt, nodwt, fix1, fix2, allskip, <heuristic>:<n>, or a+b+c for selection."""
    if "+" in text:
        names = text.split("+")
        if any(n not in FIXED_NAMES for n in names):
            raise ValueError(f"selection over non-fixed variants: {text}")
        return CompressConfig(levels=levels, select=tuple(FIXED_NAMES[n] for n in names), select_evaluator=evaluator)
    if text == "allskip":
        return CompressConfig(Mode.SSDWT, levels, decisions=fixed_variant_decisions(FixedVariant.ALL_SKIP, levels))
    if text in MODES and text not in ("ss", "rdls-ss"):
        return CompressConfig(MODES[text], levels)
    name, _, n = text.partition(":")
    heuristic = Heuristic(name)
    search = SearchConfig(heuristic, int(n or 1), evaluator, levels, filters)
    mode = Mode.RDLS_SSDWT if heuristic is Heuristic.H_SS_RDLS else Mode.SSDWT
    return CompressConfig(mode, levels, search=search)


def _compress_config(args) -> CompressConfig:
    evaluator = Evaluator(args.estimator)
    if args.mode == "select":
        return CompressConfig(levels=args.levels, select=tuple(FIXED_NAMES[c] for c in args.candidates.split(",")), select_evaluator=evaluator)
    mode = MODES[args.mode]
    search = None
    if mode is Mode.SSDWT:
        if args.heuristic == "rdls-ss":
            raise CodecError("--mode ss takes a step-skipping heuristic")
        search = SearchConfig(args.heuristic, args.iters, evaluator, args.levels, args.filters)
    elif mode is Mode.RDLS_SSDWT:
        search = SearchConfig(Heuristic.H_SS_RDLS, args.iters, evaluator, args.levels, args.filters)
    return CompressConfig(mode, args.levels, search=search)


def cmd_compress(args) -> int:
    image = load_pgm(args.input)
    counters = CostCounters()
    result = compress_detailed(image, _compress_config(args), counters)
    Path(args.output).write_bytes(result.data)
    if args.stats:
        print(f"mode         {result.mode.name} (t={result.levels})")
        print(f"r            {result.bpp:.6f} bpp ({len(result.data)} bytes, {image.pixels} pixels)")
        print(f"side info    {result.side_info_bytes} bytes = {result.side_info_bpp:.6f} bpp")
        if result.decisions is not None:
            print("decisions    " + "".join("1" if b else "0" for b in result.decisions.bits()))
        if result.assignment is not None:
            print("filters      " + " ".join("".join(str(int(f)) for f in lv) for lv in result.assignment.levels))
        print(f"lifting      {counters.lifting_steps}")
        print(f"encoded      {counters.encoded_symbols}")
        print(f"entropy      {counters.entropy_evals}")
    return 0


def cmd_decompress(args) -> int:
    grid = decompress(Path(args.input).read_bytes())
    data = write_pgm(grid)
    if args.output:
        Path(args.output).write_bytes(data)
    if args.verify:
        original = load_pgm(args.verify)
        if original != grid:
            print(f"verify: {args.verify} differs from the decoded image", file=sys.stderr)
            return 1
        print("verify: identical")
    return 0


# --------------------------------------------------------------------------
# bench


@dataclass
class BenchRecord:
    path: str
    label: str
    klass: str
    p: int
    r: dict = field(default_factory=dict)
    dr: dict = field(default_factory=dict)
    seconds: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)


def _read_manifest(path: Path):
    entries = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, _, label = line.partition(",")
        label = label.strip().lower()
        if label not in ("photo", "nonphoto"):
            raise CodecError(f"manifest label must be photo or nonphoto: {line!r}")
        entries.append((name.strip(), label))
    return entries


def _bench_image(image, path, label, variants, configs, evaluator, levels, timing) -> BenchRecord:
    klass = "photo"
    if label == "nonphoto":
        klass = "nonphoto-a" if classify(image, max(levels, 1), evaluator).value == "NoPhotoA" else "nonphoto-b"
    record = BenchRecord(path, label, klass, image.pixels)
    ref = compress_detailed(image, CompressConfig(Mode.DWT, levels)).bpp
    for name in variants:
        counters = CostCounters()
        start = time.perf_counter()
        result = compress_detailed(image, configs[name], counters)
        record.seconds[name] = time.perf_counter() - start if timing else None
        record.r[name] = result.bpp
        record.dr[name] = 100.0 * (result.bpp - ref) / ref
        record.counters[name] = counters
    return record


SUBSETS = ("photo", "nonphoto", "nonphoto-a", "nonphoto-b", "all")


def _in_subset(record: BenchRecord, subset: str) -> bool:
    return subset == "all" or record.label == subset or record.klass == subset


def write_bench_csv(records, variants, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    header = ["path", "label", "class", "p"]
    for v in variants:
        header += [f"r[{v}]", f"dr[{v}]", f"time[{v}]", f"lifting_steps[{v}]", f"encoded_symbols[{v}]"]
    writer.writerow(header)
    for rec in records:
        row = [rec.path, rec.label, rec.klass, rec.p]
        for v in variants:
            s = rec.seconds[v]
            row += [repr(rec.r[v]), repr(rec.dr[v]), "" if s is None else f"{s:.6f}", rec.counters[v].lifting_steps, rec.counters[v].encoded_symbols]
        writer.writerow(row)


def bench_summary(records, variants) -> str:
    lines = ["subset        n  " + "  ".join(f"{'dr[' + v + ']':>14}" for v in variants)]
    for subset in SUBSETS:
        chosen = [r for r in records if _in_subset(r, subset)]
        cells = [f"{np.mean([r.dr[v] for r in chosen]):14.4f}" if chosen else f"{'-':>14}" for v in variants]
        lines.append(f"{subset:<12}{len(chosen):3d}  " + "  ".join(cells))
    return "\n".join(lines)


def cmd_bench(args) -> int:
    manifest = Path(args.manifest)
    evaluator = Evaluator(args.estimator)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    configs = {}
    for v in variants:
        text = v if ":" in v or "+" in v or v in MODES or v == "allskip" else f"{v}:{args.iters}"
        configs[v] = _parse_variant(text, args.levels, evaluator, args.filters)
    timing = not args.no_timing
    if timing:
        # warm-up: compile the coder kernels before anything is timed
        compress_detailed(corpus.generate("noise", 0, 8), CompressConfig(Mode.DWT, 1))
    records, missing = [], []
    for name, label in _read_manifest(manifest):
        path = Path(name) if Path(name).is_absolute() else manifest.parent / name
        if not path.is_file():
            missing.append(name)
            print(f"missing: {name}", file=sys.stderr)
            continue
        records.append(_bench_image(load_pgm(path), name, label, variants, configs, evaluator, args.levels, timing))
    buf = io.StringIO()
    write_bench_csv(records, variants, buf)
    if args.csv:
        Path(args.csv).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    summary = bench_summary(records, variants)
    print(summary, file=sys.stderr if not args.csv else sys.stdout)
    return 1 if missing else 0


# --------------------------------------------------------------------------
# cost


def calibrate(size: int = 512, seed: int = 0) -> dict:
    """Unit timings in ms per 10^6 pixels on a synthetic photo-like image."""
    image = corpus.generate("photo", seed, size)
    dwt = fixed_variant_decisions(FixedVariant.DWT, 3)
    compress_detailed(corpus.generate("photo", seed, 16), CompressConfig(Mode.DWT, 1))

    def best(fn, repeat=3):
        times = []
        for _ in range(repeat):
            start = time.perf_counter()
            fn()
            times.append(time.perf_counter() - start)
        return min(times)

    transformed = forward_ssdwt(image, dwt).samples
    regions = nominal_regions(size, size, 3)
    t_d = best(lambda: forward_ssdwt(image, dwt))
    t_e = best(lambda: [encode_region(r.view(transformed)) for r in regions])
    t_h0 = best(lambda: h0_estimate(transformed, 3))
    total = best(lambda: _full_compress(image))
    scale = 1e3 * 1e6 / image.pixels
    return {"T_D": t_d * scale, "T_E": t_e * scale, "T_R": max(total - t_d - t_e, 0.0) * scale, "T_H0": t_h0 * scale}


def _full_compress(image: SampleGrid) -> bytes:
    return compress_detailed(read_pgm(write_pgm(image)), CompressConfig(Mode.DWT, 3)).data


def cmd_cost(args) -> int:
    heuristic = Heuristic(args.heuristic)
    cost = predicted_cost(heuristic, args.iters, args.levels)
    name = f"{heuristic.name}({args.iters})"
    print(f"{name}: <= {float(cost.te):.2f} T_E + {float(cost.td):.2f} T_D + T_R   (T_E {cost.te}, T_D {cost.td}, levels unbounded)")
    print(f"  t={args.levels}: encoded symbols <= {cost.symbols} p = {float(cost.symbols):.4f} p, lifting steps <= {cost.lifting} p = {float(cost.lifting):.4f} p")
    timings = None
    if args.timings:
        values = [float(x) for x in args.timings.split(",")]
        timings = dict(zip(("T_D", "T_E", "T_R", "T_H0"), values))
    elif args.calibrate:
        timings = calibrate(args.calibrate_size)
    if timings:
        print("  timings (ms per 1e6 px): " + ", ".join(f"{k}={v:.1f}" for k, v in timings.items()))
        rel = cost.relative_time(timings["T_D"], timings["T_E"], timings["T_R"])
        print(f"  predicted relative time {rel:.2f}  [{cost.formula()}]")
        if "T_H0" in timings:
            rel = cost.relative_time(timings["T_D"], timings["T_E"], timings["T_R"], timings["T_H0"])
            print(f"  with H0 estimation      {rel:.2f}  [{cost.formula('h0')}]")
    if args.image:
        image = load_pgm(args.image)
        counters = CostCounters()
        search = SearchConfig(heuristic, args.iters, Evaluator(args.estimator), args.levels)
        compress_detailed(image, CompressConfig(Mode.SSDWT, args.levels, search=search), counters)
        p = image.pixels
        print(f"  measured on {args.image}: encoded symbols {counters.encoded_symbols / p:.4f} p, lifting steps {counters.lifting_steps / p:.4f} p, entropy evals {counters.entropy_evals / p:.4f} p")
    return 0


def cmd_corpus(args) -> int:
    manifest = corpus.write_corpus(args.out, args.per_kind, args.size, args.seed)
    print(manifest)
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssdwt", description="Lossless image coding with a step-skipping 5/3 DWT.")
    sub = parser.add_subparsers(dest="command", required=True)

    def search_flags(p, iters_default=1):
        p.add_argument("--levels", type=int, default=3)
        p.add_argument("--iters", type=int, default=iters_default)
        p.add_argument("--estimator", choices=[e.value for e in Evaluator], default="bitrate")
        p.add_argument("--filters", type=_filters, default=(FilterId.NONE, FilterId.NULL, FilterId.MEDIAN5), help="comma list of none,null,median5")

    p = sub.add_parser("compress", help="compress a PGM into a .ssd container")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--mode", choices=[*MODES, "select"], default="dwt")
    p.add_argument("--heuristic", choices=[h.value for h in Heuristic if h is not Heuristic.H_SS_RDLS], default="rh")
    p.add_argument("--candidates", default="fix1,fix2,dwt", help="fixed variants for --mode select")
    p.add_argument("--stats", action="store_true")
    search_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a .ssd container to PGM")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output")
    p.add_argument("--verify", metavar="ORIGINAL", help="compare the decoded image with this PGM")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("bench", help="run variants over a manifest and report bitrates")
    p.add_argument("--manifest", required=True)
    p.add_argument("--variants", default="dwt,fix1,fix2")
    p.add_argument("--csv", help="write the CSV here instead of stdout")
    p.add_argument("--no-timing", action="store_true", help="leave time columns empty (byte-stable output)")
    search_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("cost", help="predicted complexity of BH/RH")
    p.add_argument("--heuristic", choices=["bh", "rh"], default="rh")
    p.add_argument("--iters", type=int, default=1)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--timings", help="T_D,T_E,T_R[,T_H0] in ms per 1e6 pixels")
    p.add_argument("--calibrate", action="store_true", help="measure the unit timings here")
    p.add_argument("--calibrate-size", type=int, default=512)
    p.add_argument("--image", help="also run the heuristic on this PGM and report counters")
    p.add_argument("--estimator", choices=[e.value for e in Evaluator], default="bitrate")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("corpus", help="write the synthetic test corpus and its manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--per-kind", type=int, default=3)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CodecError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
