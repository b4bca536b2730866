"""Command-line front end: embed, extract, attack, bench, congestion-compare, hwverify."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import attacks, codec, congestion, metrics, synthetic
from .attacks import AttackSpec
from .codec import EmbedMode
from .imagecore import GrayImage, load_image, partition, store_image

log = logging.getLogger("artifact")

MODE_CHOICES = ("plane3", "plane5", "basic", "enhanced")
BENCH_QUALITIES = (90, 80)
COMPARE_QUALITY = 80
COMPARE_METHODS = ("dct", "entropy", "edge", "proposed")


class UsageError(Exception):
    pass


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{x:.4f}"


def _distinct(*paths) -> None:
    resolved = [os.path.realpath(p) for p in paths if p is not None]
    if len(set(resolved)) != len(resolved):
        raise UsageError("input and output paths must be distinct")


def _attack_list(args) -> list[AttackSpec]:
    specs = [AttackSpec.parse(s) for s in (args.attack or [])]
    if getattr(args, "quality", None) is not None:
        specs.append(AttackSpec("jpeg", quality=args.quality))
    if getattr(args, "density", None) is not None:
        specs.append(AttackSpec("saltpepper", density=args.density, seed=args.seed))
    if getattr(args, "window", None) is not None:
        specs.append(AttackSpec("median", window=args.window))
    return specs


def _corpus(args) -> list[tuple[str, GrayImage]]:
    items: list[tuple[str, GrayImage]] = []
    for entry in args.inputs:
        p = Path(entry)
        files = sorted(p.glob("*.pgm")) if p.is_dir() else [p]
        items.extend((f.stem, load_image(f)) for f in files)
    for k in range(args.synthetic):
        items.append((f"synthetic{k:02d}", synthetic.natural_like(args.size, args.seed + k)))
    if not items:
        raise UsageError("no input images (give PGM files, a directory, or --synthetic N)")
    return items


def _write_report(rows: list[dict], fields: list[str], dest: str | None, fmt: str) -> None:
    if fmt == "table":
        text = _table(rows, fields)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)
        log.info("report written to %s", dest)


def _table(rows: list[dict], fields: list[str]) -> str:
    cells = [fields] + [[str(r[f]) for f in fields] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(fields))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------


def cmd_embed(args) -> int:
    _distinct(args.input, args.output)
    image = load_image(args.input)
    grid = partition(image)
    if args.message:
        msg = codec.read_message(args.message)
    else:
        msg = codec.random_message(grid.count, args.seed)
        msg_out = args.message_out or f"{args.output}.msg"
        _distinct(args.input, args.output, msg_out)
        codec.write_message(msg, msg_out)
        print(f"message: {grid.count} bits from seed {args.seed} -> {msg_out}")
    mode = EmbedMode.parse(args.mode)
    marked = codec.embed(image, msg, mode)
    store_image(marked, args.output)
    q = metrics.quality(image, marked)
    print(f"mode={mode.label} blocks={grid.count} disordered={congestion.analyze(image).n_d}")
    print(f"PSNR={metrics.format_psnr(q.psnr)} dB SSIM={q.ssim:.4f}")
    return 0


def cmd_extract(args) -> int:
    _distinct(args.input, args.output)
    image = load_image(args.input)
    bits = codec.extract(image, EmbedMode.parse(args.mode))
    codec.write_message(bits, args.output)
    print(f"extracted {bits.size} bits -> {args.output}")
    if args.reference:
        ref = codec.read_message(args.reference)
        print(f"NC={metrics.nc(ref, bits):.4f} BER={metrics.bit_error_rate(ref, bits):.4f}")
    return 0


def cmd_attack(args) -> int:
    _distinct(args.input, args.output)
    specs = _attack_list(args)
    if not specs:
        raise UsageError("no attack given (use --attack, --quality, --density or --window)")
    image = load_image(args.input)
    out = attacks.apply_chain(image, specs)
    store_image(out, args.output)
    print(f"applied {' -> '.join(map(str, specs))}; PSNR={metrics.format_psnr(metrics.psnr(image, out))} dB")
    return 0


def bench_rows(corpus, seed: int, extra: list[AttackSpec], config: str) -> list[dict]:
    rows = []
    for name, image in corpus:
        msg = codec.random_message(partition(image).count, seed)
        for mode in codec.BENCH_MODES:
            marked = codec.embed(image, msg, mode)
            q = metrics.quality(image, marked)
            row = {"image": name, "method": mode.label, "ssim": _fmt(q.ssim), "psnr": _fmt(q.psnr)}
            for quality in BENCH_QUALITIES:
                got = codec.extract(attacks.jpeg_attack(marked, quality), mode)
                row[f"nc_q{quality}"] = _fmt(metrics.nc(msg, got))
            for spec in extra:
                row[f"nc_{spec}"] = _fmt(metrics.nc(msg, codec.extract(spec.apply(marked), mode)))
            row["seed"] = seed
            row["config"] = config
            rows.append(row)
    return rows


def cmd_bench(args) -> int:
    corpus = _corpus(args)
    extra = _attack_list(args)
    config = config_hash({"cmd": "bench", "seed": args.seed, "images": [n for n, _ in corpus], "extra": [str(s) for s in extra]})
    rows = bench_rows(corpus, args.seed, extra, config)
    fields = ["image", "method", "ssim", "psnr"] + [f"nc_q{q}" for q in BENCH_QUALITIES]
    fields += [f"nc_{s}" for s in extra] + ["seed", "config"]
    _write_report(rows, fields, args.report, args.format)
    return 0


def congestion_rows(corpus, seed: int, config: str) -> list[dict]:
    rows = []
    for name, image in corpus:
        maps = congestion.comparison_maps(image)
        n_d = maps["proposed"].n_d
        msg = codec.random_message(partition(image).count, seed)
        for method in COMPARE_METHODS:
            cmap = maps[method]
            marked = codec.embed(image, msg, codec.ENHANCED, cmap=cmap)
            attacked = attacks.jpeg_attack(marked, COMPARE_QUALITY)
            got = codec.extract(attacked, codec.ENHANCED, cmap=cmap)
            q = metrics.quality(image, marked)
            rows.append(
                {
                    "image": name,
                    "method": method,
                    "n_d": n_d,
                    "disordered": cmap.n_d,
                    "psnr": _fmt(q.psnr),
                    "ssim": _fmt(q.ssim),
                    f"nc_q{COMPARE_QUALITY}": _fmt(metrics.nc(msg, got)),
                    "seed": seed,
                    "config": config,
                }
            )
    return rows


def cmd_congestion_compare(args) -> int:
    corpus = _corpus(args)
    config = config_hash({"cmd": "congestion-compare", "seed": args.seed, "images": [n for n, _ in corpus]})
    rows = congestion_rows(corpus, args.seed, config)
    bad = [r for r in rows if r["disordered"] != r["n_d"]]
    fields = ["image", "method", "n_d", "disordered", "psnr", "ssim", f"nc_q{COMPARE_QUALITY}", "seed", "config"]
    _write_report(rows, fields, args.report, args.format)
    if bad:
        print(f"error: {len(bad)} maps do not have the disordered count of the proposed map", file=sys.stderr)
        return 1
    return 0


def hw_checks(image: GrayImage, message, out_trace: str | None = None) -> list[tuple[str, bool, str]]:
    from . import hwsim

    results = []
    popcount_ok = all(
        hwsim.compressor_9_4([(v >> k) & 1 for k in range(9)]) == bin(v).count("1") for v in range(512)
    )
    results.append(("compressor_9_4 == popcount (512 vectors)", popcount_ok, ""))
    ti_ok = all(hwsim.type_indicator(s) == (s in congestion.DISORDERED_SUMS) for s in range(10))
    results.append(("type_indicator == {4,5,6} membership (s=0..9)", ti_ok, ""))
    counts = hwsim.compressor_net().cell_counts()
    budget_ok = counts.get("FA", 0) == 5 and counts.get("HA", 0) == 2 and set(counts) <= {"FA", "HA"}
    results.append(("compressor netlist = 5 FA + 2 HA", budget_ok, dict(counts).__repr__()))
    n = image.width
    for enhanced, mode in ((False, codec.BASIC), (True, codec.ENHANCED)):
        out, trace = hwsim.pipeline_run(image, message, enhanced=enhanced)
        ref = codec.embed(image, message, mode)
        diff = int(np.count_nonzero(out.pixels != ref.pixels))
        results.append((f"pipeline == software embed ({mode.label})", diff == 0, f"{diff} differing pixels"))
        results.append((f"pipeline cycles == N+6 ({mode.label})", trace.total_cycles == n + 6, f"{trace.total_cycles} cycles, N={n}"))
        if out_trace and not enhanced:
            Path(out_trace).write_text(trace.timeline())
    return results


def cmd_hwverify(args) -> int:
    from . import hwsim

    if args.input:
        image = load_image(args.input)
    else:
        image = synthetic.natural_like(args.size, args.seed)
    if image.width != image.height:
        raise UsageError(f"hwverify needs a square image, got {image.width}x{image.height}")
    msg = codec.read_message(args.message) if args.message else codec.random_message(partition(image).count, args.seed)
    if args.netlist:
        text = "".join(net.dump() for net in (hwsim.compressor_net(), hwsim.type_indicator_net(), hwsim.embed_mux_net()))
        Path(args.netlist).write_text(text)
    results = hw_checks(image, msg, args.trace)
    failed = 0
    for name, ok, detail in results:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
    return 1 if failed else 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def attack_flags(p):
        p.add_argument("--attack", action="append", metavar="SPEC", help="jpeg:Q, saltpepper:D[:SEED] or median:W (repeatable)")
        p.add_argument("--quality", type=int, help="shorthand for --attack jpeg:Q")
        p.add_argument("--density", type=float, help="shorthand for --attack saltpepper:D:SEED")
        p.add_argument("--window", type=int, help="shorthand for --attack median:W")

    def corpus_flags(p):
        p.add_argument("inputs", nargs="*", help="PGM files or directories of PGM files")
        p.add_argument("--synthetic", type=int, default=0, metavar="N", help="add N synthetic natural-like images")
        p.add_argument("--size", type=int, default=255, help="synthetic image size (default 255)")
        p.add_argument("--report", help="CSV destination (default stdout)")
        p.add_argument("--format", choices=("csv", "table"), default="csv")

    p = sub.add_parser("embed", help="embed a message")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=MODE_CHOICES, default="basic")
    p.add_argument("--message", help="message file ('0'/'1' text or binary logo PGM)")
    p.add_argument("--message-out", help="where to write a generated message (default OUTPUT.msg)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="blindly extract a message")
    p.add_argument("input")
    p.add_argument("output", help="destination for the extracted bits")
    p.add_argument("--mode", choices=MODE_CHOICES, default="basic")
    p.add_argument("--reference", "--message", dest="reference", help="original message, prints NC")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="apply an attack chain")
    p.add_argument("input")
    p.add_argument("output")
    attack_flags(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="fixed-plane vs adaptive quality/robustness report")
    corpus_flags(p)
    attack_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("congestion-compare", help="compare MSB, DCT, entropy and edge congestion maps")
    corpus_flags(p)
    p.set_defaults(func=cmd_congestion_compare)

    p = sub.add_parser("hwverify", help="verify the gate-level model against the software codec")
    p.add_argument("input", nargs="?", help="square PGM (default: synthetic image)")
    p.add_argument("--size", type=int, default=27)
    p.add_argument("--message")
    p.add_argument("--trace", help="write the basic-mode pipeline timeline here")
    p.add_argument("--netlist", help="write the netlists here")
    p.set_defaults(func=cmd_hwverify)

    for action in sub.choices.values():
        action.add_argument("--seed", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
