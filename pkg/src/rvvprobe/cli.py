"""Command-line entry point tying the toolkit together.

Verbs: gen, predict, sim, run, calibrate, analyze, campaign, report.
Exit codes: 0 success, 1 user error, 2 environment/capability error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import traceback

from . import campaign as campaign_mod
from . import report as report_mod
from .calibrate import DEFAULT_FLOOR, DEFAULT_TOLERANCE, calibrate_suite, references_from_specs
from .core import EVENT_ORDER, EventKind, VectorConfig
from .errors import (
    CapabilityError,
    InternalInvariantError,
    RvvProbeError,
)
from .kernelgen import (
    DEFAULT_ITERATIONS,
    SUITE_KINDS,
    KernelSpec,
    generate_kernel,
    generate_suite,
)
from .refmodel import parse_kernel, predict_counts
from .runner import (
    DEFAULT_RUNS,
    append_samples,
    load_platform,
    load_replay_bundle,
    probe_platform,
    read_samples,
    run_benchmark,
)
from .sim import execute


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--vlen", type=int, default=256, help="vector register width in bits")
    sub.add_argument("--config", help="platform config file (event map, clock, width)")
    sub.add_argument("--format", default="table", choices=("table", "csv", "json"),
                     help="output format")


def _print_counts(counts: dict, fmt: str, extra: dict | None = None) -> None:
    extra = extra or {}
    if fmt == "json":
        print(json.dumps({**extra, "counts": counts}, indent=2, sort_keys=True))
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["field", "value"])
        for k, v in extra.items():
            writer.writerow([k, v])
        for k, v in counts.items():
            writer.writerow([k, v])
        print(buf.getvalue(), end="")
    else:
        for k, v in extra.items():
            print(f"{k:>18}: {v}")
        for k, v in counts.items():
            print(f"{k:>18}: {v}")


def _cmd_gen(args) -> int:
    cfg = VectorConfig(args.vlen)
    specs = generate_suite(args.suite, cfg, lmul=args.lmul, iterations=args.iterations)
    os.makedirs(args.out, exist_ok=True)
    for spec in specs:
        module = generate_kernel(spec, cfg)
        module.write(args.out)
    print(f"generated {len(specs)} kernels from suite {args.suite!r} into {args.out}")
    return 0


def _cmd_predict(args) -> int:
    with open(args.kernel) as fh:
        kernel = parse_kernel(fh.read())
    ref = predict_counts(kernel, args.iterations)
    _print_counts(
        ref.counts.as_dict(), args.format,
        extra={"kernel": os.path.basename(args.kernel),
               "iterations": args.iterations,
               "target_inst_count": ref.target_inst_count},
    )
    return 0


def _cmd_sim(args) -> int:
    with open(args.kernel) as fh:
        kernel = parse_kernel(fh.read())
    cfg = VectorConfig(args.vlen)
    counts, state = execute(kernel, args.iterations, cfg)
    _print_counts(
        counts.as_dict(), args.format,
        extra={"kernel": os.path.basename(args.kernel), "iterations": args.iterations},
    )
    if args.dump_state:
        print(state.dump())
    return 0


def _parse_events(text: str) -> list[EventKind]:
    events = []
    for part in text.split(","):
        part = part.strip().replace("-", "_")
        try:
            events.append(EventKind(part))
        except ValueError:
            valid = ", ".join(e.value for e in EVENT_ORDER)
            raise RvvProbeError(f"unknown event {part!r}; expected one of {valid}") from None
    return events


def _cmd_run(args) -> int:
    os.makedirs(args.results, exist_ok=True)
    store = os.path.join(args.results, "samples.jsonl")
    if args.replay:
        bundle = load_replay_bundle(args.replay)
        append_samples(store, bundle.samples, platform_name=bundle.platform.name)
        print(f"replayed {len(bundle.samples)} samples from {args.replay} into {store}")
        return 0

    configured = load_platform(args.config) if args.config else None
    info = probe_platform(configured=configured)
    if not info.rvv_supported:
        raise CapabilityError("this host has no RVV unit; use --replay with a fixture")
    events = _parse_events(args.events)
    binaries = sorted(
        os.path.join(args.kernel_dir, f)
        for f in os.listdir(args.kernel_dir)
        if os.access(os.path.join(args.kernel_dir, f), os.X_OK)
        and os.path.isfile(os.path.join(args.kernel_dir, f))
    )
    if not binaries:
        raise RvvProbeError(f"no executable benchmarks under {args.kernel_dir}")
    total = 0
    for binary in binaries:  # sequential by contract: exclusive core use
        samples = run_benchmark(
            binary, events, runs=args.runs, core_pin=args.pin,
            iterations=args.iterations, platform_info=info,
        )
        meta_path = os.path.splitext(binary)[0] + ".json"
        if os.path.exists(meta_path):
            with open(meta_path) as fh:
                echo = json.load(fh)
            samples = [dataclasses.replace(s, spec_echo=echo) for s in samples]
        append_samples(store, samples, platform_name=info.name)
        total += len(samples)
    print(f"collected {total} samples into {store}")
    return 0


def _cmd_calibrate(args) -> int:
    path = args.results
    if os.path.isdir(path):
        path = os.path.join(path, "samples.jsonl")
    if path.endswith(".jsonl"):
        samples = read_samples(path)
        specs = {
            s.kernel_name: KernelSpec.from_dict(s.spec_echo)
            for s in samples if s.spec_echo
        }
    else:
        bundle = load_replay_bundle(path)
        samples = list(bundle.samples)
        specs = dict(bundle.specs)
    if not specs:
        raise RvvProbeError("no kernel specs available to derive references from")
    refs = references_from_specs(specs)
    report = calibrate_suite(samples, refs, tolerance=args.tolerance, floor=args.floor)

    if args.report == "json":
        payload = {
            "tolerance": report.tolerance,
            "floor": report.floor,
            "verdicts": {e.value: report.verdicts[e].verdict for e in EVENT_ORDER},
            "usable_events": sorted(e.value for e in report.usable_events),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        req = report_mod.ReportRequest(
            kind="calibration-table", inputs=(str(args.results),),
            fmt="csv" if args.report == "csv" else "table",
            tolerance=args.tolerance, floor=args.floor,
        )
        print(report_mod.render(req), end="")
    return 0


_ANALYZE_KINDS = {
    "throughput": "throughput-table",
    "overhead": "tail-overhead-curve",
    "mix": "mix-stacks",
    "sweep": "lmul-sweep",
}


def _cmd_analyze(args) -> int:
    inputs = [args.infile]
    if args.calibration:
        inputs.append(args.calibration)
    fmt = args.format
    req = report_mod.ReportRequest(
        kind=_ANALYZE_KINDS[args.what], inputs=tuple(inputs),
        fmt="csv" if fmt in ("csv", "json") else "table",
    )
    text = report_mod.render(req)
    if fmt == "json" and text != report_mod.NO_RECORDS:
        rows = list(csv.DictReader(io.StringIO(text)))
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    out = args.out
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
        print(f"wrote {out}")
    else:
        print(text, end="")
    return 0


def _cmd_campaign(args) -> int:
    if args.action == "report":
        store = os.path.join(args.results, "campaign.jsonl")
        if not os.path.exists(store):
            print(report_mod.NO_RECORDS, end="")
            return 0
        fmt = "csv" if args.format == "csv" else "table"
        for kind in ("speedup-bars", "reduction-bars", "lmul-sweep"):
            req = report_mod.ReportRequest(kind=kind, inputs=(store,), fmt=fmt)
            print(f"# {kind}")
            print(report_mod.render(req), end="")
            print()
        return 0

    manifests = campaign_mod.load_manifests(args.manifest)
    compilers = campaign_mod.load_compiler_configs(args.compilers)
    levels = [int(x) for x in args.lmul.split(",")] if args.lmul else []
    jobs = campaign_mod.expand_matrix(manifests, compilers, levels)
    os.makedirs(args.results, exist_ok=True)
    store = os.path.join(args.results, "campaign.jsonl")

    calibration = None
    if args.calibration:
        bundle = load_replay_bundle(args.calibration)
        refs = references_from_specs(dict(bundle.specs))
        calibration = calibrate_suite(bundle.samples, refs)

    if args.replay:
        measure = campaign_mod.replay_measure(args.replay)
    else:
        build_dir = args.build_dir or os.path.join(args.results, "build")
        events = list(calibration.usable_events) if calibration else [EventKind.RETIRED]

        def measure(job):
            built = campaign_mod.build_app(job, build_dir)
            ok, _output = campaign_mod.validate_app_run(job, built.binary)
            samples = run_benchmark(
                built.binary, events, runs=args.runs, core_pin=args.pin,
                platform_info=probe_platform(
                    configured=load_platform(args.config) if args.config else None
                ),
            )
            return campaign_mod.summarize_samples(
                job.key, job.app.app, job.compiler.compiler, job.mode, job.lmul,
                samples, valid=ok,
            )

    records = campaign_mod.run_campaign(
        jobs, measure, calibration=calibration,
        baseline_key=args.baseline, store_path=store,
    )
    baselines = sum(1 for r in records if r.baseline)
    print(f"campaign: {len(jobs)} jobs -> {len(records)} records "
          f"({baselines} baselines) in {store}")
    return 0


def _cmd_report(args) -> int:
    inputs = [args.infile]
    if args.aux:
        inputs.append(args.aux)
    fmt = "csv" if args.format == "csv" else "table"
    req = report_mod.ReportRequest(
        kind=args.kind, inputs=tuple(inputs), fmt=fmt,
        tolerance=args.tolerance, floor=args.floor, baseline_key=args.baseline,
    )
    print(report_mod.render(req), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rvvprobe",
        description="RVV microbenchmark generation, modeling, counter calibration, "
                    "and compiler campaign analytics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a microbenchmark kernel suite")
    p.add_argument("--suite", required=True, choices=SUITE_KINDS)
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    p.add_argument("--lmul", type=int, default=1, choices=(1, 2, 4, 8))
    _common_flags(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("predict", help="statically predict event counts for a kernel")
    p.add_argument("--kernel", required=True)
    p.add_argument("--iterations", type=int, required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("sim", help="execute a kernel in the functional interpreter")
    p.add_argument("--kernel", required=True)
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--dump-state", action="store_true")
    _common_flags(p)
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("run", help="measure benchmark binaries, or replay a fixture")
    p.add_argument("--kernel-dir")
    p.add_argument("--replay")
    p.add_argument("--events", default="retired")
    p.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    p.add_argument("--pin", type=int, default=None)
    p.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    p.add_argument("--results", required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("calibrate", help="classify counter reliability against references")
    p.add_argument("--results", required=True,
                   help="replay fixture or results dir/samples.jsonl")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    p.add_argument("--report", default="table", choices=("table", "csv", "json"))
    _common_flags(p)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("analyze", help="derived metrics over recorded samples")
    p.add_argument("what", choices=sorted(_ANALYZE_KINDS))
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--calibration", help="replay fixture for the usable-event set")
    p.add_argument("--out", default="-")
    _common_flags(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("campaign", help="compiler x mode x LMUL experiment")
    p.add_argument("action", choices=("run", "report"))
    p.add_argument("--manifest")
    p.add_argument("--compilers")
    p.add_argument("--lmul", default="")
    p.add_argument("--baseline", default="gcc15:nonvec")
    p.add_argument("--results", required=True)
    p.add_argument("--replay", help="campaign fixture instead of hardware runs")
    p.add_argument("--calibration", help="replay fixture to derive usable events")
    p.add_argument("--build-dir")
    p.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    p.add_argument("--pin", type=int, default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("report", help="render tables / tidy CSV from stored results")
    p.add_argument("--kind", required=True, choices=report_mod.REPORT_KINDS)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--aux", help="secondary input (e.g. calibration fixture for mix)")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    p.add_argument("--baseline", default="gcc15:nonvec")
    _common_flags(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3
    except RvvProbeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
