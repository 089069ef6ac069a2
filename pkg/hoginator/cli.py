"""Batch command line: extract, train, detect, eval, cycles, bench, synth."""
from __future__ import annotations

import argparse
import logging
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterable, Iterator, TextIO, TypeVar

import numpy as np

from .core.approx_math import F32
from .core.classifier import LabeledSample, SvmModel, classify, decision_value, evaluate, format_eval_table, train
from .core.cycle_model import (
    PUBLISHED_SOFTWARE_DETECT_S,
    PUBLISHED_SOFTWARE_EXTRACT_S,
    compare_to_paper,
    estimate,
    format_key_values,
    format_report_table,
)
from .core.descriptor import (
    DEFAULT_GEOMETRY,
    FEATURE_ORDER_VERSION,
    WindowDescriptor,
    assemble_descriptor,
    extract_window,
    format_descriptor_line,
)
from .core.gradient_field import Backend
from .errors import EXIT_OK, DatasetError, HogError, ModelMismatchError
from .utils.image_ops import load_window
from .utils.manifest import ManifestEntry, read_manifest
from .utils.model_file import load_model, save_model
from .utils.settings import COMMANDS, RunConfig, build_config, load_settings
from .utils.synthetic import synth_window, write_dataset

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _parallel_map(cfg: RunConfig, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map in input order, on a thread pool when --workers > 1."""
    if cfg.workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(fn, items))


@contextmanager
def _output(cfg: RunConfig) -> Iterator[TextIO]:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as f:
            yield f
    else:
        yield sys.stdout


def _entries(cfg: RunConfig, require_labels: bool = False) -> list[ManifestEntry]:
    if cfg.manifest_path:
        return read_manifest(cfg.manifest_path, require_labels=require_labels)
    return [ManifestEntry(Path(p)) for p in cfg.images]


def _extract_all(cfg: RunConfig, entries: list[ManifestEntry], backend: Backend) -> list[WindowDescriptor]:
    def work(entry: ManifestEntry) -> WindowDescriptor:
        return extract_window(entry.path, backend, cfg.crop_mode, DEFAULT_GEOMETRY, cfg.eps)

    logger.debug("extracting %d windows with %s backend", len(entries), backend.value)
    return _parallel_map(cfg, work, entries)


def _labeled(cfg: RunConfig, backend: Backend, entries: list[ManifestEntry] | None = None) -> list[LabeledSample]:
    entries = entries if entries is not None else _entries(cfg, require_labels=True)
    descs = _extract_all(cfg, entries, backend)
    return [LabeledSample(d.features, e.label) for d, e in zip(descs, entries)]


def _load_engine_model(cfg: RunConfig) -> SvmModel:
    model = load_model(cfg.model_path)
    if model.feature_order_version != FEATURE_ORDER_VERSION:
        raise ModelMismatchError(
            f"model feature order {model.feature_order_version!r} does not match engine {FEATURE_ORDER_VERSION!r}"
        )
    if model.dim != DEFAULT_GEOMETRY.descriptor_len:
        raise ModelMismatchError(f"model has {model.dim} weights, engine produces {DEFAULT_GEOMETRY.descriptor_len} features")
    return model


def _f32(value: float) -> str:
    return np.format_float_positional(F32(value), unique=True, trim="-")


def cmd_extract(cfg: RunConfig) -> int:
    entries = _entries(cfg)
    descs = _extract_all(cfg, entries, cfg.resolved_backend)
    with _output(cfg) as out:
        for d in descs:
            out.write(format_descriptor_line(d) + "\n")
    logger.info("wrote %d descriptors", len(descs))
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    entries = read_manifest(cfg.manifest_path, require_labels=True)
    labels = {e.label for e in entries}
    if labels != {0, 1}:
        raise DatasetError(f"training manifest needs both labels, found {sorted(labels)}")
    samples = _labeled(cfg, cfg.resolved_backend, entries)
    model = train(samples, lam=cfg.lam, epochs=cfg.epochs, seed=cfg.seed)
    save_model(model, cfg.output_path)
    report = evaluate(model, samples)
    print(f"training accuracy: {100.0 * report.accuracy:.2f}% ({report.true_pos + report.true_neg}/{report.total})")
    logger.info("model written to %s", cfg.output_path)
    return EXIT_OK


def cmd_detect(cfg: RunConfig) -> int:
    model = _load_engine_model(cfg)
    entries = _entries(cfg)
    descs = _extract_all(cfg, entries, cfg.resolved_backend)
    with _output(cfg) as out:
        for entry, d in zip(entries, descs):
            out.write(f"{entry.path},{_f32(decision_value(model, d))},{classify(model, d)}\n")
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    model = _load_engine_model(cfg)
    samples = _labeled(cfg, cfg.resolved_backend)
    report = evaluate(model, samples)
    with _output(cfg) as out:
        out.write(format_eval_table(report) + "\n")
    return EXIT_OK


def cmd_cycles(cfg: RunConfig) -> int:
    report = estimate(DEFAULT_GEOMETRY, cfg.cycle_plan)
    comparisons = compare_to_paper(report)
    text = format_key_values(report, comparisons) if cfg.report_format == "kv" else format_report_table(report, comparisons)
    with _output(cfg) as out:
        out.write(text + "\n")
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    """Time extract+classify per window on both backends; report only."""
    if cfg.manifest_path or cfg.images:
        windows = [load_window(e.path, cfg.crop_mode) for e in _entries(cfg)]
    else:
        rng = np.random.default_rng(cfg.seed)
        windows = [synth_window(i % 2, rng) for i in range(cfg.count)]
    if not windows:
        raise DatasetError("nothing to benchmark")
    model = _load_engine_model(cfg) if cfg.model_path else SvmModel.zeros(DEFAULT_GEOMETRY.descriptor_len)

    labels = {}
    with _output(cfg) as out:
        out.write(f"{len(windows)} windows; baseline {PUBLISHED_SOFTWARE_EXTRACT_S * 1e3:g} ms extract, "
                  f"{PUBLISHED_SOFTWARE_DETECT_S * 1e3:g} ms detect\n")
        for backend in Backend:
            t0 = time.perf_counter()
            labels[backend] = [classify(model, assemble_descriptor(w, backend, DEFAULT_GEOMETRY, cfg.eps)) for w in windows]
            per_window = (time.perf_counter() - t0) / len(windows)
            verdict = "within" if per_window < PUBLISHED_SOFTWARE_DETECT_S else "slower than"
            out.write(f"{backend.value:<10} {per_window * 1e3:8.2f} ms/window ({verdict} baseline)\n")
        agree = sum(a == b for a, b in zip(labels[Backend.REFERENCE], labels[Backend.HARDWARE]))
        out.write(f"backend agreement: {agree}/{len(windows)}\n")
    return EXIT_OK


def cmd_synth(cfg: RunConfig) -> int:
    manifest = write_dataset(cfg.output_path, cfg.count, cfg.seed)
    print(manifest)
    return EXIT_OK


COMMAND_HANDLERS: dict[str, Callable[[RunConfig], int]] = {
    "extract": cmd_extract,
    "train": cmd_train,
    "detect": cmd_detect,
    "eval": cmd_eval,
    "cycles": cmd_cycles,
    "bench": cmd_bench,
    "synth": cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--settings", help="JSON settings file (default: settings.json next to the package)")
    common.add_argument("--backend", choices=[b.value for b in Backend])
    common.add_argument("--eps", type=float)
    common.add_argument("--crop", dest="crop_mode", choices=["exact", "center", "center_crop"])
    common.add_argument("--model", dest="model_path")
    common.add_argument("--manifest", dest="manifest_path")
    common.add_argument("--out", dest="output_path")
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--epochs", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--clock-hz", dest="clock_hz", type=float)
    common.add_argument("--overlap", dest="overlap_mode", choices=["sequential", "overlapped", "cell_norm_overlapped"])
    common.add_argument("--cycles-per-mac", dest="cycles_per_mac", type=int)
    common.add_argument("--svm-fill", dest="svm_pipeline_fill", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--count", type=int)
    common.add_argument("--format", dest="report_format", choices=["table", "kv"])
    common.add_argument("-v", "--verbose", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="hog_detector", description="HOG + linear SVM detection for 130x66 windows")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=(COMMAND_HANDLERS[name].__doc__ or name).splitlines()[0])
        if name in ("extract", "detect", "bench"):
            p.add_argument("images", nargs="*", help="image files (alternative to --manifest)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(levelname)s] %(message)s",
        stream=sys.stderr,
    )
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "settings")}
    try:
        cfg = build_config(args.command, load_settings(args.settings), overrides)
        return COMMAND_HANDLERS[cfg.command](cfg)
    except HogError as e:
        logger.error("%s", e)
        return e.exit_code
    except Exception as e:
        logger.error("unexpected failure: %s\n%s", e, traceback.format_exc())
        return 1
