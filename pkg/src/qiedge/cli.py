"""Batch command-line front end.

Subcommands:

* ``detect``  run one pipeline variant over a set of images, optionally
  evaluating against ground truth and sweeping Gaussian noise levels.
* ``ablate``  the same, but for all four variants; requires ``--gt``.
* ``synth``   write the synthetic shapes suite (images + ground truth).

Settings resolve as command-line flag > ``--config`` JSON file > built-in
default. No environment variables are consulted. Exit status is 0 when
every image was processed, 1 on usage errors, 2 when some or all images
failed.
"""
from __future__ import annotations

import argparse
import glob
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .canny import CannyThresholds
from .diffusion import STABLE_DELTA, DiffusionConfig, Stencil
from .edgefilters import GaussianSpec
from .fileio import read_image, read_mask, write_gray, write_rgb
from .imagecore import ImageError, to_grayscale
from .metrics import EvalReport, dataset_scores, default_thresholds, default_tolerance, pr_curve
from .noise import NoiseSpec, add_gaussian_noise
from .pipeline import PipelineConfig, Variant, overlay, run_pipeline
from .synthetic import write_suite

log = logging.getLogger("qiedge")

SCHEMA_VERSION = "1.0"
IMAGE_SUFFIXES = (".png", ".pgm", ".pnm")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2

DEFAULTS: dict[str, Any] = {
    "input": [],
    "gt": None,
    "output": None,
    "report": None,
    "variant": Variant.FULL.value,
    "delta": 0.1,
    "time_steps": 10,
    "stencil": Stencil.FOUR_NEIGHBOR.value,
    "blur_sigma": 1.0,
    "blur_radius": 1,
    "t_low": 50.0,
    "t_high": 150.0,
    "binarize_at": 128.0,
    "tolerance": None,
    "thin": False,
    "noise_sigmas": [],
    "seed": 0,
    "overlay_color": None,
    "threads": 1,
    "allow_inplace": False,
}


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    inputs: list[Path]
    gt_dir: Path | None
    output_dir: Path
    report_path: Path
    pipeline: PipelineConfig
    noise_sigmas: list[float]
    seed: int
    tolerance: float | None
    thin: bool
    overlay_color: tuple[int, int, int] | None
    threads: int
    settings: dict[str, Any] = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _color(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected R,G,B, got {text!r}")
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected R,G,B, got {text!r}")
    return vals


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--input", nargs="+", default=S, help="image files, directories or glob patterns")
    p.add_argument("--gt", default=S, help="directory of ground-truth edge maps matched by file stem")
    p.add_argument("--output", default=S, help="output directory for edge maps")
    p.add_argument("--report", default=S, help="JSON report path (default: <output>/report.json)")
    p.add_argument("--config", default=None, help="JSON file of settings (keys as flag names, '_' for '-')")
    p.add_argument("--variant", choices=[v.value for v in Variant], default=S)
    p.add_argument("--delta", type=float, default=S, help="diffusion rate per step")
    p.add_argument("--time-steps", type=int, default=S, dest="time_steps")
    p.add_argument("--stencil", choices=[s.value for s in Stencil], default=S)
    p.add_argument("--blur-sigma", type=float, default=S, dest="blur_sigma")
    p.add_argument("--blur-radius", type=int, default=S, dest="blur_radius")
    p.add_argument("--t-low", type=float, default=S, dest="t_low")
    p.add_argument("--t-high", type=float, default=S, dest="t_high")
    p.add_argument("--binarize-at", type=float, default=S, dest="binarize_at")
    p.add_argument("--tolerance", type=float, default=S, help="match radius in pixels (default 0.0075 x diagonal)")
    p.add_argument("--thin", action="store_true", default=S, help="thin binarized maps before matching")
    p.add_argument("--noise-sigmas", type=_float_list, default=S, dest="noise_sigmas")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--overlay-color", type=_color, default=S, dest="overlay_color")
    p.add_argument("--threads", type=int, default=S)
    p.add_argument("--allow-inplace", action="store_true", default=S, dest="allow_inplace",
                   help="permit writing outputs into an input directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qiedge", description="Diffusion-refined hybrid edge detection.")
    parser.add_argument("--version", action="version", version=f"qiedge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_run_flags(sub.add_parser("detect", help="run one variant over a batch of images"))
    _add_run_flags(sub.add_parser("ablate", help="run and score all four variants"))
    synth = sub.add_parser("synth", help="write the synthetic shapes suite")
    synth.add_argument("--output", required=True)
    synth.add_argument("--size", type=int, default=128)
    return parser


def _load_config(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise UsageError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return data


def resolve_settings(ns: argparse.Namespace) -> dict[str, Any]:
    settings = dict(DEFAULTS)
    if ns.config:
        settings.update(_load_config(ns.config))
    for key in DEFAULTS:
        if hasattr(ns, key):
            settings[key] = getattr(ns, key)
    if isinstance(settings["input"], str):
        settings["input"] = [settings["input"]]
    if isinstance(settings["noise_sigmas"], (int, float)):
        settings["noise_sigmas"] = [settings["noise_sigmas"]]
    return settings


def _expand_inputs(patterns: Sequence[str]) -> list[Path]:
    found: list[Path] = []
    for pat in patterns:
        p = Path(pat)
        if p.is_dir():
            found.extend(sorted(q for q in p.iterdir() if q.suffix.lower() in IMAGE_SUFFIXES))
        elif any(ch in pat for ch in "*?["):
            found.extend(sorted(Path(m) for m in glob.glob(pat)))
        else:
            found.append(p)
    seen, unique = set(), []
    for p in found:
        if p not in seen:
            seen.add(p)
            unique.append(p)
    return unique


def manifest_from_settings(command: str, s: dict[str, Any]) -> RunManifest:
    try:
        pipeline = PipelineConfig(
            variant=Variant(s["variant"]),
            diffusion=DiffusionConfig(float(s["delta"]), int(s["time_steps"]), Stencil(s["stencil"])),
            blur=GaussianSpec(float(s["blur_sigma"]), int(s["blur_radius"])),
            thresholds=CannyThresholds(float(s["t_low"]), float(s["t_high"])),
            binarize_at=float(s["binarize_at"]),
        )
        sigmas = [float(v) for v in s["noise_sigmas"]]
        for v in sigmas:
            NoiseSpec(v, 0)
    except (ImageError, ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc

    if not s["input"]:
        raise UsageError("--input is required")
    if not s["output"]:
        raise UsageError("--output is required")
    if s["tolerance"] is not None and float(s["tolerance"]) < 0:
        raise UsageError("--tolerance must be >= 0")
    if int(s["threads"]) < 1:
        raise UsageError("--threads must be >= 1")
    color = s["overlay_color"]
    if color is not None:
        if len(color) != 3 or not all(isinstance(c, int) and 0 <= c <= 255 for c in color):
            raise UsageError(f"--overlay-color needs three integers in [0, 255], got {color}")
        color = tuple(color)
    if command == "ablate" and not s["gt"]:
        raise UsageError("ablate requires --gt")

    inputs = _expand_inputs(s["input"])
    if not inputs:
        raise UsageError("no input images matched")
    output_dir = Path(s["output"])
    if not s["allow_inplace"]:
        out_res = output_dir.resolve()
        for p in inputs:
            if p.resolve().parent == out_res:
                raise UsageError(f"output directory {output_dir} contains inputs; pass --allow-inplace")
    report = Path(s["report"]) if s["report"] else output_dir / "report.json"
    if pipeline.diffusion.delta > STABLE_DELTA:
        log.warning("delta=%g exceeds %g; the explicit scheme may oscillate", pipeline.diffusion.delta, STABLE_DELTA)

    return RunManifest(
        command=command,
        inputs=inputs,
        gt_dir=Path(s["gt"]) if s["gt"] else None,
        output_dir=output_dir,
        report_path=report,
        pipeline=pipeline,
        noise_sigmas=sigmas,
        seed=int(s["seed"]),
        tolerance=None if s["tolerance"] is None else float(s["tolerance"]),
        thin=bool(s["thin"]),
        overlay_color=color,
        threads=int(s["threads"]),
        settings=s,
    )


def parse_args(argv: Sequence[str]) -> RunManifest:
    """Parse a ``detect``/``ablate`` command line into a manifest.

    Raises UsageError for unknown flags, unreadable config files and
    invalid values.
    """
    ns = build_parser().parse_args(list(argv))
    if ns.command == "synth":
        raise UsageError("synth takes no manifest")
    return manifest_from_settings(ns.command, resolve_settings(ns))


# --- batch execution -------------------------------------------------------


@dataclass
class _Item:
    index: int
    path: Path
    gt_path: Path | None
    image: np.ndarray | None = None
    gt: np.ndarray | None = None
    error: str | None = None


def _find_gt(gt_dir: Path, stem: str) -> Path | None:
    for suffix in IMAGE_SUFFIXES:
        cand = gt_dir / f"{stem}{suffix}"
        if cand.exists():
            return cand
    return None


def _load(item: _Item, gt_dir: Path | None) -> _Item:
    try:
        item.image = read_image(item.path)
        if gt_dir is not None:
            item.gt_path = _find_gt(gt_dir, item.path.stem)
            if item.gt_path is None:
                raise ImageError(f"no ground truth for {item.path.name} in {gt_dir}")
            item.gt = read_mask(item.gt_path)
            if item.gt.shape != item.image.shape[:2]:
                raise ImageError(f"ground truth {item.gt_path.name} has shape {item.gt.shape}, "
                                 f"image has {item.image.shape[:2]}")
    except ImageError as exc:
        item.error = str(exc)
    return item


def _sigma_tag(sigma: float) -> str:
    return f"sigma{sigma:g}".replace(".", "p")


def _process(item: _Item, cfg: PipelineConfig, sigma: float | None, m: RunManifest, out_dir: Path):
    gray = item.image if item.image.ndim == 2 else to_grayscale(item.image)
    if sigma is not None:
        gray = add_gaussian_noise(gray, NoiseSpec(sigma, m.seed + item.index))
    res = run_pipeline(gray, cfg)
    edges_path = out_dir / f"{item.path.stem}_edges.png"
    write_gray(edges_path, res.e_hybrid)
    binary = res.binary(cfg.binarize_at)
    record: dict[str, Any] = {
        "input": str(item.path),
        "ground_truth": str(item.gt_path) if item.gt_path else None,
        "variant": cfg.variant.value,
        "noise_sigma": sigma,
        "width": int(gray.shape[1]),
        "height": int(gray.shape[0]),
        "edge_map": str(edges_path),
        "overlay": None,
        "edge_pixels": int(binary.sum()),
        "edge_fraction": float(binary.mean()),
        "canny_pixels": int((res.e_canny > 0).sum()),
        "mean_response": float(res.e_hybrid.mean()),
    }
    if m.overlay_color is not None:
        ov_path = out_dir / f"{item.path.stem}_overlay.png"
        base = item.image if sigma is None else gray
        write_rgb(ov_path, overlay(base, binary, m.overlay_color))
        record["overlay"] = str(ov_path)
    curve = None
    if item.gt is not None:
        curve = pr_curve(res.e_hybrid, item.gt, default_thresholds(),
                         m.tolerance if m.tolerance is not None else default_tolerance(gray.shape), thin=m.thin)
    timing = {"stage_times": res.stage_times, "total_seconds": res.total_time}
    return record, curve, timing


def _run_variant(items: list[_Item], cfg: PipelineConfig, m: RunManifest, pool, out_root: Path):
    sweep: list[float | None] = list(m.noise_sigmas) or [None]
    records, timings, scores = [], [], []
    for sigma in sweep:
        out_dir = out_root if sigma is None else out_root / _sigma_tag(sigma)
        out_dir.mkdir(parents=True, exist_ok=True)
        results = list(pool.map(lambda it: _process(it, cfg, sigma, m, out_dir), items))
        curves = []
        for it, (rec, curve, timing) in zip(items, results):
            records.append(rec)
            timings.append({"input": rec["input"], "variant": rec["variant"], "noise_sigma": sigma, **timing})
            if curve is not None:
                curves.append(curve)
        report = dataset_scores(curves) if curves and len(curves) == len(items) else None
        scores.append((sigma, report))
    return records, timings, scores


def _eval_json(rep: EvalReport) -> dict[str, Any]:
    out = rep.summary()
    out["pr_curve"] = [
        {"threshold": p.threshold, "precision": p.precision, "recall": p.recall, "f": p.f}
        for p in rep.dataset_curve
    ]
    return out


def _echo(s: dict[str, Any]) -> dict[str, Any]:
    echo = dict(s)
    echo["input"] = [str(v) for v in s["input"]]
    echo["overlay_color"] = list(s["overlay_color"]) if s["overlay_color"] is not None else None
    return echo


def run_batch(m: RunManifest) -> tuple[dict[str, Any], int]:
    """Process every image, write edge maps and the JSON report.

    Returns the report dict and the exit status.
    """
    started = time.perf_counter()
    m.output_dir.mkdir(parents=True, exist_ok=True)
    items = [_Item(i, p, None) for i, p in enumerate(m.inputs)]
    with ThreadPoolExecutor(max_workers=m.threads) as pool:
        items = list(pool.map(lambda it: _load(it, m.gt_dir), items))
        good = [it for it in items if it.error is None]
        failures = [{"input": str(it.path), "error": it.error} for it in items if it.error is not None]
        for f in failures:
            log.error("skipping %s: %s", f["input"], f["error"])

        report: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "qiedge", "version": __version__},
            "command": m.command,
            "config": _echo(m.settings),
            "images": [],
            "failures": failures,
            "evaluation": None,
            "noise_sweep": None,
            "ablation": None,
        }
        timings: list[dict[str, Any]] = []

        if good:
            variants = list(Variant) if m.command == "ablate" else [m.pipeline.variant]
            ablation = []
            for variant in variants:
                cfg = PipelineConfig(variant, m.pipeline.diffusion, m.pipeline.blur,
                                     m.pipeline.thresholds, m.pipeline.binarize_at)
                out_root = m.output_dir / variant.value if m.command == "ablate" else m.output_dir
                recs, tims, scores = _run_variant(good, cfg, m, pool, out_root)
                report["images"].extend(recs)
                timings.extend(tims)
                sweep = [
                    {"sigma": s, "metric": "ods", "ods": r.ods, "ois": r.ois, "ap": r.ap, "f_measure": r.f_at_ods}
                    for s, r in scores if s is not None and r is not None
                ]
                clean = next((r for s, r in scores if s is None or s == 0), None)
                first = clean or scores[0][1]
                if m.command == "ablate":
                    row = {"variant": variant.value}
                    row.update(first.summary() if first else {})
                    if sweep:
                        row["noise_sweep"] = sweep
                    ablation.append(row)
                else:
                    report["evaluation"] = _eval_json(first) if first else None
                    report["noise_sweep"] = sweep or None
            if m.command == "ablate":
                report["ablation"] = ablation

    report["volatile"] = {
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "total_seconds": time.perf_counter() - started,
        "timings": timings,
    }
    m.report_path.parent.mkdir(parents=True, exist_ok=True)
    with open(m.report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")

    status = EXIT_OK if good and not failures else EXIT_PARTIAL
    return report, status


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(argv)
        if ns.command == "synth":
            pairs = write_suite(ns.output, ns.size)
            log.info("wrote %d scenes to %s", len(pairs), ns.output)
            return EXIT_OK
        manifest = manifest_from_settings(ns.command, resolve_settings(ns))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _, status = run_batch(manifest)
    log.info("report written to %s", manifest.report_path)
    return status


if __name__ == "__main__":
    sys.exit(main())
