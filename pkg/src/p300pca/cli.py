"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data or numerical error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .classifiers import KINDS, ClassifierSpec
from .data_model import load_dataset, load_recording, save_dataset, save_recording
from .errors import P300Error
from .evaluation import FEATURE_MODES, PipelineConfig, PreprocessConfig, prepare_dataset, run_experiment
from .pca import fit_pca
from .selection import forward_select
from .synthgen import SynthConfig, generate_oddball

log = logging.getLogger("p300pca")

FEATURE_ALIASES = {"raw": "raw", "pca": "pca_explicit", "fs": "pca_fs", "restricted": "pca_restricted_fs"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_preprocess_flags(p):
    g = p.add_argument_group("preprocessing")
    g.add_argument("--bp-low", type=float, default=None, help="bandpass low edge in Hz (default 0.23)")
    g.add_argument("--bp-high", type=float, default=None, help="bandpass high edge in Hz (default 30)")
    g.add_argument("--bp-order", type=int, default=None, help="Butterworth prototype order, even (default 4)")
    g.add_argument("--no-zero-phase", action="store_true", default=None, help="single forward pass instead of forward-backward")
    g.add_argument("--no-bandpass", action="store_true", default=None, help="skip filtering")
    g.add_argument("--normalize", choices=("row", "recording", "none"), default=None,
                   help="z-score each channel-subtrial row (default), each continuous channel, or nothing")
    g.add_argument("--window", type=float, default=None, help="epoch length in seconds (default 1.0)")


def _preprocess_overrides(args):
    out = {}
    for flag, key in (("bp_low", "bp_low"), ("bp_high", "bp_high"), ("bp_order", "bp_order"),
                      ("normalize", "normalize"), ("window", "window_s")):
        v = getattr(args, flag, None)
        if v is not None:
            out[key] = v
    if getattr(args, "no_zero_phase", None):
        out["zero_phase"] = False
    if getattr(args, "no_bandpass", None):
        out["bandpass"] = False
    return out


def _load_input(path, pre: PreprocessConfig):
    path = Path(path)
    if path.suffix == ".npz":
        return load_dataset(path)
    rec, stim = load_recording(path)
    return prepare_dataset(rec, stim, pre)


def build_parser():
    parser = _Parser(prog="p300pca", description="Single-trial P300 classification with PCA, LDA/QDA and neural networks.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic oddball recording (CSV + JSON sidecar)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--name", default="recording", help="file stem (default: recording)")
    p.add_argument("--amplitude", type=float, default=1.0, help="P300 bump amplitude (default 1.0; 0 disables)")
    p.add_argument("--noise-std", type=float, default=1.0, help="background noise std (default 1.0)")
    p.add_argument("--noise", choices=("white", "pink"), default="white", help="default white")
    p.add_argument("--n-target", type=int, default=20, help="target subtrials (default 20)")
    p.add_argument("--n-nontarget", type=int, default=60, help="non-target subtrials (default 60)")
    p.add_argument("--channels", type=int, default=8, help="number of channels (default 8)")
    p.add_argument("--fs", type=float, default=256.0, help="sampling rate in Hz (default 256)")
    p.add_argument("--latency", type=float, default=0.3, help="P300 latency in s (default 0.3)")
    p.add_argument("--width", type=float, default=0.1, help="P300 width (Gaussian std) in s (default 0.1)")
    p.add_argument("--jitter", type=float, default=0.0, help="per-channel latency jitter std in s (default 0)")
    p.add_argument("--isi", type=float, default=1.0, help="inter-stimulus interval in s (default 1.0)")
    p.add_argument("--seed", type=int, default=0, help="default 0")

    p = sub.add_parser("preprocess", help="filter, slice and normalize a recording into a dataset .npz")
    p.add_argument("--input", required=True, help="recording CSV (sidecar JSON alongside)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plot", action="store_true", help="skip the grand-average figure")
    _add_preprocess_flags(p)

    p = sub.add_parser("fit-pca", help="fit principal components on a dataset and write them as JSON")
    p.add_argument("--input", required=True, help="dataset .npz or recording CSV")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--no-plot", action="store_true", help="skip the component figure")
    _add_preprocess_flags(p)

    p = sub.add_parser("select", help="cross-validated forward selection of components")
    p.add_argument("--input", required=True, help="dataset .npz or recording CSV")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--classifier", choices=KINDS, default="lda", help="default lda")
    p.add_argument("--max-pool", type=int, default=50, help="candidate components 0..N-1 (default 50)")
    p.add_argument("--top-n", type=int, default=None, help="restrict the pool to the top-N components")
    p.add_argument("--folds", type=int, default=3, help="cross-validation folds (default 3)")
    p.add_argument("--prefix-mode", action="store_true", help="score prefixes of the pool instead of greedy search")
    p.add_argument("--shared-pca", action="store_true", help="one PCA for all folds instead of per-fold refits")
    p.add_argument("--hidden", type=int, default=None, help="NLR hidden units (default: number of features)")
    p.add_argument("--seed", type=int, default=0, help="default 0")
    _add_preprocess_flags(p)

    p = sub.add_parser("evaluate", help="run the repeated split/train/vote experiment")
    p.add_argument("--input", default=None, help="dataset .npz or recording CSV (or 'input' in the config)")
    p.add_argument("--config", default=None, help="JSON config; command-line flags override it")
    p.add_argument("--out", required=True, help="output directory for report.json and figures")
    p.add_argument("--reps", type=int, default=None, help="repetitions (default 20)")
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--classifier", choices=KINDS, default=None, help="default lda")
    p.add_argument("--features", choices=sorted(set(FEATURE_ALIASES) | set(FEATURE_MODES)), default=None,
                   help="raw (default) | pca (explicit --components) | fs | restricted")
    p.add_argument("--components", type=_int_list, default=None, help="explicit component list, e.g. 2,3,4")
    p.add_argument("--max-pool", type=int, default=None, help="fs candidate pool (default 50)")
    p.add_argument("--top-n", type=int, default=None, help="restricted pool (default 5)")
    p.add_argument("--folds", type=int, default=None, help="selection folds (default 3)")
    p.add_argument("--prefix-mode", action="store_true", default=None, help="score pool prefixes instead of greedy search")
    p.add_argument("--shared-pca", action="store_true", default=None, help="one PCA for all selection folds")
    p.add_argument("--hidden", type=int, default=None, help="NLR hidden units (default: number of features)")
    p.add_argument("--ridge", type=float, default=None, help="covariance ridge (default 0, off)")
    p.add_argument("--balance", choices=("per_repetition", "once", "none"), default=None,
                   help="class balancing (default per_repetition)")
    p.add_argument("--label", default=None, help="report table column (default 'dataset')")
    p.add_argument("--jobs", type=int, default=1, help="repetitions run in parallel (default 1)")
    p.add_argument("--no-plot", action="store_true", help="skip repetitions.png")
    _add_preprocess_flags(p)

    p = sub.add_parser("report", help="methods x datasets table from evaluate reports")
    p.add_argument("reports", nargs="+", help="report.json files")
    p.add_argument("--out", default=None, help="directory for table.csv, table.txt and accuracy.png")
    p.add_argument("--no-plot", action="store_true", help="skip accuracy.png")
    return parser


def _cmd_synth(args):
    cfg = SynthConfig(
        n_channels=args.channels, sampling_rate_hz=args.fs, n_target=args.n_target,
        n_nontarget=args.n_nontarget, p300_amplitude=args.amplitude, p300_latency_s=args.latency,
        p300_width_s=args.width, latency_jitter_s=args.jitter, noise=args.noise,
        noise_std=args.noise_std, isi_s=args.isi, seed=args.seed,
    )
    rec, stim = generate_oddball(cfg)
    path = save_recording(Path(args.out) / f"{args.name}.csv", rec, stim)
    print(path)


def _cmd_preprocess(args):
    pre = PreprocessConfig(**_preprocess_overrides(args))
    rec, stim = load_recording(args.input)
    ds = prepare_dataset(rec, stim, pre)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(out / "dataset.npz", ds)
    if not args.no_plot:
        from .plotting import plot_grand_average

        plot_grand_average(ds, out / "grand_average.png")
    print(out / "dataset.npz")


def _cmd_fit_pca(args):
    ds = _load_input(args.input, PreprocessConfig(**_preprocess_overrides(args)))
    model = fit_pca(ds.X)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    model.save(out)
    if not args.no_plot:
        from .plotting import plot_components

        plot_components(model, out.with_suffix(".png"), sampling_rate_hz=ds.sampling_rate_hz or None)
    print(out)


def _cmd_select(args):
    ds = _load_input(args.input, PreprocessConfig(**_preprocess_overrides(args)))
    spec = ClassifierSpec(args.classifier, args.hidden)
    pool = args.top_n if args.top_n is not None else args.max_pool
    res = forward_select(ds, spec, max_pool=pool, folds=args.folds, seed=args.seed,
                         pca_model=fit_pca(ds.X) if args.shared_pca else None, prefix_mode=args.prefix_mode)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n")
    print(json.dumps({"chosen_indices": res.chosen_indices, "cv_accuracy": res.best_accuracy}))


def _pipeline_from_args(args):
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    input_path = args.input or data.pop("input", None)
    data.pop("input", None)
    if input_path is None:
        raise UsageError("evaluate: no input given (--input or 'input' in the config)")
    if args.config and not args.input and not Path(input_path).is_absolute():
        # relative to the config file
        input_path = str(Path(args.config).parent / input_path)

    pre = dict(data.get("preprocess", {}))
    pre.update(_preprocess_overrides(args))
    data["preprocess"] = pre
    feats = dict(data.get("features", {}))
    if args.features is not None:
        feats["mode"] = FEATURE_ALIASES.get(args.features, args.features)
    for flag, key in (("components", "components"), ("max_pool", "max_pool"), ("top_n", "top_n"),
                      ("folds", "folds"), ("prefix_mode", "prefix_mode"), ("shared_pca", "shared_pca")):
        v = getattr(args, flag)
        if v is not None:
            feats[key] = v
    if args.components is not None and "mode" not in feats:
        feats["mode"] = "pca_explicit"
    data["features"] = feats
    for flag, key in (("reps", "n_repetitions"), ("seed", "seed"), ("classifier", "classifier"),
                      ("hidden", "n_hidden"), ("ridge", "ridge"), ("balance", "balance"), ("label", "label")):
        v = getattr(args, flag)
        if v is not None:
            data[key] = v
    try:
        cfg = PipelineConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"evaluate: invalid configuration: {exc}")
    return cfg, input_path


def _cmd_evaluate(args):
    cfg, input_path = _pipeline_from_args(args)
    ds = _load_input(input_path, cfg.preprocess)
    log.info("evaluating %s / %s on %d subtrials", cfg.classifier, cfg.features.mode, len(ds.groups()[0]))
    rep = run_experiment(ds, cfg, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rep.save(out / "report.json")
    if not args.no_plot:
        from .plotting import plot_repetitions

        plot_repetitions(rep.accuracies, out / "repetitions.png", f"{cfg.classifier.upper()} / {cfg.features.mode}")
    for name, count in sorted(rep.error_tally.items()):
        print(f"warning: {name} in {count}/{cfg.n_repetitions} repetitions", file=sys.stderr)
    mean = rep.mean_accuracy
    print(json.dumps({"report": str(out / "report.json"), "mean_accuracy": mean}))


def _cmd_report(args):
    from .report import report

    sys.stdout.write(report(args.reports, args.out, figures=not args.no_plot))


COMMANDS = {
    "synth": _cmd_synth,
    "preprocess": _cmd_preprocess,
    "fit-pca": _cmd_fit_pca,
    "select": _cmd_select,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (P300Error, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
