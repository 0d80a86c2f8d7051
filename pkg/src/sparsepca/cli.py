"""Command-line entry point. See ``docs/manual.md`` for the full flag reference."""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path


from . import harness
from .diagnostics import model_reports
from .errors import ParseError, SparsePCAError
from .methods import KNOB, fit_method
from .pca import METHODS
from .simulate import gen_montecarlo, gen_nonorthogonal_spectra, gen_orthogonal_spectra

MONTECARLO_REPETITIONS = 100


def _methods(value):
    out = tuple(m.strip() for m in value.split(",") if m.strip())
    bad = [m for m in out if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="sparsepca",
                                description="Sparse PCA fitting and simulation harness.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="write a generated data set as CSV matrices")
    s.add_argument("kind", choices=("orthogonal", "nonorthogonal", "montecarlo"))
    s.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    s.add_argument("-o", "--output-dir", default=".")

    f = sub.add_parser("fit", help="fit one method to a CSV matrix")
    f.add_argument("data")
    f.add_argument("--method", required=True, choices=METHODS)
    f.add_argument("-A", "--components", type=int, required=True)
    f.add_argument("--knob", type=float, help="metaparameter (nnz per component, c2 or gamma)")
    f.add_argument("--center", action="store_true")
    f.add_argument("-o", "--output-dir", default=".")

    st = sub.add_parser("stats", help="naive or corrected statistics for given scores and loadings")
    st.add_argument("data")
    st.add_argument("--loadings", required=True)
    st.add_argument("--scores", help="per-component scores; omit to use corrected scores only")
    st.add_argument("--json", dest="json_out", help="write the report here instead of stdout")

    r = sub.add_parser("reproduce", help="reproduce a table or the Monte Carlo study")
    r.add_argument("target", choices=("table1", "table2", "montecarlo"))
    r.add_argument("--config", help="key = value experiment file")
    r.add_argument("--repetitions", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--methods", type=_methods)
    r.add_argument("--workers", type=int)
    r.add_argument("-o", "--output-dir")
    return p


def _cmd_simulate(args):
    gen = {"orthogonal": gen_orthogonal_spectra, "nonorthogonal": gen_nonorthogonal_spectra}
    ds = gen_montecarlo(args.seed) if args.kind == "montecarlo" else gen[args.kind]()
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    harness.save_matrix_csv(ds.X, out / "X.csv")
    harness.save_matrix_csv(ds.T_true, out / "T_true.csv")
    harness.save_matrix_csv(ds.P_true, out / "P_true.csv")
    print(f"wrote {ds.X.shape[0]}x{ds.X.shape[1]} data with {ds.nnz_true} nonzero loadings to {out}")


def _cmd_fit(args):
    X = harness.load_matrix_csv(args.data)
    if args.center:
        X = X - X.mean(axis=0)
    model = fit_method(args.method, X, args.components, args.knob)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    harness.save_matrix_csv(model.T, out / "T.csv")
    harness.save_matrix_csv(model.P, out / "P.csv")
    naive, corrected = model_reports(X, model)
    doc = {"method": model.method, "deflation": model.deflation, "nnz": model.nnz,
           "knob": KNOB[args.method], "params": model.params,
           "naive": naive.as_dict(), "corrected": corrected.as_dict()}
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True, default=float) + "\n")
    print(json.dumps({"naive": naive.as_dict(), "corrected": corrected.as_dict()}, indent=2))


def _cmd_stats(args):
    from .diagnostics import corrected_scores, stats_report
    X = harness.load_matrix_csv(args.data)
    P = harness.load_matrix_csv(args.loadings)
    if P.shape[0] != X.shape[1]:
        raise ParseError(f"{args.loadings}: loadings have {P.shape[0]} rows, data has "
                         f"{X.shape[1]} columns")
    doc = {"corrected": stats_report(X, corrected_scores(X, P), P, "corrected").as_dict()}
    if args.scores:
        T = harness.load_matrix_csv(args.scores)
        doc["naive"] = stats_report(X, T, P, "naive").as_dict()
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.json_out:
        Path(args.json_out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_reproduce(args):
    cfg = harness.load_config(args.config) if args.config else None
    if cfg is None:
        if args.target == "montecarlo":
            cfg = harness.ExperimentConfig(experiment="montecarlo",
                                           repetitions=MONTECARLO_REPETITIONS, seed=1)
        else:
            cfg = harness.ExperimentConfig(experiment="nonorthogonal")
    overrides = {k: v for k, v in (("repetitions", args.repetitions), ("seed", args.seed),
                                    ("methods", args.methods), ("workers", args.workers),
                                    ("output_dir", args.output_dir)) if v is not None}
    cfg = replace(cfg, **overrides).validate()
    out = Path(cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    records = harness.run_experiment(cfg)
    harness.write_report(records, out / f"{args.target}_report.json", cfg)
    if args.target == "montecarlo":
        for stat in ("macs", "macl", "rss", "tot_qr", "tot_t", "tot_pt"):
            harness.emit_boxplot_data(records, stat, out / f"boxplot_{stat}.csv")
        failed = sum(not r.ok for r in records)
        print(f"{len(records)} records ({failed} failed) written to {out}")
    else:
        rows = harness.emit_table(records, args.target, out / f"{args.target}.csv")
        for row in rows:
            print(",".join(row))


COMMANDS = {"simulate": _cmd_simulate, "fit": _cmd_fit, "stats": _cmd_stats,
            "reproduce": _cmd_reproduce}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (SparsePCAError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
