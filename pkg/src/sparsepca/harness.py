"""
Experiment runner, matrix CSV I/O and report writers.

A run generates (or loads) data, calibrates each method's sparsity knob to
the known number of nonzero loadings (unless the knob is given), fits the
model and records naive and corrected statistics. Output artifacts depend
only on the configuration, so repeated runs are byte-identical.
"""

import configparser
import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .diagnostics import STATISTICS, StatsReport, corrected_scores, stats_report
from .errors import InvalidInput, MissingData, ParseError, SparsePCAError
from .methods import KNOB, fit_method
from .pca import METHODS, SPARSE_METHODS
from .simulate import (calibrate_sparsity, gen_montecarlo, gen_nonorthogonal_spectra,
                       gen_orthogonal_spectra)

log = logging.getLogger(__name__)

EXPERIMENTS = ("orthogonal", "nonorthogonal", "montecarlo", "file")
SCORE_MODES = ("naive", "corrected")
TRUTH = "Simulated"

# reference values for the non-orthogonal spectra, in table column order
REFERENCE_TABLE1 = {
    "MACS": dict(zip((TRUTH,) + SPARSE_METHODS, (0.43, 0.84, 0.73, 0.66, 0, 0.58, 0.52, 0.52, 0))),
    "MACL": dict(zip((TRUTH,) + SPARSE_METHODS,
                     (0.17, 0.21, 0.05, 0.09, 0.05, 0.07, 0.03, 0.03, 0.03))),
}
REFERENCE_TABLE2 = {
    "TotQR": dict(zip(SPARSE_METHODS, (1.2730, 0.9616, 0.9106, 1.0, 0.9223, 0.9345, 0.9345, 1.0))),
    "TotT": dict(zip(SPARSE_METHODS, (1.7747, 1.0722, 1.0, 1.0, 1.0008, 1.0, 1.0, 1.0))),
    "TotPT": dict(zip(SPARSE_METHODS, (2.5494, 1.1444, 1.0689, 1.0, 1.0457, 1.0435, 1.0435, 1.0))),
    "TotQR*": dict(zip(SPARSE_METHODS, (0.8241, 0.9097, 0.8541, 1.0, 0.8857, 0.8947, 0.8947, 1.0))),
    "TotT*": dict(zip(SPARSE_METHODS, (0.8606, 0.9603, 0.9362, 1.0, 0.9579, 0.9584, 0.9584, 1.0))),
    "TotPT*": dict(zip(SPARSE_METHODS, (1.0,) * 8)),
}
_TABLE_ROWS = {
    "table1": {"MACS": ("macs", "naive"), "MACL": ("macl", "naive")},
    "table2": {"TotQR": ("tot_qr", "naive"), "TotT": ("tot_t", "naive"),
               "TotPT": ("tot_pt", "naive"), "TotQR*": ("tot_qr", "corrected"),
               "TotT*": ("tot_t", "corrected"), "TotPT*": ("tot_pt", "corrected")},
}


@dataclass
class ExperimentConfig:
    """
    Everything a run depends on.

    ``metaparameters`` maps a method tag to a fixed knob value (per-component
    nonzero count for SPCA, ``c2`` for PMD, ``gamma`` for GPCA); methods not
    listed are calibrated against ``target_nnz`` (default: the generator's
    true count). ``A`` defaults to the generator's rank.
    """

    experiment: str = "nonorthogonal"
    methods: tuple = METHODS
    A: Optional[int] = None
    repetitions: int = 1
    seed: int = 0
    score_modes: tuple = SCORE_MODES
    center: bool = False
    output_dir: Optional[str] = None
    metaparameters: dict = field(default_factory=dict)
    data_path: Optional[str] = None
    target_nnz: Optional[int] = None
    workers: int = 1

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidInput(f"unknown experiment {self.experiment!r}")
        if not self.methods:
            raise InvalidInput("methods must not be empty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise InvalidInput(f"unknown methods: {', '.join(bad)}")
        if self.repetitions < 1:
            raise InvalidInput("repetitions must be >= 1")
        bad = [s for s in self.score_modes if s not in SCORE_MODES]
        if bad or not self.score_modes:
            raise InvalidInput(f"score_modes must be drawn from {SCORE_MODES}")
        if self.experiment == "file" and not self.data_path:
            raise InvalidInput("experiment 'file' needs data_path")
        if self.experiment == "file" and self.A is None:
            raise InvalidInput("experiment 'file' needs A")
        if self.experiment == "file" and self.target_nnz is None:
            missing = [m for m in self.methods if KNOB[m] and m not in self.metaparameters]
            if missing:
                raise InvalidInput("experiment 'file' needs target_nnz or metaparameters for "
                                   + ", ".join(missing))
        return self


@dataclass
class RunRecord:
    method: str
    deflation: str
    score_mode: str
    seed: Optional[int]
    stats: Optional[StatsReport]
    nnz: int = 0
    wall_time: float = 0.0
    knob: Optional[str] = None
    knob_value: Optional[float] = None
    status: str = "ok"
    error: Optional[str] = None

    @property
    def ok(self):
        return self.status == "ok"

    def as_dict(self, timing=False):
        d = asdict(self)
        if not timing:
            d.pop("wall_time")
        return d


# -- configuration files ------------------------------------------------------

_CONFIG_KEYS = ("experiment", "methods", "A", "repetitions", "seed", "score_modes", "center",
                "output_dir", "data_path", "target_nnz", "workers")

def _split(value):
    return tuple(v.strip() for v in value.split(",") if v.strip())


def load_config(path):
    """
    Read an `ExperimentConfig` from a key = value file.

    Keys mirror the dataclass fields; lists are comma-separated. Keys of the
    form ``knob.<METHOD>`` fix a method's metaparameter. ``#`` starts a
    comment. Example::

        experiment = montecarlo
        methods = SPCA, PMD-O, GPCA-M
        A = 5
        repetitions = 20
        seed = 1
        knob.PMD-O = 4.2
    """
    text = Path(path).read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from None
    items = dict(parser["experiment"])
    cfg = ExperimentConfig()
    meta = {}
    for key, raw in items.items():
        if not key.startswith("knob.") and key not in _CONFIG_KEYS:
            raise ParseError(f"{path}: unknown key {key!r}")
        try:
            if key.startswith("knob."):
                meta[key[5:]] = float(raw)
            elif key in ("methods", "score_modes"):
                setattr(cfg, key, _split(raw))
            elif key in ("A", "repetitions", "seed", "target_nnz", "workers"):
                setattr(cfg, key, int(raw))
            elif key == "center":
                setattr(cfg, key, raw.strip().lower() in ("1", "true", "yes", "on"))
            else:
                setattr(cfg, key, raw.strip())
        except ValueError as exc:
            raise ParseError(f"{path}: bad value for {key!r}: {exc}") from None
    cfg.metaparameters = meta
    return cfg.validate()


# -- matrix CSV ---------------------------------------------------------------

def save_matrix_csv(X, path, header=None):
    """Write `X` with a header row; values use 17 significant digits so they round-trip exactly."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidInput("only 2-D matrices can be saved")
    header = list(header) if header is not None else [f"v{j + 1}" for j in range(X.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in X:
            w.writerow([format(v, ".17g") for v in row])


def load_matrix_csv(path):
    """
    Read a matrix written by :func:`save_matrix_csv` (or any comma-separated
    file with one header row and decimal points).

    Raises
    ------
    ParseError
        On empty input, ragged rows or non-numeric cells, with a 1-based
        file row/column location.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file", row=1)
    ncol = len(rows[0])
    data = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != ncol:
            raise ParseError(f"{path}: expected {ncol} cells, found {len(row)}", row=i)
        vals = []
        for j, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"{path}: non-numeric cell {cell!r}", row=i, column=j) from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: non-finite cell {cell!r}", row=i, column=j)
            vals.append(v)
        data.append(vals)
    if not data:
        raise ParseError(f"{path}: no data rows", row=2)
    return np.array(data, dtype=float)


# -- running ------------------------------------------------------------------

def _dataset_for(cfg, seed):
    if cfg.experiment == "orthogonal":
        return gen_orthogonal_spectra()
    if cfg.experiment == "nonorthogonal":
        return gen_nonorthogonal_spectra()
    if cfg.experiment == "montecarlo":
        return gen_montecarlo(seed)
    return None


def _seeds(cfg):
    if cfg.experiment == "montecarlo":
        return [cfg.seed + r for r in range(cfg.repetitions)]
    return [cfg.seed]


def _truth_records(ds, seed, cfg):
    X = ds.X - ds.X.mean(axis=0) if cfg.center else ds.X
    rep = stats_report(X, ds.T_true, ds.P_true, "naive")
    return [RunRecord(TRUTH, "none", "naive", seed, rep, nnz=ds.nnz_true)]


def _run_one(cfg, seed):
    ds = _dataset_for(cfg, seed)
    if ds is None:
        X = load_matrix_csv(cfg.data_path)
        A = cfg.A
        target = cfg.target_nnz
        records = []
    else:
        X = ds.X
        A = cfg.A or ds.T_true.shape[1]
        target = cfg.target_nnz if cfg.target_nnz is not None else ds.nnz_true
        records = _truth_records(ds, seed, cfg)
    if cfg.center:
        X = X - X.mean(axis=0)
    for method in cfg.methods:
        start = time.perf_counter()
        knob = KNOB[method]
        value = cfg.metaparameters.get(method)
        try:
            if knob is None or value is not None:
                model = fit_method(method, X, A, value)
            else:
                cal = calibrate_sparsity(method, X, target, A)
                if cal.model is None:
                    raise SparsePCAError(cal.warning)
                model, value = cal.model, cal.value
        except SparsePCAError as exc:
            elapsed = time.perf_counter() - start
            log.warning("%s failed on seed %s: %s", method, seed, exc)
            for mode in cfg.score_modes:
                records.append(RunRecord(method, "none", mode, seed, None, wall_time=elapsed,
                                         knob=knob, knob_value=value, status="failed",
                                         error=f"{type(exc).__name__}: {exc}"))
            continue
        elapsed = time.perf_counter() - start
        for mode in cfg.score_modes:
            T = model.T if mode == "naive" else corrected_scores(X, model.P)
            rep = stats_report(X, T, model.P, mode)
            records.append(RunRecord(method, model.deflation, mode, seed, rep, nnz=model.nnz,
                                     wall_time=elapsed, knob=knob,
                                     knob_value=None if value is None else float(value)))
    return records


def run_experiment(cfg):
    """
    Run every (seed, method) combination of `cfg`.

    Returns records ordered by seed, then method (in ``cfg.methods`` order),
    then score mode; a ``"Simulated"`` record with the generator's true
    scores and loadings leads each seed for generated data. Fitting errors
    are recorded as failed runs and do not stop the sweep.
    """
    cfg.validate()
    seeds = _seeds(cfg)
    if cfg.workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_one, [cfg] * len(seeds), seeds))
    else:
        chunks = [_run_one(cfg, s) for s in seeds]
    return [r for chunk in chunks for r in chunk]


# -- outputs ------------------------------------------------------------------

def _mean_stat(records, method, stat, mode):
    vals = [getattr(r.stats, stat) for r in records
            if r.method == method and r.score_mode == mode and r.ok]
    return float(np.mean(vals)) if vals else None


def table_rows(records, which):
    """
    Reproduction table as a list of rows ``[label, value per column...]``.

    Each statistic gives three rows: our value, the reference value and the
    absolute gap. Values are averaged over seeds when several are present.
    """
    if which not in _TABLE_ROWS:
        raise InvalidInput(f"unknown table {which!r}")
    columns = ((TRUTH,) if which == "table1" else ()) + SPARSE_METHODS
    present = {r.method for r in records if r.ok}
    missing = [c for c in columns if c not in present]
    if missing:
        raise MissingData(missing)
    reference = REFERENCE_TABLE1 if which == "table1" else REFERENCE_TABLE2
    rows = [["statistic"] + list(columns)]
    for label, (stat, mode) in _TABLE_ROWS[which].items():
        ours = [_mean_stat(records, c, stat, "naive" if c == TRUTH else mode) for c in columns]
        ref = [reference[label][c] for c in columns]
        rows.append([label] + [f"{v:.4f}" for v in ours])
        rows.append([f"{label} (reference)"] + [f"{v:.4f}" for v in ref])
        rows.append([f"{label} (gap)"] + [f"{abs(v - r):.4f}" for v, r in zip(ours, ref)])
    return rows


def emit_table(records, which, path):
    """Write :func:`table_rows` as CSV to `path` and return the rows."""
    rows = table_rows(records, which)
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    return rows


def emit_boxplot_data(records, statistic, path):
    """Long-format CSV (seed, method, score_mode, statistic, value), one line per successful run."""
    if statistic not in STATISTICS:
        raise InvalidInput(f"unknown statistic {statistic!r}; expected one of {STATISTICS}")
    n = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "method", "score_mode", "statistic", "value"])
        for r in records:
            if r.ok and r.method != TRUTH:
                w.writerow([r.seed, r.method, r.score_mode, statistic,
                            format(getattr(r.stats, statistic), ".17g")])
                n += 1
    return n


def write_report(records, path, cfg=None, timing=False):
    """
    JSON report with the configuration and every record; failed runs keep their error text.

    The output directory and wall times are left out so identical runs give identical files.
    """
    config = None
    if cfg is not None:
        config = {k: (list(v) if isinstance(v, tuple) else v)
                  for k, v in asdict(cfg).items() if k != "output_dir"}
    doc = {
        "config": config,
        "records": [r.as_dict(timing=timing) for r in records],
        "failed": sum(not r.ok for r in records),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc
