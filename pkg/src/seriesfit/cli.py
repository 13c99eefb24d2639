"""Batch command-line front end.

Two subcommands drive the library from flat INI-style config files::

    seriesfit optimise config.ini --out results/
    seriesfit sample   config.ini --out results/ --chains 3

Both write machine-readable outputs for external plotting: a structured
``result.json``/``summary.json``, CSV iteration logs, and (for sampling)
one CSV file per chain or a weighted-sample CSV for nested methods.
Numbers are serialised with 17 significant digits so 64-bit floats
round-trip exactly. Exit codes: 0 success, 2 configuration error,
3 evaluation failure (no finite score found, or a nested run hit its
rejection cap).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime
import math
import shlex
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import EvaluationError, ForwardModel, RandomSource, TimeSeriesProblem
from .densities import (
    GaussianLogLikelihood,
    GaussianLogLikelihoodUnknownSigma,
    LogPDF,
    LogPosterior,
    UniformLogPrior,
)
from .diagnostics import effective_sample_size, rhat
from .measures import MeanSquaredError, RootMeanSquaredError, SumOfSquaresError
from .optimisers import OPTIMISER_METHODS, StoppingCriteria, run_optimisation
from .samplers import (
    MCMC_METHODS,
    NESTED_METHODS,
    NestedSamplingError,
    run_mcmc,
    run_nested,
)
from .toys import BimodalTarget, ConstantModel, GaussianTarget, LogisticModel, TwistedGaussianTarget

__all__ = [
    "ConfigError",
    "ExternalModel",
    "main",
    "read_timeseries_csv",
    "write_json",
]


class ConfigError(Exception):
    """Invalid or missing configuration; maps to exit code 2."""


class ParseError(ConfigError):
    """Malformed data file; carries the offending line number."""


# ---------------------------------------------------------------------------
# data files

def read_timeseries_csv(path):
    """Read a time-series CSV into (times, observations).

    Format: UTF-8, comma-separated, decimal point '.', LF or CRLF line
    endings. A header row is required; the first column must be named
    ``time`` and the remaining columns are model outputs in order. Times
    must be finite and strictly increasing; NaN/infinite tokens and ragged
    rows are rejected with the offending line number.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"data file not found: {path}")
    times = []
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: file is empty, expected a header row")
        if len(header) < 2 or header[0].strip() != "time":
            raise ParseError(
                f"{path}: line 1: header must be 'time' followed by at least "
                f"one output column")
        width = len(header)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ParseError(
                    f"{path}: line {line_no}: expected {width} fields, got {len(row)}")
            try:
                values = [float(tok) for tok in row]
            except ValueError:
                raise ParseError(
                    f"{path}: line {line_no}: could not parse a number") from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError(
                    f"{path}: line {line_no}: non-finite value")
            if times and values[0] <= times[-1]:
                raise ParseError(
                    f"{path}: line {line_no}: times must be strictly increasing")
            times.append(values[0])
            rows.append(values[1:])
    if not times:
        raise ParseError(f"{path}: no data rows")
    return np.array(times), np.array(rows)


def _format_number(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return f"{v:.17g}"


def _dump_json(obj, indent):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return _format_number(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {_dump_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj):
    """Write ``obj`` as JSON with floats at 17 significant digits."""
    Path(path).write_text(_dump_json(obj, 0) + "\n", encoding="utf-8")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_format_number(v) for v in row) + "\n")


def read_matrix_csv(path):
    """Read a CSV written by :func:`_write_csv` back into (header, matrix)."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(tok) for tok in row] for row in reader if row]
    return header, np.array(rows)


# ---------------------------------------------------------------------------
# external models (subprocess contract)

class ExternalModel(ForwardModel):
    """Forward model implemented by an external command.

    Per simulation the command is started once, receives the parameters on
    stdin (one decimal number per line) and must print one CSV row of
    outputs per time point to stdout, in time order. The command itself is
    responsible for evaluating at the same time points as the data file.
    A non-zero exit status or malformed output raises
    :class:`~seriesfit.core.EvaluationError`.
    """

    def __init__(self, command, n_parameters, n_outputs=1, timeout=60.0):
        super().__init__(n_parameters, n_outputs)
        self._argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self._argv:
            raise ValueError("external model command is empty")
        self._timeout = float(timeout)

    @property
    def command(self):
        return list(self._argv)

    def simulate(self, parameters, times):
        stdin = "".join(f"{p:.17g}\n" for p in parameters)
        try:
            proc = subprocess.run(
                self._argv, input=stdin, capture_output=True, text=True,
                timeout=self._timeout)
        except (OSError, subprocess.TimeoutExpired) as e:
            raise EvaluationError(f"external model failed to run: {e}",
                                  parameters=parameters) from e
        if proc.returncode != 0:
            raise EvaluationError(
                f"external model exited with status {proc.returncode}: "
                f"{proc.stderr.strip()[:200]}", parameters=parameters)
        rows = [line for line in proc.stdout.splitlines() if line.strip()]
        if len(rows) != len(times):
            raise EvaluationError(
                f"external model printed {len(rows)} rows for {len(times)} "
                f"time points", parameters=parameters)
        try:
            values = [[float(tok) for tok in line.split(",")] for line in rows]
        except ValueError as e:
            raise EvaluationError(f"external model output is not numeric: {e}",
                                  parameters=parameters) from e
        out = np.array(values, dtype=float)
        if out.shape[1] != self.n_outputs:
            raise EvaluationError(
                f"external model printed {out.shape[1]} columns for "
                f"{self.n_outputs} outputs", parameters=parameters)
        return out


# ---------------------------------------------------------------------------
# config handling

def _load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cfg.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"could not parse config {path}: {e}") from e
    return cfg


def _parse_vector(text, name):
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError:
        raise ConfigError(f"could not parse {name!r} as a comma-separated "
                          f"list of numbers: {text!r}") from None


def _get(cfg, section, key, default=None):
    if cfg.has_option(section, key):
        return cfg.get(section, key).strip()
    return default


def _get_vector(cfg, section, key, default=None):
    raw = _get(cfg, section, key)
    if raw is None:
        return default
    return _parse_vector(raw, key)


def _get_float(cfg, section, key, default=None):
    raw = _get(cfg, section, key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} must be a number, got {raw!r}") from None


def _get_int(cfg, section, key, default=None):
    raw = _get(cfg, section, key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} must be an integer, got {raw!r}") from None


def _build_model(cfg):
    name = _get(cfg, "problem", "model")
    if name is None:
        raise ConfigError("[problem] model is required for time-series problems")
    name = name.lower()
    if name == "logistic":
        return LogisticModel(y0=_get_float(cfg, "problem", "y0", 1.0))
    if name == "constant":
        return ConstantModel(n_outputs=_get_int(cfg, "problem", "outputs", 1))
    if name == "external":
        command = _get(cfg, "problem", "command")
        n_parameters = _get_int(cfg, "problem", "n_parameters")
        if command is None or n_parameters is None:
            raise ConfigError(
                "[problem] external models need 'command' and 'n_parameters'")
        return ExternalModel(command, n_parameters,
                             n_outputs=_get_int(cfg, "problem", "outputs", 1))
    raise ConfigError(f"unknown model {name!r} (logistic, constant or external)")


def _build_target(cfg):
    name = (_get(cfg, "problem", "target") or "").lower()
    if name == "gaussian":
        mean = _get_vector(cfg, "problem", "mean")
        sigma = _get_vector(cfg, "problem", "sigma")
        if mean is None or sigma is None:
            raise ConfigError("[problem] gaussian targets need 'mean' and 'sigma'")
        if sigma.shape == (1,) and mean.shape[0] > 1:
            sigma = np.repeat(sigma, mean.shape[0])
        return GaussianTarget(mean, np.diag(sigma ** 2))
    if name == "banana":
        return TwistedGaussianTarget(b=_get_float(cfg, "problem", "b", 0.1))
    if name == "bimodal":
        weights = _get_vector(cfg, "problem", "weights", np.array([0.5, 0.5]))
        return BimodalTarget(separation=_get_float(cfg, "problem", "separation", 5.0),
                             weights=weights)
    raise ConfigError(f"unknown target {name!r} (gaussian, banana or bimodal)")


def _build_prior(cfg):
    lower = _get_vector(cfg, "problem", "prior_lower")
    upper = _get_vector(cfg, "problem", "prior_upper")
    if lower is None and upper is None:
        return None
    if lower is None or upper is None:
        raise ConfigError("[problem] prior needs both prior_lower and prior_upper")
    try:
        return UniformLogPrior(lower, upper)
    except ValueError as e:
        raise ConfigError(f"invalid prior bounds: {e}") from e


def _build_objective(cfg, base_dir):
    """Return (objective, prior). The objective is a measure or a LogPDF."""
    kind = (_get(cfg, "problem", "kind") or
            ("target" if _get(cfg, "problem", "target") else "timeseries")).lower()
    prior = _build_prior(cfg)
    if kind == "target":
        return _build_target(cfg), prior
    if kind != "timeseries":
        raise ConfigError(f"unknown problem kind {kind!r}")

    model = _build_model(cfg)
    data = _get(cfg, "problem", "data")
    if data is None:
        raise ConfigError("[problem] data file is required")
    data_path = Path(data)
    if not data_path.is_absolute():
        data_path = Path(base_dir) / data_path
    times, observations = read_timeseries_csv(data_path)
    try:
        problem = TimeSeriesProblem(model, times, observations)
    except ValueError as e:
        raise ConfigError(f"invalid problem: {e}") from e

    objective = (_get(cfg, "problem", "objective") or "sse").lower()
    if objective == "sse":
        return SumOfSquaresError(problem), prior
    if objective == "mse":
        return MeanSquaredError(problem), prior
    if objective == "rmse":
        return RootMeanSquaredError(problem), prior
    if objective == "gaussian":
        sigma = _get_vector(cfg, "problem", "sigma")
        if sigma is None:
            raise ConfigError("[problem] objective 'gaussian' needs 'sigma'")
        return GaussianLogLikelihood(problem, sigma), prior
    if objective in ("gaussian-unknown-sigma", "gaussian_unknown_sigma"):
        return GaussianLogLikelihoodUnknownSigma(problem), prior
    raise ConfigError(f"unknown objective {objective!r}")


def _method_options(cfg, method_name):
    opts = {}
    if method_name in OPTIMISER_METHODS:
        population = _get_int(cfg, "method", "population")
        if population is not None:
            opts["population_size"] = population
    if method_name == "adaptive":
        warmup = _get_int(cfg, "method", "warmup")
        if warmup is not None:
            opts["warmup"] = warmup
    if method_name == "population":
        temperatures = _get_int(cfg, "method", "temperatures")
        if temperatures is not None:
            opts["n_temperatures"] = temperatures
    if method_name in NESTED_METHODS:
        enlargement = _get_float(cfg, "method", "enlargement")
        if enlargement is not None:
            opts["enlargement"] = enlargement
        first = _get_int(cfg, "method", "first_phase")
        if first is not None:
            opts["first_phase_iterations"] = first
        refit = _get_int(cfg, "method", "refit_interval")
        if refit is not None:
            opts["refit_interval"] = refit
        cap = _get_int(cfg, "method", "max_draws")
        if cap is not None:
            opts["max_rejection_draws"] = cap
    return opts


def _base_report(command, method, seed, hyperparameters):
    return {
        "tool": "seriesfit",
        "tool_version": __version__,
        "command": command,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "seed": seed,
        "method": method,
        "generator": RandomSource.ALGORITHM,
        "hyperparameters": hyperparameters,
    }


def _x0_sigma0(cfg, prior, n_required=None):
    x0 = _get_vector(cfg, "method", "x0")
    if x0 is None:
        if prior is not None:
            x0 = 0.5 * (prior.lower + prior.upper)
        else:
            raise ConfigError("[method] x0 is required (no prior to infer it from)")
    sigma0 = _get_vector(cfg, "method", "sigma0", np.array([0.1]))
    if sigma0.shape == (1,) and x0.shape[0] > 1:
        sigma0 = np.repeat(sigma0, x0.shape[0])
    if n_required is not None and x0.shape[0] != n_required:
        raise ConfigError(
            f"[method] x0 has {x0.shape[0]} entries but the objective has "
            f"{n_required} parameters")
    return x0, sigma0


# ---------------------------------------------------------------------------
# subcommands

def _cmd_optimise(args):
    cfg = _load_config(args.config)
    base_dir = Path(args.config).resolve().parent
    objective, prior = _build_objective(cfg, base_dir)
    x0, sigma0 = _x0_sigma0(cfg, prior, n_required=objective.n_parameters)

    method = (args.method or _get(cfg, "method", "name") or "cmaes").lower()
    if method not in OPTIMISER_METHODS:
        raise ConfigError(
            f"unknown optimiser {method!r}; choose from {sorted(OPTIMISER_METHODS)}")
    iterations = args.iterations if args.iterations is not None \
        else _get_int(cfg, "run", "iterations", 1000)
    seed = args.seed if args.seed is not None else _get_int(cfg, "run", "seed", 0)
    workers = args.workers if args.workers is not None \
        else _get_int(cfg, "run", "workers", 1)
    try:
        criteria = StoppingCriteria(
            max_iterations=iterations,
            max_unchanged_iterations=_get_int(cfg, "run", "max_unchanged"),
            unchanged_threshold=_get_float(cfg, "run", "unchanged_threshold", 1e-11),
            target_score=_get_float(cfg, "run", "target_score"))
    except ValueError as e:
        raise ConfigError(str(e)) from e

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sink_records = []
    every = max(1, iterations // 10) if iterations else 1

    def sink(record):
        sink_records.append(record)
        if not args.quiet and record[0] % every == 0:
            print(f"iter {record[0]:>8}  evals {record[1]:>10}  "
                  f"best {record[2]:.8g}")

    result = run_optimisation(
        objective, x0, sigma0, method=method, criteria=criteria,
        workers=workers, sink=sink, seed=seed,
        method_options=_method_options(cfg, method))

    report = _base_report("optimise", result.method, result.seed,
                          result.metadata["hyperparameters"])
    report.update({
        "best_parameters": result.best_parameters.tolist(),
        "best_score": result.best_score,
        "maximising": result.maximising,
        "stop_reason": result.stop_reason,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "sigma0": result.metadata["sigma0"],
        "workers": workers,
    })
    if result.maximising:
        report["best_log_pdf"] = result.best_target_value
    write_json(out / "result.json", report)
    _write_csv(out / "log.csv",
               ["iteration", "evaluations", "best_score", "seconds"],
               sink_records)
    if not args.quiet:
        print(f"best score {result.best_score:.8g} after {result.iterations} "
              f"iterations ({result.stop_reason}); results in {out}")
    return 3 if math.isinf(result.best_score) and result.best_score > 0 else 0


def _sample_mcmc(args, cfg, objective, prior, method, out):
    if not isinstance(objective, LogPDF):
        raise ConfigError(
            "sampling needs a log-density objective (gaussian, "
            "gaussian-unknown-sigma or a target), not an error measure")
    density = objective
    if prior is not None:
        try:
            density = LogPosterior(objective, prior)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    x0, sigma0 = _x0_sigma0(cfg, prior, n_required=density.n_parameters)
    iterations = args.iterations if args.iterations is not None \
        else _get_int(cfg, "run", "iterations", 1000)
    n_chains = args.chains if args.chains is not None \
        else _get_int(cfg, "run", "chains", 3)
    seed = args.seed if args.seed is not None else _get_int(cfg, "run", "seed", 0)
    workers = args.workers if args.workers is not None \
        else _get_int(cfg, "run", "workers", 1)

    sink_records = []
    result = run_mcmc(
        density, n_chains, x0, method=method, iterations=iterations,
        sigma0=sigma0, workers=workers, sink=sink_records.append, seed=seed,
        log_prior=prior, method_options=_method_options(cfg, method))

    n = result.chains.shape[2]
    header = [f"p{j}" for j in range(n)]
    for j in range(result.n_chains):
        _write_csv(out / f"chain_{j}.csv", header, result.chains[j])

    sampled = result.chains[:, 1:, :]
    if result.n_chains >= 2 and iterations >= 2:
        rhat_values = rhat(sampled).tolist()
    else:
        rhat_values = None
    if iterations >= 10:
        ess_values = np.sum(
            [effective_sample_size(sampled[j]) for j in range(result.n_chains)],
            axis=0).tolist()
    else:
        ess_values = None

    report = _base_report("sample", result.method, result.seed,
                          result.metadata["hyperparameters"])
    report.update({
        "chains": result.n_chains,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "acceptance_rates": result.acceptance_rates,
        "rhat": rhat_values,
        "ess": ess_values,
        "chain_seeds": result.metadata["chain_seeds"],
        "workers": workers,
    })
    write_json(out / "summary.json", report)
    rate_header = [f"acceptance_rate_{j}" for j in range(result.n_chains)]
    _write_csv(out / "log.csv", ["iteration", "evaluations"] + rate_header,
               [(r[0], r[1], *r[2]) for r in sink_records])
    if not args.quiet:
        shown = "n/a (needs >= 2 chains)" if rhat_values is None else \
            ", ".join(f"{v:.4f}" for v in rhat_values)
        print(f"{result.n_chains} chains x {iterations} iterations; "
              f"R-hat: {shown}; results in {out}")
    return 0


def _sample_nested(args, cfg, objective, prior, method, out):
    if not isinstance(objective, LogPDF):
        raise ConfigError("nested sampling needs a log-likelihood objective")
    if prior is None:
        raise ConfigError(
            "nested sampling needs a prior ([problem] prior_lower/prior_upper)")
    seed = args.seed if args.seed is not None else _get_int(cfg, "run", "seed", 0)
    n_live = _get_int(cfg, "method", "live_points", 400)
    max_iterations = args.iterations if args.iterations is not None \
        else _get_int(cfg, "run", "iterations", 100000)

    sink_records = []
    result = run_nested(
        objective, prior, method=method, n_live=n_live, seed=seed,
        sink=sink_records.append, max_iterations=max_iterations,
        method_options=_method_options(cfg, method))

    n = result.samples.shape[1]
    header = [f"p{j}" for j in range(n)] + ["log_likelihood", "log_weight"]
    rows = np.column_stack(
        [result.samples, result.log_likelihoods, result.log_weights])
    _write_csv(out / "samples.csv", header, rows)

    report = _base_report("sample", result.method, result.seed,
                          result.metadata["hyperparameters"])
    report.update({
        "log_evidence": result.log_evidence,
        "log_evidence_se": result.log_evidence_se,
        "information": result.information,
        "iterations": result.iterations,
        "evaluations": result.n_evaluations,
        "live_points": result.n_live,
        "stop_reason": result.stop_reason,
    })
    write_json(out / "summary.json", report)
    _write_csv(out / "log.csv", ["iteration", "evaluations", "log_evidence"],
               sink_records)
    if not args.quiet:
        print(f"log evidence {result.log_evidence:.4f} +/- "
              f"{result.log_evidence_se:.4f} after {result.iterations} "
              f"iterations; results in {out}")
    return 0


def _cmd_sample(args):
    cfg = _load_config(args.config)
    base_dir = Path(args.config).resolve().parent
    objective, prior = _build_objective(cfg, base_dir)

    method = (args.method or _get(cfg, "method", "name") or "adaptive").lower()
    if method in ("rejection", "ellipsoid"):
        method = f"nested-{method}"
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if method in MCMC_METHODS:
        return _sample_mcmc(args, cfg, objective, prior, method, out)
    if method in NESTED_METHODS:
        return _sample_nested(args, cfg, objective, prior, method, out)
    raise ConfigError(
        f"unknown sampling method {method!r}; choose from "
        f"{sorted(MCMC_METHODS) + sorted(NESTED_METHODS)}")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="seriesfit",
        description="Optimise or sample time-series model parameters from "
                    "a config file.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, handler in (("optimise", _cmd_optimise), ("sample", _cmd_sample)):
        p = sub.add_parser(name)
        p.add_argument("config", help="path to an INI-style config file")
        p.add_argument("--method", help="override the configured method")
        p.add_argument("--iterations", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--quiet", action="store_true")
        if name == "sample":
            p.add_argument("--chains", type=int, default=None)
        p.set_defaults(handler=handler)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NestedSamplingError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
