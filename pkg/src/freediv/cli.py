#  -*- coding: utf-8 -*-

"""
    This script is the command line of freediv. It offers four commands, reading their instructions from a JSON or
    TOML configuration file (scalars of which may be overridden by flags):
        - 'convolve' convolves two distributions and cross-checks the Cauchy transform of the result, computed from
          the summed cumulants, against the subordination iteration;
        - 'steinitz' rearranges (or selects a subset of) the vectors read in a CSV file;
        - 'hinchin' runs the divisibility experiment on a triangular array;
        - 'check' runs the numerical checkers on a distribution.
    Exit codes: 0 when the command succeeded, 2 for an invalid configuration, 3 for a numerical failure.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import os
import sys
import time
import argparse

import numpy as np
import pandas as pd

from freediv import parameters as param
from freediv.balgebra import NumericalFailure, ProbePoint, op_norm
from freediv.dist import (CumulantSequence, TruncatedMoments, RealizedModel, point_mass, semicircular, kraus_map,
                          free_convolve, convolution_power, moments_from_cumulants, moments_from_realized,
                          cumulants_from_moments, random_realized_model, distribution_from_json, exp_bound_check,
                          cumulant_bound_check, check_expectation_properties)
from freediv.transforms import CauchyProvider, subordination_convolve, voiculescu_negativity_check
from freediv.steinitz import read_vectors_csv, rearrange_zero_sum, subset_select
from freediv.hinchin import (build_probes, build_array_from_id, infinitesimality_check, run_hinchin,
                             verify_level_two, check_tracial_conditions, check_complete_positivity)
from freediv.tool import tools


class ConfigError(Exception):
    """Raised when a configuration is invalid (mapped to exit code 2)."""
    pass


########################################################################################################################
# READING THE CONFIGURATION
########################################################################################################################

def _require(config, key):
    if key not in config:
        raise ConfigError("The configuration misses the field '%s'." % key)
    return config[key]


def _number(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError("The field '%s' must be a number, got %r." % (name, value))


def _integer(value, name, minimum=1):
    number = _number(value, name)
    if not number.is_integer() or number < minimum:
        raise ConfigError("The field '%s' must be an integer of at least %d, got %r." % (name, minimum, value))
    return int(number)


def _optional_integer(config, name, default=None, minimum=1):
    value = config.get(name, default)
    return None if value is None else _integer(value, name, minimum)


def _positive(value, name):
    value = _number(value, name)
    if not value > 0.:
        raise ConfigError("The field '%s' must be positive, got %s." % (name, value))
    return value


def _as_cumulants(distribution, order):
    if isinstance(distribution, CumulantSequence):
        return distribution
    if isinstance(distribution, TruncatedMoments):
        return cumulants_from_moments(distribution)
    return cumulants_from_moments(moments_from_realized(distribution, order))


def _as_moments(distribution, order):
    if isinstance(distribution, TruncatedMoments):
        return distribution
    if isinstance(distribution, CumulantSequence):
        return moments_from_cumulants(distribution)
    return moments_from_realized(distribution, order)


def build_distribution(description, dim, order, base_dir="."):
    """
    This function builds a distribution from its description in a configuration:
        - {"type": "semicircular", "variance": s} (eta = s id), or with "eta" (a d^2 x d^2 matrix) or "kraus" (a list
          of Kraus operators);
        - {"type": "point_mass", "b": matrix};
        - {"type": "realized", "matrix": matrix, "multiplicity": N}, or {"type": "realized", "multiplicity": N,
          "scale": M, "seed": s} for a random model;
        - {"type": "file", "path": path} for a distribution written in JSON;
        - {"type": "sum", "terms": [...]} for the free convolution of several distributions;
        - {"type": "power", "of": {...}, "t": t} for a convolution power.
    :param description: the dictionary describing the distribution
    :param dim: the size d of B
    :param order: the truncation order
    :param base_dir: the directory against which relative file paths are resolved
    :return: a CumulantSequence, a TruncatedMoments or a RealizedModel
    """
    if not isinstance(description, dict):
        raise ConfigError("A distribution must be described by a dictionary, got %r." % (description,))
    kind = _require(description, "type")
    try:
        if kind == "semicircular":
            if "eta" in description:
                eta = tools.read_matrix(description["eta"], dim * dim)
            elif "kraus" in description:
                eta = kraus_map([tools.read_matrix(K, dim) for K in description["kraus"]])
            else:
                eta = float(description.get("variance", 1.)) * np.eye(dim * dim)
            return semicircular(eta, order=order)
        if kind == "point_mass":
            return point_mass(tools.read_matrix(_require(description, "b"), dim), order=order)
        if kind == "realized":
            multiplicity = int(_require(description, "multiplicity"))
            if "matrix" in description:
                return RealizedModel(tools.read_matrix(description["matrix"], dim * multiplicity), dim, multiplicity)
            return random_realized_model(dim, multiplicity, seed=description.get("seed"),
                                         scale=float(description.get("scale", 1.)))
        if kind == "file":
            path = os.path.join(base_dir, _require(description, "path"))
            distribution = distribution_from_json(tools.read_config(path))
            if distribution.dim != dim:
                raise ConfigError("The distribution of '%s' is defined over M_%d(C), not M_%d(C)."
                                  % (path, distribution.dim, dim))
            return distribution
        if kind == "sum":
            terms = [_as_cumulants(build_distribution(term, dim, order, base_dir), order)
                     for term in _require(description, "terms")]
            if len(terms) == 0:
                raise ConfigError("A sum needs at least one term.")
            result = terms[0]
            for term in terms[1:]:
                result = free_convolve(result, term)
            return result
        if kind == "power":
            base = _as_cumulants(build_distribution(_require(description, "of"), dim, order, base_dir), order)
            return convolution_power(base, _positive(_require(description, "t"), "t"))
    except (ValueError, TypeError, KeyError, OSError) as error:
        raise ConfigError("The distribution %r could not be built: %s" % (description, error))
    raise ConfigError("Unknown distribution type '%s'." % kind)


def read_probes(values, dim):
    """Reads a list of points: a number s stands for i s I, anything else is read as a matrix."""
    probes = []
    for value in values:
        try:
            if np.isscalar(value):
                matrix = 1j * float(value) * np.eye(dim)
            else:
                matrix = tools.read_matrix(value, dim)
            probes.append(ProbePoint(matrix))
        except (ValueError, TypeError) as error:
            raise ConfigError("The probe %r is not valid: %s" % (value, error))
    return probes


def _load_config(args):
    config = {}
    if args.config is not None:
        try:
            config = tools.read_config(args.config)
        except (OSError, ValueError) as error:
            raise ConfigError("The configuration '%s' could not be read: %s" % (args.config, error))
    # Flags override the scalars of the configuration:
    for key in ["seed", "jobs", "tol"]:
        value = getattr(args, key)
        if value is not None:
            config[key] = value
    if "tol" in config:
        config["tol"] = _positive(config["tol"], "tol")
    if "jobs" in config:
        config["jobs"] = _integer(config["jobs"], "jobs")
    # The block 'parameters' updates the default values of parameters.py, as scenario files do:
    overrides = config.get("parameters", {})
    unknown = [key for key in overrides if not hasattr(param, key)]
    if unknown:
        raise ConfigError("Unknown parameters: %s." % ", ".join(sorted(unknown)))
    param.__dict__.update(overrides)
    config["base_dir"] = os.path.dirname(os.path.abspath(args.config)) if args.config else os.getcwd()
    return config


def _dimensions(config):
    return _integer(config.get("dim", param.dim), "dim"), _integer(config.get("order", param.N_max), "order")


########################################################################################################################
# COMMANDS
########################################################################################################################

def cmd_convolve(config, out_dir, printing_warnings=False):
    """
    Convolves the distributions 'first' and 'second' of the configuration, writes the result in 'convolved.json', and
    writes in 'crosscheck.csv', for each probe, the difference between the Cauchy transform of the result and the one
    obtained by subordination, with its budget.
    """
    dim, order = _dimensions(config)
    tol = config.get("tol", param.fixed_point_tol)
    tail_order = _optional_integer(config, "tail_order")
    base_dir = config["base_dir"]
    first = build_distribution(_require(config, "first"), dim, order, base_dir)
    second = build_distribution(_require(config, "second"), dim, order, base_dir)
    convolved = free_convolve(_as_cumulants(first, order), _as_cumulants(second, order))
    tools.write_json(convolved.to_json(), os.path.join(out_dir, "convolved.json"))

    probes = read_probes(config.get("probes", [8.]), dim)
    summed = CauchyProvider(convolved, tail_order=tail_order)
    first_provider = CauchyProvider(first, tail_order=tail_order)
    second_provider = CauchyProvider(second, tail_order=tail_order)
    lines = []
    for probe_id, probe in enumerate(probes):
        g_cumulants = summed(probe)
        tail = summed.last_tail_bound
        g_subordination, info = subordination_convolve(first_provider, second_provider, probe, tol=tol,
                                                       full_output=True)
        budget = tail + first_provider.last_tail_bound + second_provider.last_tail_bound + 10. * tol
        difference = op_norm(g_cumulants - g_subordination)
        lines.append({"probe_id": probe_id, "cumulant_route": summed.method, "tail_bound": tail,
                      "iterations": info["iterations"], "f_defect": info["f_defect"],
                      "sum_defect": info["sum_defect"], "difference": difference, "budget": budget,
                      "passed": difference <= budget})
        if printing_warnings and difference > budget:
            print("WARNING: at the probe", probe_id, "both routes differ by %.3e, above the budget %.3e!"
                  % (difference, budget))
    data_frame = pd.DataFrame(lines, columns=["probe_id", "cumulant_route", "tail_bound", "iterations", "f_defect",
                                              "sum_defect", "difference", "budget", "passed"])
    data_frame.to_csv(os.path.join(out_dir, "crosscheck.csv"), na_rep='NA', index=False)
    return {"convolved": convolved, "crosscheck": data_frame}


def cmd_steinitz(config, out_dir, printing_warnings=False):
    """
    Reads the vectors of the CSV file 'vectors' and writes in 'result.json' their rearrangement (when no fraction 't' is
    given) or the subset selected for t.
    """
    path = os.path.join(config["base_dir"], _require(config, "vectors"))
    try:
        instance = read_vectors_csv(path)
    except (OSError, ValueError) as error:
        raise ConfigError("The vectors could not be read from '%s': %s" % (path, error))
    tol = config.get("tol", param.steinitz_tol)
    seed = _optional_integer(config, "seed", minimum=0)
    t = config.get("t")
    if t is None:
        result = rearrange_zero_sum(instance, tol=tol, seed=seed)
    else:
        try:
            t = float(t)
        except (TypeError, ValueError):
            raise ConfigError("The fraction t must be a number, got %r." % (t,))
        if not 0. <= t <= 1.:
            raise ConfigError("The fraction t must lie in [0, 1], got %s." % t)
        result = subset_select(instance, t, tol=tol, seed=seed)
    document = result.to_json()
    document.update({"n_vectors": len(instance), "n_dim": instance.n_dim, "norm_cap": instance.norm_cap,
                     "certified": result.is_certified()})
    tools.write_json(document, os.path.join(out_dir, "result.json"))
    if printing_warnings:
        print("The %s has a deviation %.4g for a certified bound %.4g."
              % (result.kind, result.deviation, result.certified_bound))
    return result


def _shift_plan(config, dim):
    plan = dict(config.get("shift_plan", {"decay": "none"}))
    for key in ["direction", "limit"]:
        if key in plan:
            plan[key] = tools.read_matrix(plan[key], dim)
    return plan


def cmd_hinchin(config, out_dir, printing_warnings=False):
    """
    Builds the triangular array described by the configuration, runs the divisibility experiment and writes the
    per-row report 'report.jsonl', the summary 'summary.csv', the last selected distribution 'final_nu.json' and, when
    asked for, the level 2 check 'level_two.csv'.
    """
    dim, order = _dimensions(config)
    seed = _optional_integer(config, "seed", param.random_seed, minimum=0)
    p = _integer(config.get("p", param.divisibility_order), "p")
    tail_order = _optional_integer(config, "tail_order")
    target = _as_cumulants(build_distribution(_require(config, "target"), dim, order, config["base_dir"]), order)
    if not target.infinitely_divisible:
        raise ConfigError("The target of the experiment must be built from infinitely divisible pieces.")
    if "tol" in config:
        param.certificate_tol = _positive(config["tol"], "tol")
    noise_scale = _number(config.get("noise_scale", param.noise_scale), "noise_scale")
    try:
        array = build_array_from_id(target, row_sizes=config.get("row_sizes", param.row_sizes),
                                    shift_plan=_shift_plan(config, dim), noise_scale=noise_scale, seed=seed,
                                    printing_warnings=printing_warnings)
    except (ValueError, TypeError) as error:
        raise ConfigError("The triangular array could not be built: %s" % error)

    M = array.target.bound
    if config.get("lambda") is None:
        lam = _number(config.get("lambda_factor", param.probe_lambda_factor), "lambda_factor") * (M if M > 0. else 1.)
    else:
        lam = _number(config["lambda"], "lambda")
    if not lam > 16. * M:
        raise ConfigError("The probes need lambda > 16M = %.6g, got lambda = %s." % (16. * M, lam))
    probes = build_probes(_integer(config.get("probe_count", param.probe_count), "probe_count"), M, lam=lam,
                          seed=seed, dim=dim)

    infinitesimality = infinitesimality_check(array)
    report = run_hinchin(array, p, probes, tail_order=tail_order,
                         jobs=_integer(config.get("jobs", param.jobs), "jobs"), printing_warnings=printing_warnings)

    tools.write_json_lines(report.rows, os.path.join(out_dir, "report.jsonl"))
    report.to_dataframe().to_csv(os.path.join(out_dir, "summary.csv"), na_rep='NA', index=False)
    tools.write_json(report.final_nu.to_json(), os.path.join(out_dir, "final_nu.json"))
    summary = report.summary()
    summary.update({"infinitesimality": infinitesimality, "probes": probes.to_json()})
    if config.get("level_two", False):
        level_two = verify_level_two(report, array, probes, tail_order=tail_order)
        level_two.to_csv(os.path.join(out_dir, "level_two.csv"), na_rep='NA', index=False)
        summary["level_two_passed"] = bool(level_two["passed"].all())
    tools.write_json(summary, os.path.join(out_dir, "experiment.json"))
    if printing_warnings and report.verdict != "PASS":
        print("WARNING: some rows of the experiment are INCONCLUSIVE!")
    return report


def cmd_check(config, out_dir, printing_warnings=False):
    """
    Runs the bound checks, the tracial conditions, the complete positivity check and, when probes are given, the sign
    of the imaginary part of the Voiculescu transform, on the distribution of the configuration. Writes 'check.json'.
    """
    dim, order = _dimensions(config)
    distribution = build_distribution(_require(config, "distribution"), dim, order, config["base_dir"])
    tol = config.get("tol", param.positivity_tol)
    degree = _integer(config.get("degree_cutoff", param.degree_cutoff), "degree_cutoff")
    moments = _as_moments(distribution, order)
    M = _number(config.get("M", moments.bound), "M")

    seed = _optional_integer(config, "seed", minimum=0)
    passed, worst_ratio = exp_bound_check(moments, M=M, seed=seed)
    document = {"exponential_bound": {"passed": passed, "worst_ratio": worst_ratio, "M": M}}
    if isinstance(distribution, RealizedModel):
        document["expectation"] = check_expectation_properties(distribution, seed=seed)
    cumulants = _as_cumulants(distribution, order)
    passed, worst_ratio = cumulant_bound_check(cumulants, M=M)
    document["cumulant_bound"] = {"passed": passed, "worst_ratio": worst_ratio}
    try:
        document["tracial_conditions"] = check_tracial_conditions(moments, M=M, degree_cutoff=degree, tol=tol)
        document["complete_positivity"] = check_complete_positivity(moments, family_degree=degree, tol=tol)
    except ValueError as error:
        raise ConfigError("The conditions cannot be checked: %s" % error)
    if "probes" in config:
        document["voiculescu_negativity"] = voiculescu_negativity_check(cumulants,
                                                                        read_probes(config["probes"], dim))
    tools.write_json(document, os.path.join(out_dir, "check.json"))
    if printing_warnings:
        for key, value in sorted(document.items()):
            if isinstance(value, dict) and not value.get("passed", True):
                print("WARNING: the check '%s' failed!" % key)
    return document


COMMANDS = {"convolve": cmd_convolve, "steinitz": cmd_steinitz, "hinchin": cmd_hinchin, "check": cmd_check}


########################################################################################################################
# MAIN PROGRAM
########################################################################################################################

def build_parser():
    parser = argparse.ArgumentParser(prog="freediv", description="Numerical experiments on operator-valued free "
                                                                 "convolution and free infinite divisibility.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, function in COMMANDS.items():
        subparser = subparsers.add_parser(name, help=function.__doc__.strip().split("\n")[0])
        subparser.add_argument("--config", type=str, default=None, help="JSON or TOML configuration file")
        subparser.add_argument("--seed", type=int, default=None, help="random seed")
        subparser.add_argument("--jobs", type=int, default=None, help="number of parallel processes")
        subparser.add_argument("--out", type=str, default="outputs", help="output directory")
        subparser.add_argument("--tol", type=float, default=None, help="main tolerance of the command")
        subparser.add_argument("--verbose", action="store_true", help="print progress and warnings")
        if name == "steinitz":
            subparser.add_argument("--vectors", type=str, default=None, help="CSV file, one vector per line")
            subparser.add_argument("--t", type=float, default=None, help="fraction of the sum to be approximated")
    return parser


def main(argv=None):
    """
    Runs one command of the command line and returns its exit code.
    :param argv: the list of arguments (default: sys.argv[1:])
    :return: 0 on success, 2 for an invalid configuration, 3 for a numerical failure
    """
    args = build_parser().parse_args(argv)
    t_start = time.time()
    # The configuration may update parameters.py; the defaults are restored at the end of the command:
    defaults = {key: value for key, value in vars(param).items() if not key.startswith("__")}
    try:
        config = _load_config(args)
        if args.command == "steinitz":
            if args.vectors is not None:
                config["vectors"] = os.path.abspath(args.vectors)
            if args.t is not None:
                config["t"] = args.t
        os.makedirs(args.out, exist_ok=True)
        COMMANDS[args.command](config, args.out, printing_warnings=args.verbose)
    except ConfigError as error:
        print("!!! ERROR: invalid configuration: %s" % error, file=sys.stderr)
        return 2
    except NumericalFailure as error:
        print("!!! ERROR: numerical failure (%s): %s" % (type(error).__name__, error), file=sys.stderr)
        return 3
    finally:
        param.__dict__.update(defaults)
    tools.write_metadata(os.path.join(args.out, "metadata.json"), args.command, t_start,
                         extra={"config": args.config, "seed": config.get("seed")})
    if args.verbose:
        print("The command '%s' is done, it took %.3f s." % (args.command, time.time() - t_start))
    return 0


if __name__ == '__main__':
    sys.exit(main())
