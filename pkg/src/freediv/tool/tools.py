#  -*- coding: utf-8 -*-

"""
    This script contains the tools shared by the command line and the scenario runner: reading configuration files
    (JSON or TOML) and scenario lists (CSV or JSON), building nested dictionaries from 'a:b' column names, reading
    matrices given in configuration files, and writing JSON reports in a reproducible way.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import os
import sys
import json
import time
import platform

import numpy as np
import pandas as pd

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from freediv import parameters as param
from freediv.version import __version__


# READING INSTRUCTIONS:
#######################

def is_int(dt):
    """
    Returns True if dt is an integer, False in other cases.
    """
    try:
        int(dt)
    except (TypeError, ValueError):
        return False
    return True


def _buildDic(keyList, val, dic):
    if len(keyList) == 1:
        dic[keyList[0]] = val
        return

    newDic = dic.get(keyList[0], {})
    dic[keyList[0]] = newDic
    _buildDic(keyList[1:], val, newDic)


def buildDic(dict_scenario, dic=None):
    """
    Function that builds a nested dictionary (dict of dict), e.g. buildDic({'a:b:c': 1, 'a:b:d': 2})
    returns {'a': {'b': {'c': 1, 'd': 2}}}. Empty cells (NaN) are skipped, so that defaults apply.
    """
    if not dic:
        dic = {}

    for k, v in dict_scenario.items():
        if isinstance(v, (list, dict)) or not pd.isnull(v):
            keyList = [int(kk) if is_int(kk) else kk for kk in str(k).split(':')]
            _buildDic(keyList, v, dic)

    return dic


def read_config(path):
    """
    Reads a configuration document, written either in JSON (.json) or in TOML (.toml).
    :param path: the path of the file
    :return: the dictionary of the document
    """
    extension = os.path.splitext(path)[1].lower()
    if extension == ".json":
        with open(path, "r") as f:
            return json.load(f)
    if extension == ".toml":
        with open(path, "rb") as f:
            return tomllib.load(f)
    raise ValueError("The extension of the configuration file '%s' has not been recognized (either .json or .toml)!"
                     % path)


def _cell_value(value):
    # Lists and documents are written in JSON inside the cells; integers may have been read as floats:
    if isinstance(value, str) and value.strip()[:1] in ("[", "{"):
        return json.loads(value)
    if isinstance(value, (float, np.floating)) and np.isfinite(value) and float(value).is_integer():
        return int(value)
    return value


def read_scenarios(path):
    """
    This function reads a list of scenarios, either from a CSV file (one scenario per line, with a column 'Scenario'
    giving its number and column names such as 'shift_plan:decay' for nested keys, lists being written in JSON), or
    from a JSON file containing a list of documents (numbered from 1 when they have no 'Scenario' field).
    :param path: the path of the file
    :return: a dictionary {scenario number: nested dictionary of instructions}
    """
    extension = os.path.splitext(path)[1].lower()
    scenarios = {}
    if extension == ".csv":
        scenarios_df = pd.read_csv(path, index_col='Scenario')
        for scenario_id, line in scenarios_df.iterrows():
            scenarios[int(scenario_id)] = buildDic({k: _cell_value(v) for k, v in line.to_dict().items()})
    elif extension == ".json":
        with open(path, "r") as f:
            documents = json.load(f)
        for number, document in enumerate(documents, start=1):
            document = dict(document)
            scenarios[int(document.pop("Scenario", number))] = buildDic(document)
    else:
        raise ValueError("The extension of the scenarios file '%s' has not been recognized (either .csv or .json)!"
                         % path)
    return scenarios


def read_matrix(value, dim=None):
    """
    This function reads a matrix given in a configuration: a scalar (multiple of the identity, dim being then required),
    a list of rows of real or [re, im] entries, or the JSON form {"dim": d, "entries": ...}.
    :param value: the value read in the configuration
    :param dim: the expected size d
    :return: a complex numpy array of shape (d, d)
    """
    if isinstance(value, dict):
        entries = np.array(value["entries"], dtype=float)
        matrix = entries[..., 0] + 1j * entries[..., 1]
    elif np.isscalar(value):
        if dim is None:
            raise ValueError("A scalar can only be read as a matrix when the dimension is known.")
        matrix = complex(value) * np.eye(dim)
    else:
        array = np.array(value, dtype=float)
        if array.ndim == 3 and array.shape[-1] == 2:
            matrix = array[..., 0] + 1j * array[..., 1]
        else:
            matrix = array.astype(complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("A square matrix was expected, got an array of shape %s." % (matrix.shape,))
    if dim is not None and matrix.shape[0] != dim:
        raise ValueError("A %dx%d matrix was expected, got a %dx%d one." % (dim, dim, matrix.shape[0],
                                                                          matrix.shape[1]))
    return matrix


def update_parameters(options):
    """
    Returns the dictionary of the default values of parameters.py updated by the options having the same name.
    Unknown names are ignored.
    """
    defaults = {key: value for key, value in vars(param).items() if not key.startswith("__")}
    for key, value in options.items():
        if key in defaults:
            defaults[key] = value
    return defaults


# WRITING OUTPUTS:
##################

def _to_builtin(value):
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_builtin(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def write_json(document, path):
    """Writes a document as JSON with sorted keys, so that identical documents give identical files."""
    with open(path, "w") as f:
        json.dump(_to_builtin(document), f, sort_keys=True, indent=1)
        f.write("\n")


def write_json_lines(documents, path):
    """Writes one JSON document per line, with sorted keys."""
    with open(path, "w") as f:
        for document in documents:
            f.write(json.dumps(_to_builtin(document), sort_keys=True) + "\n")


def write_metadata(path, command, t_start, extra=None):
    """
    Writes the information that changes from one run to another (dates, elapsed time, versions) in a separate file.
    """
    metadata = {"command": command,
                "freediv_version": __version__,
                "python_version": platform.python_version(),
                "numpy_version": np.__version__,
                "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(t_start)),
                "elapsed_seconds": time.time() - t_start}
    if extra:
        metadata.update(extra)
    write_json(metadata, path)
