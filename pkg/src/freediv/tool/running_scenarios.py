#  -*- coding: utf-8 -*-

"""
    This script allows to run the divisibility experiment of freediv over one scenario or a list of scenarios, using a
    specific set of parameters and options, which are specified in an input file.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import os
import shutil
import time
import multiprocessing as mp
from functools import partial

from freediv import parameters as param
from freediv import cli
from freediv.tool import tools


########################################################################################################################

# Function for running the instruction of one scenario:
#------------------------------------------------------
def run_one_scenario(scenario_id=1,
                     inputs_dir_path="inputs",
                     outputs_dir_path="outputs",
                     scenarios_list="scenarios_list.csv"):
    """
    This function runs the divisibility experiment using instructions from the scenario [scenario_id].
    The instructions can either be a .csv file (one scenario per line, nested keys written as 'a:b') or a .json file
    (a list of configuration documents).
    For missing instructions, default values (e.g. those defined in 'parameters.py') will be used.
    The outputs of this scenario are recorded in a folder 'Scenario_XXXX' (any existing folder with the same scenario
    number is emptied first).

    :param int scenario_id: the number of the scenario to be read in the file containing the list of scenarios
    :param str inputs_dir_path: the path of the directory containing the file [scenarios_list]
    :param str outputs_dir_path: the path of the directory where the outputs will be saved
    :param str scenarios_list: the name of the .csv or .json file where scenario's instructions are written
    :return: the verdict of the experiment ('PASS' or 'INCONCLUSIVE'), or 'ERROR'
    """

    # HANDLING GENERAL INPUTS AND OUTPUTS FOLDERS:
    OUTPUTS_DIRPATH = outputs_dir_path if outputs_dir_path else 'outputs'
    INPUTS_DIRPATH = inputs_dir_path if inputs_dir_path else 'inputs'
    if not os.path.exists(OUTPUTS_DIRPATH):
        os.mkdir(OUTPUTS_DIRPATH)

    # READING SCENARIO'S INSTRUCTIONS:
    scenarios = tools.read_scenarios(os.path.join(INPUTS_DIRPATH, scenarios_list))
    scenario = scenarios[scenario_id]
    scenario_name = 'Scenario_%.4d' % scenario_id

    # CREATING THE OUTPUT FOLDER FOR THIS SCENARIO:
    scenario_dirpath = os.path.join(OUTPUTS_DIRPATH, scenario_name)
    if not os.path.exists(scenario_dirpath):
        os.mkdir(scenario_dirpath)
    else:
        # Otherwise, we delete all the files that are already present inside:
        for root, dirs, files in os.walk(scenario_dirpath):
            for file in files:
                os.remove(os.path.join(root, file))

    # SIMULATION PARAMETERS:
    # The entries having the name of a parameter update parameters.py, the other ones configure the experiment:
    defaults = {key: value for key, value in vars(param).items() if not key.startswith("__")}
    updated_parameters = tools.update_parameters(scenario)
    param.__dict__.update(updated_parameters)
    tools.write_json(updated_parameters, os.path.join(scenario_dirpath, 'updated_parameters.json'))

    PRINTING_WARNINGS_OPTION = bool(scenario.get('printing_warnings', False))
    config = dict(scenario)
    config["base_dir"] = os.path.abspath(INPUTS_DIRPATH)

    t_start = time.time()
    try:
        report = cli.cmd_hinchin(config, scenario_dirpath, printing_warnings=PRINTING_WARNINGS_OPTION)
        verdict = report.verdict
    except (cli.ConfigError, ValueError) as error:
        print("!!! ERROR: the scenario", scenario_id, "is not valid:", error)
        verdict = "ERROR"
    except cli.NumericalFailure as error:
        print("!!! ERROR: the scenario", scenario_id, "stopped on a numerical failure:", error)
        verdict = "ERROR"
    finally:
        param.__dict__.update(defaults)

    tools.write_metadata(os.path.join(scenario_dirpath, 'metadata.json'), "hinchin", t_start,
                         extra={"scenario": scenario_id, "verdict": verdict})
    print("The scenario", scenario_id, "is done (verdict: %s)." % verdict)
    return verdict


# Function for running several scenarios in parallel:
#----------------------------------------------------
def run_multiple_scenarios(scenarios_list="scenarios_list.csv", input_path='inputs', output_path='outputs',
                           num_processes=None):
    """
    This function runs the experiment simultaneously for different scenarios read in the file [scenarios_list],
    by parallelizing the function 'run_one_scenario' using multiprocessing.
    For missing instructions, default values (e.g. those defined in 'parameters.py') will be used.
    The outputs of each scenario are recorded in different folders 'Scenario_XXXX'.
    :param str scenarios_list: the name of the .csv or .json file where scenario's instructions are written
    :param str input_path: the path of the directory containing the file [scenarios_list]
    :param str output_path: the path of the directory where the outputs will be saved
    :param int num_processes: the number of parallel processes (default: the number of CPUs)
    :return: a dictionary {scenario number: verdict}
    """

    # READING SCENARIO INSTRUCTIONS:
    print("Loading the instructions of scenarios...")
    scenarios = sorted(tools.read_scenarios(os.path.join(input_path, scenarios_list)))
    if not os.path.exists(output_path):
        os.mkdir(output_path)

    # We record the starting time:
    t_start = time.time()
    if num_processes is None:
        num_processes = mp.cpu_count()
    print("The list of scenarios to be run is", str(scenarios),
          "and the maximal number of parallel processes is", num_processes, "...")

    # We run all scenarios in parallel:
    with mp.Pool(min(num_processes, len(scenarios))) as p:
        verdicts = p.map(partial(run_one_scenario, inputs_dir_path=input_path, outputs_dir_path=output_path,
                                 scenarios_list=scenarios_list), scenarios)

    # We indicate the total time the experiments took:
    tmp = (time.time() - t_start) / 60.
    print("")
    print("===================================")
    print("Experiments are done! Multiprocessing took %4.3f minutes!" % tmp)

    return dict(zip(scenarios, verdicts))


# Function for clearing the previous results:
# --------------------------------------------
def previous_outputs_clearing(output_path="outputs"):
    """
    This function is used to delete previous output files and folders.
    :param output_path: the path of the outputs directory to be cleared
    """
    # If the output directory already exists:
    if os.path.exists(output_path):
        try:
            # We remove all files and subfolders:
            print("Deleting the 'outputs' folder...")
            shutil.rmtree(output_path)
            print("Creating a new 'outputs' folder...")
            os.mkdir(output_path)
        except OSError as e:
            print("An error occured when trying to delete the output folder: %s - %s." % (e.filename, e.strerror))
    else:
        # We recreate an empty folder 'outputs':
        print("Creating a new 'outputs' folder...")
        os.mkdir(output_path)

    return
