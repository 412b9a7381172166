#  -*- coding: utf-8 -*-

"""
    This script allows to run the divisibility experiment of freediv over one scenario or a list of scenarios, using a
    specific set of parameters and options, which are specified in an input file (here 'inputs/scenarios_list.csv').

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import sys
import argparse
from pathlib import Path

from freediv.tool.running_scenarios import run_one_scenario, run_multiple_scenarios, previous_outputs_clearing


########################################################################################################################
########################################################################################################################

# MAIN PROGRAM:
###############

if __name__ == '__main__':
    # (Note: this condition avoids launching automatically the program when imported in another file)

    # The current directory is:
    current_dir = Path(__file__).parent.absolute()
    # The directories of the 'inputs' and 'outputs' in this directory are:
    input_dir = current_dir / 'inputs'
    output_dir = current_dir / 'outputs'

    parser = argparse.ArgumentParser(description="Runs the scenarios listed in 'inputs/scenarios_list.csv'.")
    parser.add_argument("-s", "--scenario", type=int, default=None, help="run this scenario only")
    parser.add_argument("-n", "--num-processes", type=int, default=None, help="number of parallel processes")
    args = parser.parse_args()

    if args.scenario is not None:
        # CASE 1 - CALLING ONE SCENARIO ONLY:
        #####################################
        verdict = run_one_scenario(scenario_id=args.scenario,
                                   inputs_dir_path=str(input_dir),
                                   outputs_dir_path=str(output_dir),
                                   scenarios_list="scenarios_list.csv")
        sys.exit(0 if verdict != "ERROR" else 1)

    # CASE 2 - CALLING MULTIPLE SCENARIOS:
    ######################################

    # We can clear the folder containing previous outputs:
    previous_outputs_clearing(output_path=str(output_dir))

    # We run the scenarios in parallel:
    verdicts = run_multiple_scenarios(scenarios_list="scenarios_list.csv",
                                      input_path=str(input_dir),
                                      output_path=str(output_dir),
                                      num_processes=args.num_processes)
    for scenario_id, verdict in sorted(verdicts.items()):
        print("Scenario %d: %s" % (scenario_id, verdict))
