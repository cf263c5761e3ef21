from .experiments import OPERATIONS, RunRecord, run
from .scenarios import CATALOG, get_scenario, list_scenarios, scenario_names
