import os

# Path to the root directory which contains the src directory
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Path into the mounted volume:
#   set to environment variable MODEL_INPUTS_OUTPUTS_PATH if it exists
#   else: set to default path which would be <path_to_root>/model_inputs_outputs/
MODEL_INPUTS_OUTPUTS = os.environ.get(
    "MODEL_INPUTS_OUTPUTS_PATH", os.path.join(ROOT_DIR, "model_inputs_outputs/")
)

# Path to inputs
INPUT_DIR = os.path.join(MODEL_INPUTS_OUTPUTS, "inputs")
# Path to the model file (H, noise and prior statistics)
MODEL_FILE_PATH = os.path.join(INPUT_DIR, "model", "model.json")
# Path to the measurement vector
MEASUREMENTS_FILE_PATH = os.path.join(INPUT_DIR, "measurements", "measurements.csv")

# Path to outputs
OUTPUT_DIR = os.path.join(MODEL_INPUTS_OUTPUTS, "outputs")
# Path to the estimate written by the estimate task
ESTIMATES_FILE_PATH = os.path.join(OUTPUT_DIR, "estimates", "estimate.csv")
# Path to the BMSE table written by the simulate task
RESULTS_FILE_PATH = os.path.join(OUTPUT_DIR, "results", "bmse.csv")
# Path to the figure written by the plot task
FIGURE_FILE_PATH = os.path.join(OUTPUT_DIR, "figures", "bmse.svg")

# Path to logs directory inside outputs directory
ERRORS_DIR = os.path.join(OUTPUT_DIR, "errors")
# Error file paths
ESTIMATE_ERROR_FILE_PATH = os.path.join(ERRORS_DIR, "estimate_error.txt")
SIMULATE_ERROR_FILE_PATH = os.path.join(ERRORS_DIR, "simulate_error.txt")
PLOT_ERROR_FILE_PATH = os.path.join(ERRORS_DIR, "plot_error.txt")

# Paths inside the source directory
# Path to source directory
SRC_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
# Path to config directory
CONFIG_DIR = os.path.join(SRC_DIR, "config")
# Path to the sweep config of the impulse-response experiment
SWEEP_CONFIG_FILE_PATH = os.path.join(CONFIG_DIR, "sweep_config.json")
# Path to runtime settings (tolerances, worker count)
RUNTIME_CONFIG_FILE_PATH = os.path.join(CONFIG_DIR, "runtime_config.json")
