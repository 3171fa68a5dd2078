import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from config import paths
from data_models.measurement_validator import validate_measurements
from errors import ModelFileError, exit_code_for
from logger import get_logger, log_error
from prediction.estimators import (
    EstimateResult,
    Estimator,
    RealBwlueEstimator,
    get_estimator,
    normalize_estimator_name,
)
from schema.linear_model import parse_model_file
from utils import (
    TaskArgumentParser,
    TimeAndMemoryTracker,
    read_json_as_dict,
    save_dataframe_as_csv,
)

logger = get_logger(task_name="estimate")

CLI_ESTIMATOR_NAMES = ["blue", "bwlue", "wlmmse", "re-blue", "re_blue", "rbwlue"]


def read_measurements(measurements_file_path: str) -> np.ndarray:
    """
    Reads the measurement CSV (`re,im` columns, one row per element of y).

    Args:
        measurements_file_path (str): Path to the measurement file.

    Returns:
        np.ndarray: The complex measurement vector.
    """
    try:
        measurements = pd.read_csv(measurements_file_path)
    except FileNotFoundError as exc:
        raise ModelFileError(f"Measurement file not found: {measurements_file_path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ModelFileError(
            f"Could not parse measurement file '{measurements_file_path}': {exc}"
        ) from exc
    return validate_measurements(measurements)


def create_estimate_dataframe(result: EstimateResult) -> pd.DataFrame:
    """
    Converts an estimate into the output table: `re` and `im` of x̂ and, when
    the estimator provides a covariance, its main diagonal as `var`.
    """
    x_hat = np.asarray(result.x_hat)
    estimate_df = pd.DataFrame({"re": x_hat.real, "im": x_hat.imag})
    if result.variance is not None:
        estimate_df["var"] = result.variance
    return estimate_df


def build_estimator(estimator_name: str, runtime_config: dict) -> Estimator:
    """Instantiates the estimator, applying runtime settings where they apply."""
    name = normalize_estimator_name(estimator_name)
    if name == RealBwlueEstimator.name and "properness_tolerance" in runtime_config:
        return get_estimator(
            name, properness_tolerance=float(runtime_config["properness_tolerance"])
        )
    return get_estimator(name)


def run_estimation(
    estimator_name: str,
    model_file_path: str = paths.MODEL_FILE_PATH,
    measurements_file_path: str = paths.MEASUREMENTS_FILE_PATH,
    estimates_file_path: str = paths.ESTIMATES_FILE_PATH,
    runtime_config_file_path: str = paths.RUNTIME_CONFIG_FILE_PATH,
) -> EstimateResult:
    """
    Estimate x from one measurement vector and save the estimate to a CSV file.

    Args:
        estimator_name (str): blue, bwlue, wlmmse, re-blue or rbwlue.
        model_file_path (str): Path to the model file (H, noise, optional prior).
        measurements_file_path (str): Path to the measurement CSV.
        estimates_file_path (str): Path where the estimate will be saved.
        runtime_config_file_path (str): Path to the runtime settings.

    Returns:
        EstimateResult: The estimate and its covariance.
    """
    with TimeAndMemoryTracker(logger) as _:
        logger.info("Loading runtime config...")
        runtime_config = read_json_as_dict(runtime_config_file_path)

        logger.info("Loading model file...")
        model = parse_model_file(model_file_path)
        logger.info(f"Loaded {model}")

        logger.info("Loading measurements...")
        y = read_measurements(measurements_file_path)

        estimator = build_estimator(estimator_name, runtime_config)
        logger.info(f"Running estimation. {estimator}")
        result = estimator.fit(model).predict(y)

    logger.info("Saving estimate...")
    save_dataframe_as_csv(
        dataframe=create_estimate_dataframe(result), file_path=estimates_file_path
    )
    return result


def get_parser() -> TaskArgumentParser:
    parser = TaskArgumentParser(
        prog="estimate",
        description="Estimate a real parameter vector from complex measurements.",
    )
    parser.add_argument("--model", default=paths.MODEL_FILE_PATH, help="Model JSON file.")
    parser.add_argument(
        "--measurements",
        default=paths.MEASUREMENTS_FILE_PATH,
        help="Measurement CSV with columns re,im.",
    )
    parser.add_argument(
        "--estimator",
        required=True,
        choices=CLI_ESTIMATOR_NAMES,
        help="Estimator to run (re-blue and re_blue are the same estimator).",
    )
    parser.add_argument(
        "--out", default=paths.ESTIMATES_FILE_PATH, help="Output CSV for the estimate."
    )
    return parser


def cmd_estimate(argv: Optional[List[str]] = None) -> int:
    """
    Runs the estimate command.

    Returns:
        int: 0 on success, 1 usage error, 2 invalid input, 3 numerical failure.
    """
    try:
        args = get_parser().parse_args(argv)
        run_estimation(
            estimator_name=args.estimator,
            model_file_path=args.model,
            measurements_file_path=args.measurements,
            estimates_file_path=args.out,
        )
        logger.info("Estimation completed successfully")
        return 0
    except SystemExit as exc:
        # --help
        return exc.code or 0
    except Exception as exc:
        err_msg = "Error occurred during estimation."
        logger.error(f"{err_msg} Error: {str(exc)}")
        log_error(message=err_msg, error=exc, error_fpath=paths.ESTIMATE_ERROR_FILE_PATH)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(cmd_estimate())
