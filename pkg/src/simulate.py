import sys
from typing import List, Optional

from config import paths
from errors import exit_code_for
from logger import get_logger, log_error
from simulation.sweep import BmseTable, SweepConfig, run_sweep
from utils import (
    TaskArgumentParser,
    TimeAndMemoryTracker,
    positive_int,
    read_json_as_dict,
    resolve_n_jobs,
    seed_int,
)

logger = get_logger(task_name="simulate")


def run_simulation(
    config_file_path: str = paths.SWEEP_CONFIG_FILE_PATH,
    results_file_path: str = paths.RESULTS_FILE_PATH,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    n_jobs: Optional[int] = None,
    progress: bool = False,
    runtime_config_file_path: str = paths.RUNTIME_CONFIG_FILE_PATH,
) -> BmseTable:
    """
    Run the Monte Carlo BMSE sweep and save the results table to a CSV file.

    Args:
        config_file_path (str): Path to the sweep config.
        results_file_path (str): Path where the results CSV will be saved.
        trials (Optional[int]): Overrides the trial count of the config.
        seed (Optional[int]): Overrides the seed of the config.
        n_jobs (Optional[int]): Worker count. Defaults to the runtime config.
        progress (bool): Show a progress bar over grid points.
        runtime_config_file_path (str): Path to the runtime settings.

    Returns:
        BmseTable: The average BMSE per grid point and estimator.
    """
    with TimeAndMemoryTracker(logger) as _:
        logger.info("Loading runtime config...")
        runtime_config = read_json_as_dict(runtime_config_file_path)

        logger.info("Loading sweep config...")
        config = SweepConfig.from_dict(read_json_as_dict(config_file_path))
        config = config.with_overrides(trials=trials, seed=seed)

        if n_jobs is None:
            n_jobs = runtime_config.get("n_jobs")
        n_jobs = resolve_n_jobs(n_jobs)

        logger.info(
            f"Running sweep over {config.sigma2_points} noise variances, "
            f"{config.trials} trials each, seed {config.seed}, {n_jobs} workers..."
        )
        table = run_sweep(config, n_jobs=n_jobs, progress=progress)

    logger.info("Saving results...")
    table.to_csv(results_file_path)
    return table


def get_parser() -> TaskArgumentParser:
    parser = TaskArgumentParser(
        prog="simulate",
        description="Run the Monte Carlo BMSE sweep of the impulse-response experiment.",
    )
    parser.add_argument(
        "--config", default=paths.SWEEP_CONFIG_FILE_PATH, help="Sweep config JSON."
    )
    parser.add_argument(
        "--out", default=paths.RESULTS_FILE_PATH, help="Output CSV for the BMSE table."
    )
    parser.add_argument("--trials", type=positive_int, help="Trials per grid point.")
    parser.add_argument("--seed", type=seed_int, help="Base seed (64-bit unsigned).")
    parser.add_argument("--jobs", type=positive_int, help="Number of parallel workers.")
    parser.add_argument(
        "--progress", action="store_true", help="Show a progress bar over grid points."
    )
    return parser


def cmd_simulate(argv: Optional[List[str]] = None) -> int:
    """
    Runs the simulate command.

    Returns:
        int: 0 on success, 1 usage error, 2 invalid input, 3 numerical failure.
    """
    try:
        args = get_parser().parse_args(argv)
        run_simulation(
            config_file_path=args.config,
            results_file_path=args.out,
            trials=args.trials,
            seed=args.seed,
            n_jobs=args.jobs,
            progress=args.progress,
        )
        logger.info("Simulation completed successfully")
        return 0
    except SystemExit as exc:
        # --help
        return exc.code or 0
    except Exception as exc:
        err_msg = "Error occurred during simulation."
        logger.error(f"{err_msg} Error: {str(exc)}")
        log_error(message=err_msg, error=exc, error_fpath=paths.SIMULATE_ERROR_FILE_PATH)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(cmd_simulate())
