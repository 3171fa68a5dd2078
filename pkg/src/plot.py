import math
import os
import sys
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402
from matplotlib.ticker import LogFormatterMathtext, LogLocator, NullLocator  # noqa: E402

from config import paths  # noqa: E402
from data_models.results_data_model import SIGMA2_COLUMN, validate_results  # noqa: E402
from errors import ModelFileError, exit_code_for  # noqa: E402
from logger import get_logger, log_error  # noqa: E402
from utils import TaskArgumentParser, TimeAndMemoryTracker  # noqa: E402

logger = get_logger(task_name="plot")

# Fixed salt for the ids matplotlib writes into SVG files
SVG_HASH_SALT = "bmse"


def read_results(results_file_path: str) -> pd.DataFrame:
    """
    Reads and validates a BMSE results CSV.

    Args:
        results_file_path (str): Path to the results CSV.

    Returns:
        pd.DataFrame: The validated table, `sigma2` first.
    """
    try:
        results = pd.read_csv(results_file_path)
    except FileNotFoundError as exc:
        raise ModelFileError(f"Results file not found: {results_file_path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ModelFileError(
            f"Could not parse results file '{results_file_path}': {exc}"
        ) from exc
    return validate_results(results)


def decade_limits(values: np.ndarray) -> Tuple[float, float]:
    """Axis limits at the decades enclosing `values`."""
    low = math.floor(math.log10(float(np.min(values))))
    high = math.ceil(math.log10(float(np.max(values))))
    if low == high:
        low, high = low - 1, high + 1
    return 10.0**low, 10.0**high


def build_bmse_figure(results: pd.DataFrame) -> Figure:
    """
    Log-log plot of the average BMSE over the noise variance, one line with
    point markers per estimator column.

    Args:
        results (pd.DataFrame): Validated results table.

    Returns:
        Figure: The figure. The caller owns it and closes it.
    """
    sigma2 = results[SIGMA2_COLUMN].to_numpy(dtype=np.float64)
    estimator_columns = [column for column in results.columns if column != SIGMA2_COLUMN]

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for column in estimator_columns:
        ax.loglog(
            sigma2,
            results[column].to_numpy(dtype=np.float64),
            marker="o",
            label=column,
            gid=f"bmse_{column}",
        )

    ax.set_xlim(*decade_limits(sigma2))
    ax.set_ylim(*decade_limits(results[estimator_columns].to_numpy(dtype=np.float64)))
    for axis in (ax.xaxis, ax.yaxis):
        axis.set_major_locator(LogLocator(base=10.0, numticks=30))
        axis.set_major_formatter(LogFormatterMathtext(base=10.0))
        axis.set_minor_locator(NullLocator())

    ax.set_xlabel(r"noise variance $\sigma^2$")
    ax.set_ylabel("average BMSE")
    ax.set_title("Average BMSE of the estimated impulse response")
    ax.grid(True, which="major", linestyle=":")
    ax.legend()
    fig.tight_layout()
    return fig


def save_svg(fig: Figure, figure_file_path: str) -> None:
    """
    Saves the figure as a self-contained SVG. Text is rendered as paths and
    the date stamp is left out, so equal input gives equal bytes.
    """
    out_dir = os.path.dirname(figure_file_path)
    if out_dir and not os.path.exists(out_dir):
        os.makedirs(out_dir)
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}):
        fig.savefig(figure_file_path, format="svg", metadata={"Date": None})


def run_plot(
    results_file_path: str = paths.RESULTS_FILE_PATH,
    figure_file_path: str = paths.FIGURE_FILE_PATH,
) -> None:
    """
    Plot a BMSE results CSV as a log-log SVG figure.

    Args:
        results_file_path (str): Path to the results CSV.
        figure_file_path (str): Path where the SVG will be saved.
    """
    with TimeAndMemoryTracker(logger) as _:
        logger.info("Loading results...")
        results = read_results(results_file_path)

        logger.info("Building figure...")
        fig = build_bmse_figure(results)

    logger.info("Saving figure...")
    try:
        save_svg(fig, figure_file_path)
    finally:
        plt.close(fig)


def get_parser() -> TaskArgumentParser:
    parser = TaskArgumentParser(
        prog="plot", description="Plot a BMSE results CSV as a log-log SVG figure."
    )
    parser.add_argument("--input", default=paths.RESULTS_FILE_PATH, help="Results CSV.")
    parser.add_argument("--out", default=paths.FIGURE_FILE_PATH, help="Output SVG file.")
    return parser


def cmd_plot(argv: Optional[List[str]] = None) -> int:
    """
    Runs the plot command.

    Returns:
        int: 0 on success, 1 usage error, 2 invalid input, 3 other failure.
    """
    try:
        args = get_parser().parse_args(argv)
        run_plot(results_file_path=args.input, figure_file_path=args.out)
        logger.info("Plot completed successfully")
        return 0
    except SystemExit as exc:
        # --help
        return exc.code or 0
    except Exception as exc:
        err_msg = "Error occurred during plotting."
        logger.error(f"{err_msg} Error: {str(exc)}")
        log_error(message=err_msg, error=exc, error_fpath=paths.PLOT_ERROR_FILE_PATH)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(cmd_plot())
