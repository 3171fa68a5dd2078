import argparse
import json
import os
import time
import tracemalloc
from multiprocessing import cpu_count
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from errors import ModelFileError, UsageError

# Number of significant digits used for every float written to CSV
CSV_FLOAT_FORMAT = "%.17g"


def read_json_as_dict(input_path: str) -> Dict:
    """
    Reads a JSON file and returns its content as a dictionary.
    If input_path is a directory, the first JSON file in the directory is read.
    If input_path is a file, the file is read.

    Args:
        input_path (str): The path to the JSON file or directory containing a JSON file.

    Returns:
        dict: The content of the JSON file as a dictionary.

    Raises:
        ModelFileError: If the input_path is neither a file nor a directory,
                    if input_path is a directory without any JSON files, or if
                    the file is not valid JSON (the message carries line and
                    column of the parse failure).
    """
    if os.path.isdir(input_path):
        json_files = sorted(
            os.path.join(input_path, f)
            for f in os.listdir(input_path)
            if f.endswith(".json")
        )
        if not json_files:
            raise ModelFileError(f"No JSON files found in the directory {input_path}")
        json_file_path = json_files[0]

    elif os.path.isfile(input_path):
        json_file_path = input_path
    else:
        raise ModelFileError(f"Input path is neither a file nor a directory: {input_path}")

    with open(json_file_path, "r", encoding="utf-8") as file:
        try:
            json_data_as_dict = json.load(file)
        except json.JSONDecodeError as exc:
            raise ModelFileError(
                f"Malformed JSON in '{json_file_path}' at line {exc.lineno}, "
                f"column {exc.colno}: {exc.msg}"
            ) from exc

    if not isinstance(json_data_as_dict, dict):
        raise ModelFileError(f"Top level of '{json_file_path}' must be a JSON object")
    return json_data_as_dict


def save_json(file_path_and_name: str, data: Any) -> None:
    """Save json to a path (directory + filename)"""
    with open(file_path_and_name, "w", encoding="utf-8") as file:
        json.dump(
            data,
            file,
            default=lambda o: make_serializable(o),
            sort_keys=True,
            indent=4,
            separators=(",", ": "),
        )


def make_serializable(obj: Any) -> Union[int, float, List[Union[int, float]], Any]:
    """
    Converts a given object into a serializable format.

    Args:
    - obj: Any Python object

    Returns:
    - If obj is an integer or numpy integer, returns the integer value as an int
    - If obj is a numpy floating-point number, returns the floating-point value
        as a float
    - If obj is a numpy array, returns the array as a list
    - Otherwise, uses the default behavior of the json.JSONEncoder to serialize obj

    """
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    else:
        return json.JSONEncoder.default(None, obj)


def save_dataframe_as_csv(dataframe: pd.DataFrame, file_path: str) -> None:
    """
    Saves a pandas dataframe to a CSV file.
    Float values are saved with 17 significant digits, period decimal separator
    and `\\n` line endings, so files are reproducible byte for byte.

    Args:
    - dataframe (pd.DataFrame): The pandas dataframe to be saved.
    - file_path (str): File path and name to save the CSV file.

    Raises:
    - IOError: If an error occurs while saving the CSV file.
    """
    out_dir = os.path.dirname(file_path)
    if out_dir and not os.path.exists(out_dir):
        os.makedirs(out_dir)
    try:
        dataframe.to_csv(
            file_path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
        )
    except IOError as exc:
        raise IOError(f"Error saving CSV file: {exc}") from exc


def resolve_n_jobs(n_jobs: Optional[int]) -> int:
    """
    Number of parallel workers to use. `None` spares one CPU for other tasks.

    Args:
        n_jobs (Optional[int]): Requested worker count.

    Returns:
        int: A positive worker count.
    """
    if n_jobs is None:
        return max(1, cpu_count() - 1)
    if n_jobs < 1:
        raise ValueError(f"Worker count must be positive. Given {n_jobs}")
    return n_jobs


class TimeAndMemoryTracker(object):
    """
    This class serves as a context manager to track time and
    memory allocated by code executed inside it.
    """

    def __init__(self, logger):
        self.logger = logger

    def __enter__(self):
        tracemalloc.start()
        self.start_time = time.time()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.end_time = time.time()
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()

        elapsed_time = self.end_time - self.start_time

        self.logger.info(f"Execution time: {elapsed_time:.2f} seconds")
        self.logger.info(f"Memory allocated (peak): {peak / 1024**2:.2f} MB")


class TaskArgumentParser(argparse.ArgumentParser):
    """
    Argument parser that raises `UsageError` instead of exiting, so task
    scripts can map usage problems to their exit code.
    """

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def positive_int(value: str) -> int:
    """argparse type for counts that must be at least 1."""
    try:
        number = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{value}'") from exc
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {number}")
    return number


def seed_int(value: str) -> int:
    """argparse type for 64-bit unsigned seeds."""
    try:
        number = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{value}'") from exc
    if not 0 <= number < 2**64:
        raise argparse.ArgumentTypeError(f"must be a 64-bit unsigned integer, got {number}")
    return number
