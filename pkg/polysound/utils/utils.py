import os
import sys
import json
import logging
import tempfile
import importlib
import contextlib
import collections.abc


LIST_LIKE_TYPES = (list, tuple, set, frozenset, collections.abc.KeysView)

_cloud_logging_ready = False


def try_import(module_name, origin_module=None, errors="raise"):
    """
    Attempt to dynamically import a module. If the import fails, raise an informative ImportError.

    Args:
    - module_name (str): The name of the module to be imported.
    - origin_module (str, optional): The module that is attempting to perform the import.
    - errors (str): One of "raise", "warn" or "ignore".
    """
    from polysound.config import PYPI_NAMES

    try:
        return importlib.import_module(module_name)
    except (ImportError, ModuleNotFoundError):
        pypi_name = PYPI_NAMES.get(module_name, None)
        pypi_str = f"(PyPI: '{pypi_name}')" if pypi_name else ""
        if origin_module:
            err = f"Module '{origin_module}' requires '{module_name}' {pypi_str} to be installed."
        else:
            err = f"Missing required module: '{module_name}'"
        if errors == "raise":
            raise ImportError(err) from None
        elif errors == "warn":
            print("Warning:", err, file=sys.stderr)
        return None


def _setup_cloud_logging():
    """
    Attach a Google Cloud Logging handler to the root logger (once).
    """
    global _cloud_logging_ready
    if _cloud_logging_ready:
        return
    gcp_logging = try_import("google.cloud.logging", "log", errors="warn")
    if gcp_logging is not None:
        client = gcp_logging.Client()
        client.setup_logging()
    else:
        logging.basicConfig(level=logging.INFO)
    _cloud_logging_ready = True


def log(*args, **kwargs):
    """
    Function for logging diagnostics. Logs a message as usual, and logs a dictionary of data as jsonPayload
    when running on GCP.

    Args:
        *args (list): list of elements to "print" to the logs.
        **kwargs (dict): passed on to `print` when running locally.

    Examples:
    >>> log("Widths - Solved sigma=3.0")
    message: "Widths - Solved sigma=3.0"
    >>> log("HydroSim - Step", {"step": 10, "mass": 100.0})
    message: "HydroSim - Step {'step': 10, 'mass': 100.0}"
    payload: {"step": 10, "mass": 100.0}
    """
    from polysound.config import LOG_ENV_KEYS

    env_data = {key: os.getenv(key, None) for key in LOG_ENV_KEYS}
    log_data = {k: v for k, v in env_data.items() if v is not None}

    # Dict arguments become queryable fields of the payload
    for arg in args:
        if isinstance(arg, dict):
            log_data.update(arg)
    log_data["message"] = " ".join([str(a) for a in args])

    if os.getenv("PLATFORM", "Local") in ["GCP"]:
        _setup_cloud_logging()
        logging.info(log_data)
    elif os.getenv("POLYSOUND_QUIET", "") not in ["1", "true", "True"]:
        # Diagnostics never go to stdout
        kwargs.setdefault("file", sys.stderr)
        print(log_data["message"], **kwargs)


def force_list(x):
    """
    Force x to be a list
    """
    if isinstance(x, LIST_LIKE_TYPES):
        return list(x)
    else:
        return [x]


def get_default_arg(arg_name):
    """
    Get a default argument, looking at the `POLYSOUND_<NAME>` environment variable first.

    Args:
    - arg_name (str): The name of the argument, e.g. "lambda" or "n_points".

    Returns:
    - The default value, cast to the type of the built-in default (None if unknown).

    Examples:
    >>> get_default_arg("n_points")
    200
    >>> os.environ["POLYSOUND_N_POINTS"] = "50"; get_default_arg("n_points")
    50
    """
    from polysound.config import DEFAULT_ARGS, ENV_PREFIX

    default = DEFAULT_ARGS.get(arg_name, None)
    env_value = os.environ.get(f"{ENV_PREFIX}{arg_name.upper()}")
    if env_value is None:
        return default
    if default is None or isinstance(default, str):
        return env_value
    return type(default)(env_value)


@contextlib.contextmanager
def atomic_path(path):
    """
    Yield a temporary path next to `path` and move it into place only if the block succeeds.

    Args:
    - path (str): The final destination.

    Examples:
    >>> with atomic_path("out.csv") as tmp:
    ...     df.to_csv(tmp)
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(
        prefix=f".{os.path.basename(path)}.", suffix=".tmp", dir=directory
    )
    os.close(fd)
    try:
        yield tmp_path
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


class JSON:
    """
    Class for operating JSON files
    """

    def __init__(self, path):
        self.path = path

    def load(self, allow_empty=True):
        """
        Load a json file as a dict
        """
        if allow_empty and not os.path.exists(self.path):
            return {}
        with open(self.path, "r", encoding="utf-8") as f:
            return json.load(f)

    def write(self, data, **kwargs):
        """
        Write a json file atomically
        """
        kwargs.setdefault("indent", 3)
        kwargs.setdefault("sort_keys", True)
        with atomic_path(self.path) as tmp_path:
            with open(tmp_path, mode="w", encoding="utf-8", newline="\n") as f:
                json.dump(data, f, **kwargs)
                f.write("\n")
        return self.path


class YAML:
    """
    Class for operating YAML files
    """

    def __init__(self, file_name):
        from polysound.utils import ModuleHandler

        self.file_name = file_name
        self.yaml = ModuleHandler("yaml").please_import(who_is_calling="YAML")

    def load(self):
        with open(self.file_name, "r", encoding="utf-8") as file:
            return self.yaml.safe_load(file) or {}
