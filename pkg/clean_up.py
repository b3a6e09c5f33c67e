import os
import shutil
from concurrent.futures import ThreadPoolExecutor


TEST_PREFIXES = ("test_", "test-", "temp_", "example_")


def is_test_artifact(name):
    """
    Test outputs are uuid-named with a test prefix; test modules themselves are kept.
    """
    return name.startswith(TEST_PREFIXES) and not name.endswith(".py")


def delete_path(path):
    if os.path.isdir(path):
        shutil.rmtree(path, ignore_errors=True)
    elif os.path.exists(path):
        os.remove(path)


def delete_test_outputs(directory="."):
    """
    Deletes all CSV, SVG, manifest and config files left behind by tests in `directory`
    """
    paths = [os.path.join(directory, p) for p in os.listdir(directory) if is_test_artifact(p)]
    with ThreadPoolExecutor() as executor:
        executor.map(delete_path, paths)
    return paths


if __name__ == "__main__":
    delete_test_outputs(".")
