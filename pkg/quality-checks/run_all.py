#!/bin/python3
"""
Run the quality checks of the repository in order and report the ones that failed.

Linting runs before the test suite; a failing check does not stop the ones after it.
Extra arguments are passed on to the test runner, e.g. `-m slow`.
"""

from pathlib import Path
from typing import List, Sequence
import subprocess
import sys

CHECKS_DIR = Path(__file__).resolve().parent
REPO_ROOT = CHECKS_DIR.parent
CHECKS = ("lint_python.sh", "run_tests.sh")


def run_check(name: str, extra_args: Sequence[str] = ()) -> bool:
    """
    Run one check script from the repository root, prefixing its output.

    :param name: The script name inside quality-checks/.
    :param extra_args: Arguments appended to the command line.

    :returns True if the script exited with 0.
    """
    print(f"Executing: {name}")
    process = subprocess.run(
        [str(CHECKS_DIR / name), *extra_args],
        cwd=REPO_ROOT,
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        check=False,
    )
    for line in process.stdout.decode().splitlines():
        print(f"[{name}] {line}")
    if process.returncode != 0:
        print(f"Script {name} failed with exit status {process.returncode}.")
    print()
    return process.returncode == 0


def main() -> None:
    """Start execution of the script."""
    test_args = sys.argv[1:]
    failed: List[str] = [
        name
        for name in CHECKS
        if not run_check(name, test_args if name == "run_tests.sh" else ())
    ]
    if failed:
        print("The following checks failed:")
        for name in failed:
            print(f"- {name}")
        sys.exit(1)


if __name__ == "__main__":
    main()
