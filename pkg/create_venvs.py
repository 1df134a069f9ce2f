"""
Create the development virtual environment of the repository.

Run it once after cloning, from the repository root. It creates `./.venv`, installs
everything listed in `requirements.txt` (the gesturelive runtime dependencies and the
tools the quality checks use) and registers `./python` with the environment through a
`.pth` file, so `import gesturelive` and `python -m gesturelive` work without touching
`PYTHONPATH`.
"""

import argparse
import shutil
import subprocess
import sys
import venv
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent
PTH_FILE_NAME = "gesturelive-dev.pth"


def verify_python_version():
    """Exit unless the interpreter is Python 3.11 or later; the config loader needs tomllib."""
    if sys.version_info < (3, 11):
        print("Python 3.11 or higher is required.")
        sys.exit(1)


def venv_python(venv_path: Path) -> Path:
    """Return the interpreter of a virtual environment."""
    return venv_path / "bin" / "python"


def pip_install(venv_path: Path, *args: str):
    """
    Run `pip install` with the interpreter of a virtual environment.

    :param venv_path: The virtual environment.
    :param args: The arguments passed on to `pip install`.
    """
    subprocess.run([str(venv_python(venv_path)), "-m", "pip", "install", *args], check=True)


def register_package_dir(venv_path: Path, package_dir: Path):
    """
    Put a directory on the import path of a virtual environment.

    :param venv_path: The virtual environment.
    :param package_dir: The directory holding the importable packages.
    """
    site_packages = subprocess.run(
        [str(venv_python(venv_path)), "-c", "import sysconfig; print(sysconfig.get_path('purelib'))"],
        check=True,
        capture_output=True,
        text=True,
    ).stdout.strip()
    pth_path = Path(site_packages) / PTH_FILE_NAME
    pth_path.write_text(f"{package_dir}\n", encoding="utf-8")
    print(f"> Registered {package_dir} in {pth_path}")


def create_venv(venv_path: Path, recreate: bool = False):
    """
    Create the virtual environment and install the repository requirements into it.

    :param venv_path: Where to create the environment.
    :param recreate: Whether to delete an existing environment first.
    """
    if recreate and venv_path.exists():
        print(f"> Deleting existing virtualenv in {venv_path}")
        shutil.rmtree(venv_path)
    if venv_path.exists():
        print(f"> Virtualenv already exists in {venv_path}; updating it")
    else:
        print(f"> Creating virtualenv in directory: {venv_path}")
        venv.create(venv_path, with_pip=True)

    pip_install(venv_path, "-U", "pip")
    pip_install(venv_path, "-r", str(REPO_ROOT / "requirements.txt"))
    register_package_dir(venv_path, REPO_ROOT / "python")
    print(f">>> The virtual environment at {venv_path} is ready.")


def main():
    """Start execution of the script."""
    parser = argparse.ArgumentParser(description="Create the development virtual environment.")
    parser.add_argument(
        "--recreate", action="store_true", help="Recreate the venv if it exists"
    )
    args = parser.parse_args()

    verify_python_version()
    create_venv(REPO_ROOT / ".venv", recreate=args.recreate)


if __name__ == "__main__":
    main()
