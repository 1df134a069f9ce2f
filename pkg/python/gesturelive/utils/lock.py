"""
This module contains helpful utility for dealing with profile store locks.

In particular, it contains the `with_profile_lock` decorator that protects the
execution of the method it is applied to by an exclusive advisory file lock placed in
the directory of the profile store.
"""

# Python imports
from pathlib import Path
from typing import Any, Callable, Protocol, TypeVar, cast
import fcntl
import functools
import logging
import time

# Our imports
from gesturelive.errors import GestureLiveError

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

DEFAULT_LOCK_FILE_NAME = ".profiles.lock"
_POLL_INTERVAL_S = 0.05


class ProfileLockError(GestureLiveError):
    """Exception raised when the profile store lock cannot be obtained in time."""

    pass


class LockedDirectory(Protocol):
    """Anything that owns a directory in which its lock file lives."""

    @property
    def root(self) -> Path:
        """Return the directory to lock."""
        ...


def _obtain_lock(lock_path: Path, timeout_s: float, friendly_name: str) -> Any:
    lock_path.parent.mkdir(parents=True, exist_ok=True)
    handle = open(lock_path, "a+")
    deadline = time.monotonic() + timeout_s
    logger.debug(f"Obtaining lock {lock_path} for {friendly_name}...")
    while True:
        try:
            fcntl.flock(handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
            logger.debug(f"Obtained lock {lock_path} for {friendly_name}.")
            return handle
        except BlockingIOError:
            if time.monotonic() >= deadline:
                handle.close()
                raise ProfileLockError(
                    f"Failed to obtain lock {lock_path} for {friendly_name} within "
                    f"{timeout_s} s."
                ) from None
            time.sleep(_POLL_INTERVAL_S)


def _release_lock(handle: Any, friendly_name: str):
    try:
        fcntl.flock(handle.fileno(), fcntl.LOCK_UN)
        logger.debug(f"Released lock for {friendly_name}.")
    finally:
        handle.close()


def with_profile_lock(
    lock_file_name: str = DEFAULT_LOCK_FILE_NAME, timeout_s: float = 30.0
) -> Callable[[F], F]:
    """
    Generate a decorator that serializes a method across processes with a file lock.

    The decorated method's first argument must expose a `root` directory; the lock
    file is created inside it. Only one holder of the lock runs at a time, across
    threads and processes alike, so one writer mutates the store at a time.

    :param lock_file_name: The name of the lock file inside the root directory.
    :param timeout_s: How long to wait for the lock before giving up.

    :returns A decorator protecting a method by the lock.
    """

    def decorator(func: F) -> F:
        @functools.wraps(func)
        def wrapper(owner: LockedDirectory, *args: Any, **kwargs: Any) -> Any:
            func_name: str = func.__name__
            handle = _obtain_lock(Path(owner.root) / lock_file_name, timeout_s, func_name)
            try:
                return func(owner, *args, **kwargs)
            finally:
                _release_lock(handle, func_name)

        return cast(F, wrapper)

    return decorator
