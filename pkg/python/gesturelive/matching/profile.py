"""
Contain the `UserProfile` type and the directory-backed `ProfileStore`.

Each profile is one JSON file named after its user. Writes are serialized by a file
lock and land through a temporary file that is renamed over the target, so a reader
always sees either the previous or the new profile in full.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict
import json
import logging
import os
import re
import tempfile

# 3rd party imports
from dateutil import parser as date_parser
from dateutil import tz

# Our imports
from gesturelive.features import ContourError
from gesturelive.features.contours import contour_set_from_dict, contour_set_to_dict
from gesturelive.matching import ProfileError
from gesturelive.matching.templates import PassphraseTemplate, PhonemeTemplate
from gesturelive.utils.lock import with_profile_lock

logger = logging.getLogger(__name__)

PROFILE_VERSION = 1
DEFAULT_PASSPHRASE = "passphrase"

_USER_ID_PATTERN = re.compile(r"^[A-Za-z0-9_.-]+$")


class ProfileMode(Enum):
    """
    How a user is enrolled.

    Possible values:
      TEXT_DEPENDENT: Against the averaged contours of a fixed passphrase.
      TEXT_INDEPENDENT: Against weighted per-phoneme templates.
    """

    TEXT_DEPENDENT = "TextDependent"
    TEXT_INDEPENDENT = "TextIndependent"


def _utc_now() -> datetime:
    return datetime.now(tz.tzutc())


@dataclass(frozen=True)
class UserProfile:
    """The enrolled templates and decision threshold of one user."""

    user_id: str
    mode: ProfileMode
    threshold: float
    passphrase_templates: Dict[str, PassphraseTemplate] = field(default_factory=dict)
    phoneme_templates: Dict[str, PhonemeTemplate] = field(default_factory=dict)
    created_at: datetime = field(default_factory=_utc_now)
    version: int = PROFILE_VERSION

    def __post_init__(self):
        """Check the user id, threshold and template presence."""
        if not _USER_ID_PATTERN.match(self.user_id):
            raise ProfileError(
                f"User id '{self.user_id}' may only contain letters, digits, '.', '_' "
                "and '-'."
            )
        if not -1.0 <= self.threshold <= 1.0:
            raise ProfileError(f"Threshold {self.threshold} is outside [-1, 1].")
        if self.mode is ProfileMode.TEXT_DEPENDENT and not self.passphrase_templates:
            raise ProfileError(
                f"Text-dependent profile '{self.user_id}' has no passphrase template."
            )
        if self.mode is ProfileMode.TEXT_INDEPENDENT and not self.phoneme_templates:
            raise ProfileError(
                f"Text-independent profile '{self.user_id}' has no phoneme template."
            )

    def primary_passphrase(self) -> PassphraseTemplate:
        """Return the passphrase template used for verification."""
        if DEFAULT_PASSPHRASE in self.passphrase_templates:
            return self.passphrase_templates[DEFAULT_PASSPHRASE]
        return self.passphrase_templates[sorted(self.passphrase_templates)[0]]


def profile_to_dict(profile: UserProfile) -> Dict[str, Any]:
    """Return the JSON document form of a profile."""
    return {
        "version": profile.version,
        "user_id": profile.user_id,
        "mode": profile.mode.value,
        "threshold": profile.threshold,
        "passphrase_templates": {
            name: {
                "contours": contour_set_to_dict(t.contours),
                "trial_count": t.trial_count,
            }
            for name, t in profile.passphrase_templates.items()
        },
        "phoneme_templates": {
            label: {
                "contours": contour_set_to_dict(t.contours),
                "weight": t.weight,
                "trial_count": t.trial_count,
            }
            for label, t in profile.phoneme_templates.items()
        },
        "created_at": profile.created_at.isoformat(),
    }


def profile_from_dict(document: Dict[str, Any]) -> UserProfile:
    """
    Rebuild a profile from its JSON document form.

    :raises ProfileError if the document is malformed or of another version.
    """
    version = document.get("version")
    if version != PROFILE_VERSION:
        raise ProfileError(f"Unsupported profile version {version!r}.")
    try:
        return UserProfile(
            user_id=str(document["user_id"]),
            mode=ProfileMode(document["mode"]),
            threshold=float(document["threshold"]),
            passphrase_templates={
                name: PassphraseTemplate(
                    contour_set_from_dict(t["contours"]), int(t["trial_count"])
                )
                for name, t in document["passphrase_templates"].items()
            },
            phoneme_templates={
                label: PhonemeTemplate(
                    label=label,
                    contours=contour_set_from_dict(t["contours"]),
                    weight=float(t["weight"]),
                    trial_count=int(t["trial_count"]),
                )
                for label, t in document["phoneme_templates"].items()
            },
            created_at=date_parser.isoparse(document["created_at"]),
            version=int(version),
        )
    except (KeyError, TypeError, ValueError, ContourError) as ex:
        raise ProfileError(f"Malformed profile document: {ex}") from ex


class ProfileStore:
    """A directory holding one `<user_id>.json` profile per user."""

    def __init__(self, root: Path | str):
        """
        Create a store over a directory; it is created on first write.

        :param root: The directory of the store.
        """
        self._root = Path(root)

    @property
    def root(self) -> Path:
        """Return the directory of the store."""
        return self._root

    def path_for(self, user_id: str) -> Path:
        """Return the profile path of a user."""
        if not _USER_ID_PATTERN.match(user_id):
            raise ProfileError(f"Invalid user id '{user_id}'.")
        return self._root / f"{user_id}.json"

    def exists(self, user_id: str) -> bool:
        """Return whether a profile is stored for the user."""
        return self.path_for(user_id).is_file()

    def load(self, user_id: str) -> UserProfile:
        """
        Load the profile of a user.

        :raises ProfileError if there is no profile or it cannot be parsed.
        """
        path = self.path_for(user_id)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ProfileError(f"No profile for user '{user_id}' in {self._root}.") from None
        except OSError as ex:
            raise ProfileError(f"Cannot read profile {path}: {ex}") from ex
        try:
            document = json.loads(text)
        except json.JSONDecodeError as ex:
            raise ProfileError(f"Profile {path} is not valid JSON: {ex}") from ex
        return profile_from_dict(document)

    def _write(self, profile: UserProfile):
        self._root.mkdir(parents=True, exist_ok=True)
        target = self.path_for(profile.user_id)
        payload = json.dumps(profile_to_dict(profile), sort_keys=True, indent=2)
        handle, temp_name = tempfile.mkstemp(
            prefix=f".{profile.user_id}.", suffix=".tmp", dir=self._root
        )
        try:
            with os.fdopen(handle, "w", encoding="utf-8") as temp:
                temp.write(payload)
                temp.flush()
                os.fsync(temp.fileno())
            os.replace(temp_name, target)
        except BaseException:
            Path(temp_name).unlink(missing_ok=True)
            raise
        logger.info(f"Stored profile of user '{profile.user_id}' at {target}.")

    @with_profile_lock()
    def save(self, profile: UserProfile):
        """Write a profile, replacing any previous one of the same user."""
        self._write(profile)

    @with_profile_lock()
    def update_threshold(self, user_id: str, threshold: float) -> UserProfile:
        """
        Replace the stored threshold of a user.

        :returns The updated profile.

        :raises ProfileError if there is no profile or the threshold is out of range.
        """
        updated = replace(self.load(user_id), threshold=threshold)
        self._write(updated)
        return updated
