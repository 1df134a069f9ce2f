"""
A module containing the machine-readable lines the command-line tools print.

The verdict line of `verify` and the EER line of `calibrate` have a fixed grammar of
space-separated `key=value` pairs. Summaries (e.g. the template summary of `enroll`)
are single-line JSON records. None of them carry a timestamp, so a rerun on the same
inputs prints the same bytes.
"""

# Python imports
from typing import Any
import json

# Our imports
from gesturelive.matching.decision import LivenessDecision

RECORD_SIGNATURE = "gesturelive_record_v1"


def format_verdict_line(decision: LivenessDecision) -> str:
    """
    Format a liveness decision as its verdict line.

    For example: `score=0.912345 threshold=0.500000 verdict=Live mode=combined
    coverage=1.000`.
    """
    return (
        f"score={decision.score:.6f} threshold={decision.threshold:.6f} "
        f"verdict={decision.verdict.value} mode={decision.feature_mode.value} "
        f"coverage={decision.coverage:.3f}"
    )


def format_eer_line(mode: str, eer: float, threshold: float, accuracy: float) -> str:
    """Format the operating point of one feature mode as its EER line."""
    return (
        f"mode={mode} eer={eer:.3f} threshold={threshold:.6f} accuracy={accuracy:.3f}"
    )


def generate_record(command: str, **fields: Any) -> str:
    """
    Generate a single-line JSON summary record.

    :param command: The subcommand the record summarizes.
    :param fields: The content of the record; values must be JSON-serializable.

    :returns The record, with sorted keys.
    """
    return json.dumps(
        {"signature": RECORD_SIGNATURE, "command": command, **fields}, sort_keys=True
    )
