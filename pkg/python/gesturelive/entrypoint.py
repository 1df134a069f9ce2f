"""
This is the entrypoint of the command-line tools.

The script gets called with a subcommand, e.g. `verify`, followed by its arguments. It
loads the run configuration (defaults, then the TOML file of `--config`, then the
global flags), runs the subcommand and turns its outcome into the exit code:
0 for success or a Live verdict, 1 for an Attack verdict, 2 for any error and 3 for an
enrollment that does not meet the quality requirements.
"""

# Setup logging first thing to make sure all logs happen under the right setup. The
# reason for needing this is that typically a `logger` object is defined at the top
# of the module and is used through out it. So, if we import a module before logging
# is setup, its `logger` object will not have the right setup.
# ruff: noqa: E402
# fmt: off
import logging.config
from gesturelive.logging.config import LOGGING_CONFIG
logging.config.dictConfig(LOGGING_CONFIG)
# fmt: on

# Python imports
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence
import argparse
import csv
import logging
import sys

# Our imports
from gesturelive.beamform.das import delay_and_sum, steer_search
from gesturelive.beamform.geometry import SteeringDirection, load_geometry
from gesturelive.config.environ import get_environ_config_path
from gesturelive.config.run_config import RunConfig, load_run_config
from gesturelive.errors import GestureLiveError
from gesturelive.evaluation import evaluate_manifest
from gesturelive.features.contours import contour_set_to_json
from gesturelive.matching import EnrollmentError
from gesturelive.matching.decision import FeatureMode, Verdict
from gesturelive.matching.profile import ProfileMode, ProfileStore, UserProfile
from gesturelive.pipeline import (
    analyze_file,
    build_profile,
    default_geometry,
    target_frames,
    verify,
)
from gesturelive.signal.audio import read_wav, write_wav
from gesturelive.signal.probe import generate_probe
from gesturelive.sim.corpus import ATTACK_KINDS, TrialKind, generate_corpus
from gesturelive.utils.cmd import (
    EXIT_ATTACK,
    EXIT_ENROLLMENT,
    EXIT_ERROR,
    EXIT_OK,
    abort,
)
from gesturelive.utils.records import (
    format_eer_line,
    format_verdict_line,
    generate_record,
)

# Usually, we pass the `__name__` variable instead as that defaults to the
# module path, i.e. `gesturelive.entrypoint` in this case. However, since this is
# the entrypoint script, `__name__` will have the value of `__main__`, hence
# we hard-code the module path.
logger = logging.getLogger("gesturelive.entrypoint")


def _store(config: RunConfig) -> ProfileStore:
    return ProfileStore(config.profile_store_path)


def _emit(line: str):
    sys.stdout.write(line + "\n")
    sys.stdout.flush()


def _direction(args: argparse.Namespace) -> SteeringDirection | None:
    if args.azimuth is None:
        return None
    return SteeringDirection(args.azimuth)


def cmd_enroll(args: argparse.Namespace, config: RunConfig) -> int:
    """
    Enroll a user from their recordings and store the profile.

    Prints a one-line JSON summary of the templates.
    """
    if args.min_trials is not None:
        config = config.with_overrides({"min_trials": args.min_trials})
    mode = ProfileMode(args.mode)
    trials = [
        analyze_file(wav, config, use_alignment=not args.no_alignment).contours
        for wav in args.wavs
    ]
    profile, excluded = build_profile(args.user_id, mode, trials, config)
    for label in excluded:
        logger.warning(f"Phoneme '{label}' left out of the profile of {args.user_id}.")
    _store(config).save(profile)
    if mode is ProfileMode.TEXT_DEPENDENT:
        template = profile.primary_passphrase()
        summary = generate_record(
            "enroll",
            user=profile.user_id,
            mode=mode.value,
            trials=template.trial_count,
            phonemes=list(template.phoneme_labels),
            frames_per_phoneme=list(template.contours.frames_per_phoneme),
        )
    else:
        summary = generate_record(
            "enroll",
            user=profile.user_id,
            mode=mode.value,
            trials=len(trials),
            weights={k: t.weight for k, t in sorted(profile.phoneme_templates.items())},
            excluded=excluded,
        )
    _emit(summary)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    """Verify one recording against a stored profile and print the verdict line."""
    profile = _store(config).load(args.user_id)
    geometry = load_geometry(args.geometry) if args.geometry else None
    analysis = analyze_file(
        args.wav,
        config,
        use_alignment=not args.no_alignment,
        geometry=geometry,
        direction=_direction(args),
        frames_per_phoneme=target_frames(profile),
    )
    decision = verify(profile, analysis.contours, config)
    _emit(format_verdict_line(decision))
    return EXIT_OK if decision.verdict is Verdict.LIVE else EXIT_ATTACK


def cmd_simulate(args: argparse.Namespace, config: RunConfig) -> int:
    """Generate a synthetic corpus with its manifest."""
    entries = generate_corpus(
        args.output,
        args.users,
        args.trials,
        config.seed,
        sample_rate=config.sample_rate,
        n_attacks=args.attacks,
        attack_kinds=[TrialKind(k) for k in args.attack_kinds],
        probe_f0=config.probe_f0,
        noise_snr_db=None if args.no_noise else args.snr,
        array=default_geometry(config) if args.array else None,
        doppler_factor_k=config.doppler_factor_k,
        speed_of_sound=config.speed_of_sound,
    )
    _emit(generate_record("simulate", root=str(args.output), recordings=len(entries)))
    return EXIT_OK


def _updated_profile(
    store: ProfileStore, profile: UserProfile, threshold: float
) -> UserProfile:
    if store.exists(profile.user_id):
        return store.update_threshold(profile.user_id, threshold)
    updated = replace(profile, threshold=threshold)
    store.save(updated)
    return updated


def cmd_calibrate(args: argparse.Namespace, config: RunConfig) -> int:
    """
    Calibrate the decision threshold over a labeled corpus.

    Prints one EER line per feature mode (and per user with `--per-user`), optionally
    writes the ROC table and stores the thresholds in the profiles.
    """
    store = _store(config)
    result = evaluate_manifest(
        args.manifest,
        config,
        attack_kinds=[TrialKind(k) for k in args.attack_kinds],
        feature_modes=tuple(FeatureMode),
        store=store,
    )
    for mode in FeatureMode:
        outcome = result.modes[mode]
        _emit(
            format_eer_line(mode.value, outcome.eer, outcome.threshold, outcome.accuracy)
        )
    if args.per_user:
        for user, (threshold, eer) in sorted(result.per_user.items()):
            _emit(f"user={user} eer={eer:.3f} threshold={threshold:.6f}")
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(("mode", "threshold", "far", "frr"))
            for mode in FeatureMode:
                for threshold, far, frr in result.modes[mode].roc():
                    writer.writerow((mode.value, f"{threshold:.6f}", far, frr))
        logger.info(f"Wrote the ROC table to {args.output}.")
    if args.update_profiles:
        global_threshold = result.modes[config.mode].threshold
        for user, profile in sorted(result.profiles.items()):
            threshold = global_threshold
            if args.per_user and user in result.per_user:
                threshold = result.per_user[user][0]
            _updated_profile(store, profile, threshold)
            logger.info(f"Threshold of {user} set to {threshold:.6f}.")
    return EXIT_OK


def cmd_beamform(args: argparse.Namespace, config: RunConfig) -> int:
    """Beamform a multichannel recording into a single-channel WAV."""
    channels = read_wav(args.wav)
    geometry = load_geometry(args.geometry) if args.geometry else default_geometry(config)
    direction = _direction(args)
    if direction is None:
        direction, power = steer_search(channels, geometry)
        logger.info(
            f"Steering toward azimuth {direction.azimuth:.0f} deg (power {power:.3g})."
        )
    write_wav(delay_and_sum(channels, geometry, direction), args.output)
    return EXIT_OK


def cmd_export_contours(args: argparse.Namespace, config: RunConfig) -> int:
    """Export the contour set of a recording as JSON, to a file or stdout."""
    analysis = analyze_file(args.wav, config, use_alignment=not args.no_alignment)
    document = contour_set_to_json(analysis.contours)
    if args.output:
        Path(args.output).write_text(document + "\n", encoding="utf-8")
    else:
        _emit(document)
    return EXIT_OK


def cmd_probe(args: argparse.Namespace, config: RunConfig) -> int:
    """Write the probe tone to a WAV file."""
    probe = generate_probe(
        config.sample_rate, config.probe_f0, args.duration, config.probe_amplitude
    )
    write_wav(probe, args.output)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "enroll": cmd_enroll,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "beamform": cmd_beamform,
    "export-contours": cmd_export_contours,
    "probe": cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser of every subcommand."""
    parser = argparse.ArgumentParser(
        prog="gesturelive",
        description="Articulatory-gesture liveness detection for voice authentication.",
    )
    parser.add_argument("--config", help="A TOML file overriding the defaults.")
    parser.add_argument("--seed", type=int, help="The random seed.")
    parser.add_argument("--sample-rate", type=float, help="The sample rate in Hz.")
    parser.add_argument("--f0", type=float, help="The probe frequency in Hz.")
    parser.add_argument(
        "--feature-mode",
        choices=[m.value for m in FeatureMode],
        help="The contours the similarity score averages.",
    )
    parser.add_argument("--profile-store", help="The profile directory.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    enroll = subparsers.add_parser("enroll", help="Enroll a user.")
    enroll.add_argument("user_id")
    enroll.add_argument("wavs", nargs="+", help="The enrollment recordings.")
    enroll.add_argument(
        "--mode",
        choices=[m.value for m in ProfileMode],
        default=ProfileMode.TEXT_DEPENDENT.value,
    )
    enroll.add_argument("--min-trials", type=int)
    enroll.add_argument("--no-alignment", action="store_true")

    verify_parser = subparsers.add_parser("verify", help="Verify a recording.")
    verify_parser.add_argument("user_id")
    verify_parser.add_argument("wav")
    verify_parser.add_argument("--geometry", help="A JSON array geometry file.")
    verify_parser.add_argument("--azimuth", type=float)
    verify_parser.add_argument("--no-alignment", action="store_true")

    simulate = subparsers.add_parser("simulate", help="Generate a synthetic corpus.")
    simulate.add_argument("output", help="The corpus directory.")
    simulate.add_argument("--users", type=int, default=2)
    simulate.add_argument("--trials", type=int, default=3)
    simulate.add_argument("--attacks", type=int, default=1)
    simulate.add_argument(
        "--attack-kinds",
        nargs="+",
        choices=[k.value for k in ATTACK_KINDS],
        default=[TrialKind.PLAYBACK.value, TrialKind.MIMICRY.value],
    )
    simulate.add_argument("--snr", type=float, default=30.0)
    simulate.add_argument("--no-noise", action="store_true")
    simulate.add_argument(
        "--array", action="store_true", help="Render 7-channel array recordings."
    )

    calibrate = subparsers.add_parser("calibrate", help="Calibrate the threshold.")
    calibrate.add_argument("manifest")
    calibrate.add_argument("--output", help="Write the ROC table to this CSV file.")
    calibrate.add_argument(
        "--attack-kinds",
        nargs="+",
        choices=[k.value for k in ATTACK_KINDS],
        default=[k.value for k in ATTACK_KINDS],
    )
    calibrate.add_argument("--per-user", action="store_true")
    calibrate.add_argument("--update-profiles", action="store_true")

    beamform = subparsers.add_parser("beamform", help="Beamform an array recording.")
    beamform.add_argument("wav")
    beamform.add_argument("output")
    beamform.add_argument("--geometry", help="A JSON array geometry file.")
    beamform.add_argument("--azimuth", type=float)

    export = subparsers.add_parser("export-contours", help="Export contours as JSON.")
    export.add_argument("wav")
    export.add_argument("--output")
    export.add_argument("--no-alignment", action="store_true")

    probe = subparsers.add_parser("probe", help="Write the probe tone.")
    probe.add_argument("output")
    probe.add_argument("--duration", type=float, default=1.0)
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {
        "seed": args.seed,
        "sample_rate": args.sample_rate,
        "probe_f0": args.f0,
        "feature_mode": args.feature_mode,
        "profile_store_path": args.profile_store,
    }
    return load_run_config(args.config or get_environ_config_path(), overrides)


def _run(argv: Sequence[str]) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        return COMMANDS[args.command](args, config)
    except EnrollmentError as ex:
        abort(f"Enrollment failed: {ex}", EXIT_ENROLLMENT)
    except (GestureLiveError, OSError, ValueError) as ex:
        abort(f"{args.command} failed: {ex}", EXIT_ERROR)


def main(argv: List[str] | None = None) -> int:
    """
    Run the command line and return its exit code.

    :param argv: The arguments, without the program name; defaults to sys.argv.
    """
    try:
        return _run(sys.argv[1:] if argv is None else argv)
    except SystemExit as ex:
        if isinstance(ex.code, int):
            return ex.code
        return EXIT_OK if ex.code is None else EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
