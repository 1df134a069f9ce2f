"""
Articulatory-gesture liveness detection for voice authentication.

The package senses the Doppler shifts a speaker's articulators impose on an inaudible
probe tone, turns them into contour features and compares those against enrolled
templates to tell a live talker from a loudspeaker replay.
"""
