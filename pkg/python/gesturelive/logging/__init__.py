"""The logging configuration of the package."""
