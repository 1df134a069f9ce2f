"""
Contain command-line helpers: exit codes, output records and profile locking.
"""
