"""Test-session configuration.

Nothing to configure beyond pytest defaults; this file anchors the tests
directory on sys.path so the shared helpers module imports by name.
"""
