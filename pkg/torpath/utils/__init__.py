"""Logging, command-line, profiling and file helpers."""
