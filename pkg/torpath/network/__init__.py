"""Relay populations, regions and model parameters."""
