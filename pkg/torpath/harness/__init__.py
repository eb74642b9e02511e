"""Scenario matrix execution and aggregation."""
