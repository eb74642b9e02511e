"""Circuit records and their metrics."""
