"""Path-selection strategies."""
