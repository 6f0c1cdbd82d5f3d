"""Command line entry points of slidingdg."""
