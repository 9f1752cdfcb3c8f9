"""Domain services: random streams, DE engine, experiments, analytics, plots."""
