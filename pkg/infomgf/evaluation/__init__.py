"""Downstream evaluation, perturbations, statistics and synthetic data."""
