"""Gradient, optimizer and random-stream plumbing."""
