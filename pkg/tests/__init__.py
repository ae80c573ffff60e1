"""Tests for the hexufs evaluator."""
