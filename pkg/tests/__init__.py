"""Tests for levelstat."""
