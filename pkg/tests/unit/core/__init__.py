"""Unit tests for core domain layer."""
