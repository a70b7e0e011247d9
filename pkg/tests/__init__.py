"""Test suite for implylp."""
