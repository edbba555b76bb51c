"""Test suite for intentgen."""
