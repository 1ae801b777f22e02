"""Tests for koszul-truncation."""
