"""Tests for Python Time & Space Complexity documentation."""
