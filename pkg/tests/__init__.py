"""Tests for the nvqrao package."""
