"""Tests for gmcf_translate."""
