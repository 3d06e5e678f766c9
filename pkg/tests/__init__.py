"""Test suite for capparelli_check."""
