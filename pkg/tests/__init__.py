"""
tokbench Test Suite

This package contains all tests for the tokbench components and CLI.
"""
