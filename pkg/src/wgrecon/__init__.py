"""Exact learning of weighted, possibly disconnected graphs from oracle queries."""

__version__ = "0.1.0"
