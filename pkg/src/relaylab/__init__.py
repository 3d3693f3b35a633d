"""Desk-scale laboratory for relay and circuit selection in anonymity networks.

Provides a static network model, weighted path construction mixing bandwidth
and geographic distance, a circuit pool with performance-based stream
attachment, a deterministic event simulator, and the security metrics used
to evaluate all of it (Gini, entropy, compromise experiments).
"""

__version__ = "0.1.0"
