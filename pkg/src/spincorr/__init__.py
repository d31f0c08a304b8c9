"""Quantum correlation and thermal entanglement in two-qubit spin models."""
