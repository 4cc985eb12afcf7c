"""Attacker/defender reinforcement-learning game on a simulated software-defined network."""

__version__ = "0.1.0"
