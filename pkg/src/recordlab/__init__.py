"""Maxima of exponential samples under l1 norm: simulation and asymptotics."""
