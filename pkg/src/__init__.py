"""Lattice Boltzmann schemes as finite-difference schemes."""
