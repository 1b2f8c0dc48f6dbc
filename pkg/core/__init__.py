"""Nambu dynamics toolkit: core numerics.

Entropy functionals on probability vectors, Hermitian and density matrix
algebra, entropy generators, the triple bracket and the integrator. Every
function is pure apart from optional trace spans; nothing here reads files.
"""
