"""
Two photons in two modes: the simulation building blocks
=========================================================

A fixed-photon-number simulator needs three ingredients: the occupation
basis of the photon sector, the lift of a 2x2 mode unitary onto that
basis, and readout of outcome probabilities.  This script walks through
all three and reproduces the signature two-photon effect: photons
entering a balanced splitter on separate ports always leave together.
"""

import numpy as np

from smoptics import fock

# The sector of 2 photons in 2 modes has three occupations, listed in
# descending lexicographic order.
sector = fock.sector_basis(modes=2, photons=2)
print("basis:", sector.basis)

# A phase shifter multiplies each occupation by exp(i * k * phi) where k
# is the photon count in the shifted mode - |2,0> picks up twice the
# phase of |1,1>.
state = fock.basis_state(sector, (2, 0))
shifted = fock.apply_phase_shifter(state, mode=0, phase=np.pi / 2)
print("|2,0> phase factor at phi=pi/2:", shifted.amplitudes[0])  # exp(i*pi) = -1

# A balanced splitter mixes the two modes.  On the single-photon level it
# is a 2x2 unitary; on the two-photon sector it becomes a 3x3 matrix
# whose entries are matrix permanents.
splitter = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)
lifted = fock.lift_mode_unitary(splitter, sector)
print("\nlifted splitter:\n", np.round(lifted, 6))

# Send one photon into each port and read out the outcome distribution.
both_ports = fock.basis_state(sector, (1, 1))
out = fock.StateVector(sector, lifted @ both_ports.amplitudes)
for occupation in sector.basis:
    print(f"p{occupation} = {fock.outcome_probability(out, occupation):.6f}")

# The coincidence outcome (1,1) has probability zero: its amplitude is
# the permanent of the full splitter matrix, 1*1 + (i)*(i) = 0.  The
# photons bunch, half the time into each output port.
