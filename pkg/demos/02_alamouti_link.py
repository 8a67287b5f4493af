"""
One Alamouti block over a selected channel
==========================================

Walks through a single transmission: draw the beams, keep the strongest one
per link, encode two QPSK symbols, add noise and combine.
"""

# %%
import numpy as np

from ramimo import (
    QPSK,
    alamouti_decode,
    alamouti_encode,
    branch_gains,
    demodulate,
    instantaneous_snr,
    make_uniform_topology,
    modulate,
    sample_channel,
    select_optimal,
    substream,
    transmit,
)

rng = substream(2024, 0)
topo = make_uniform_topology(2, 2, 6)  # 3 beams on each of the 4 links
realization = sample_channel(topo, rng)
effective = select_optimal(realization)
print("selected beams (1-based):\n", effective.selected_index)
print("branch gains:\n", branch_gains(effective).round(3))

# %%
# The codeword's columns are orthogonal, which is what makes the linear
# combiner optimal.
bits = np.array([0, 1, 1, 0])
s = modulate(bits, QPSK)
X = alamouti_encode(s[0], s[1])
print("X^H X =\n", (X.conj().T @ X).round(12))

# %%
snr0 = 10 ** (5 / 10)
Y = transmit(effective, X, snr0, rng)
s1, s2 = alamouti_decode(Y, effective)
print("sent bits    ", bits)
print("decided bits ", demodulate(np.array([s1, s2]), QPSK))
print("post-combining SNR", instantaneous_snr(branch_gains(effective), snr0))
