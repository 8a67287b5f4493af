"""
Average SNR gain of max-gain beam selection
===========================================

Each transmit antenna steers ``M_B`` beams that are split evenly over the
``N_B`` receive beams. Picking the strongest beam per link instead of a
random one raises the average SNR by ``10 log10(H_B)`` dB, where ``H_B`` is
the harmonic number of the per-link beam count ``B = M_B / N_B``.
"""

# %%
# Closed form
# -----------
import numpy as np

from ramimo import estimate_selection_gain_mc, make_uniform_topology, selection_gain_db

m_b_values = range(1, 9)
for n_b in (1, 2, 4):
    gains = [
        selection_gain_db(make_uniform_topology(2, n_b, m_b))
        for m_b in m_b_values if m_b % n_b == 0
    ]
    print(f"N_B={n_b}: " + "  ".join(f"{g:6.3f}" for g in gains))

# %%
# Monte Carlo check
# -----------------
# Both policies are applied to the same channel draws; the standard error
# comes from the delta method on the ratio of mean SNRs.
for m_b, n_b in [(2, 1), (4, 1), (8, 2)]:
    topo = make_uniform_topology(2, n_b, m_b)
    gain, se = estimate_selection_gain_mc(topo, 100_000, seed=1)
    print(f"M_B={m_b} N_B={n_b}: {gain:.3f} +- {se:.3f} dB (analytic {selection_gain_db(topo):.3f})")

# %%
# Plot, if matplotlib is around
# -----------------------------
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    for n_b in (1, 2, 4):
        m_b = np.arange(n_b, 17, n_b)
        ax.plot(m_b, [selection_gain_db(make_uniform_topology(2, n_b, int(m))) for m in m_b], "o-",
                label=f"N_B = {n_b}")
    ax.set_xlabel("M_B")
    ax.set_ylabel("gain [dB]")
    ax.legend()
    fig.savefig("selection_gain.png", dpi=120)
