"""Closed-form results for max-gain beam selection.

The largest of ``B`` unit-mean exponential gains has CDF ``(1 - e^-z)^B``
and mean equal to the harmonic number ``H_B``. From these follow the
average post-selection SNRs, the selection gain in dB and a conditional-Q
BER estimator that needs only the distribution of the combined SNR.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .beam_selection import branch_gains, instantaneous_snr, select
from .channel import sample_channel
from .stbc import get_constellation

__all__ = [
    "GainReportRow",
    "max_gain_pdf",
    "max_gain_cdf",
    "expected_max_gain",
    "avg_snr_random",
    "avg_snr_optimal",
    "selection_gain_db",
    "gain_table",
    "gaussian_tail",
    "conditional_ber",
    "semi_analytic_ber",
]


def _check_beams(beams):
    if int(beams) != beams or beams < 1:
        raise ValueError(f"number of beams must be a positive integer, got {beams}")
    return int(beams)


def _check_snr(snr0):
    if snr0 < 0:
        raise ValueError(f"snr0 must be non-negative, got {snr0}")


def max_gain_pdf(z, beams):
    """Density of the maximum of ``beams`` i.i.d. unit-mean exponentials."""
    beams = _check_beams(beams)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("z must be non-negative")
    return beams * (-np.expm1(-z)) ** (beams - 1) * np.exp(-z)


def max_gain_cdf(z, beams):
    beams = _check_beams(beams)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("z must be non-negative")
    return (-np.expm1(-z)) ** beams


def expected_max_gain(beams):
    """Mean of the best of ``beams`` unit-mean exponential gains.

    Evaluated as the harmonic number ``sum_{k=1}^{B} 1/k``; the equivalent
    alternating binomial sum loses all precision for large ``B``.
    """
    beams = _check_beams(beams)
    return float(np.sum(1.0 / np.arange(beams, 0, -1)))


def avg_snr_random(topology, snr0):
    """Average SNR under random selection, ``snr0 * M * N_B``."""
    _check_snr(snr0)
    return snr0 * topology.num_tx_antennas * topology.num_rx_beams


def avg_snr_optimal(topology, snr0):
    _check_snr(snr0)
    return snr0 * sum(expected_max_gain(b) for _, _, b in topology.links())


def selection_gain_db(topology):
    """Average-SNR gain of optimal over random selection in dB.

    For heterogeneous topologies this is the ratio of the summed expected
    branch gains to ``M * N_B``; with equal ``B`` on every link it reduces
    to ``10 log10(H_B)``.
    """
    total = sum(expected_max_gain(b) for _, _, b in topology.links())
    return 10.0 * np.log10(total / (topology.num_tx_antennas * topology.num_rx_beams))


@dataclass(frozen=True)
class GainReportRow:
    beams_per_link: int
    expected_max: float
    gain_db: float


def gain_table(beam_counts):
    """One :class:`GainReportRow` per uniform per-link beam count."""
    rows = []
    for b in beam_counts:
        e = expected_max_gain(b)
        rows.append(GainReportRow(int(b), e, 10.0 * np.log10(e)))
    return rows


def gaussian_tail(x):
    """Standard normal upper-tail probability ``Q(x)``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def conditional_ber(snr, modulation):
    """Bit error probability of Gray BPSK/QPSK at post-combining SNR ``snr``.

    ``snr`` is the SNR per symbol after Alamouti combining; the symbol has
    unit energy, so BPSK gives ``Q(sqrt(2 snr))`` and each QPSK bit
    ``Q(sqrt(snr))``.
    """
    name = get_constellation(modulation).name
    snr = np.asarray(snr, dtype=float)
    if name == "bpsk":
        return gaussian_tail(np.sqrt(2.0 * snr))
    if name == "qpsk":
        return gaussian_tail(np.sqrt(snr))
    raise ValueError(f"no conditional BER for modulation {name!r}")


def semi_analytic_ber(topology, selection, modulation, snr0, samples, rng, full_output=False):
    """BER averaged over sampled channels using the exact conditional BER.

    Parameters
    ----------
    topology : BeamTopology
        Must have two transmit antennas.
    selection : {"optimal", "random"}
    modulation : str or Constellation
        ``"bpsk"`` or ``"qpsk"``.
    snr0 : float
        Linear SNR scale.
    samples : int
        Number of channel draws, at least 10**4.
    rng : numpy.random.Generator
    full_output : bool, optional
        Also return the standard error of the average.

    Returns
    -------
    ber : float
    stderr : float
        Only when ``full_output`` is true.
    """
    if topology.num_tx_antennas != 2:
        raise ValueError("semi-analytic BER is defined for the two-antenna Alamouti system")
    if samples < 10_000:
        raise ValueError(f"samples must be at least 10000, got {samples}")
    _check_snr(snr0)
    get_constellation(modulation)
    realization = sample_channel(topology, rng, size=int(samples))
    effective = select(realization, selection, rng)
    gamma = instantaneous_snr(branch_gains(effective), snr0)
    p = conditional_ber(gamma, modulation)
    ber = float(np.mean(p))
    if full_output:
        return ber, float(np.std(p, ddof=1) / np.sqrt(p.size))
    return ber
