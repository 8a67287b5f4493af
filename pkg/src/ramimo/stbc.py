"""Gray-mapped BPSK/QPSK and the Alamouti code over the selected channel.

Codewords are stored time slot by antenna: row ``t`` holds what the two
antennas send in slot ``t``. A received block is receive beam by time slot,
``Y[n, t] = sqrt(snr0) * sum_m H[n, m] X[t, m] + W[n, t]``.

Every function accepts leading batch axes.
"""

from dataclasses import dataclass

import numpy as np

from .beam_selection import EffectiveChannel
from .channel import complex_normal

__all__ = [
    "Constellation",
    "BPSK",
    "QPSK",
    "get_constellation",
    "modulate",
    "demodulate",
    "alamouti_encode",
    "transmit",
    "alamouti_decode",
]


@dataclass(frozen=True)
class Constellation:
    """Unit-energy constellation; ``bit_labels[i]`` is the Gray label of ``points[i]``."""

    name: str
    points: np.ndarray
    bit_labels: tuple

    @property
    def bits_per_symbol(self):
        return len(self.bit_labels[0])

    @property
    def size(self):
        return len(self.points)

    def label_matrix(self):
        return np.array(self.bit_labels, dtype=np.int8)


BPSK = Constellation("bpsk", np.array([1.0 + 0j, -1.0 + 0j]), ((0,), (1,)))

# index = integer value of the label; first bit picks the imaginary sign,
# second bit the real sign
QPSK = Constellation(
    "qpsk",
    np.array([1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j]) / np.sqrt(2),
    ((0, 0), (0, 1), (1, 0), (1, 1)),
)

_CONSTELLATIONS = {"bpsk": BPSK, "qpsk": QPSK}


def get_constellation(name):
    if isinstance(name, Constellation):
        return name
    try:
        return _CONSTELLATIONS[str(name).lower()]
    except KeyError:
        raise ValueError(f"unsupported modulation {name!r}; expected one of {sorted(_CONSTELLATIONS)}") from None


def modulate(bits, constellation):
    """Map groups of bits (last axis) to constellation points.

    Raises
    ------
    ValueError
        If the number of bits is not a multiple of ``bits_per_symbol``.
    """
    constellation = get_constellation(constellation)
    bits = np.asarray(bits)
    k = constellation.bits_per_symbol
    if bits.shape[-1] % k:
        raise ValueError(
            f"{bits.shape[-1]} bits cannot be grouped into {constellation.name} symbols of {k} bits"
        )
    groups = bits.reshape(bits.shape[:-1] + (-1, k)).astype(np.intp)
    weights = 1 << np.arange(k - 1, -1, -1)
    return constellation.points[groups @ weights]


def demodulate(soft, constellation):
    """Minimum-distance detection back to bits.

    Bits of consecutive symbols along the last axis are concatenated, so an
    input of shape ``(..., S)`` gives ``(..., S * k)``; a scalar gives
    ``(k,)``. Equidistant points resolve to the lowest point index.
    """
    constellation = get_constellation(constellation)
    soft = np.asarray(soft)
    scalar = soft.ndim == 0
    soft = np.atleast_1d(soft)
    dist = np.abs(soft[..., None] - constellation.points) ** 2
    idx = np.argmin(dist, axis=-1)
    bits = constellation.label_matrix()[idx]
    bits = bits.reshape(soft.shape[:-1] + (-1,))
    return bits if not scalar else bits.reshape(-1)


def alamouti_encode(s1, s2):
    """Alamouti codeword ``[[s1, s2], [-conj(s2), conj(s1)]]``."""
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    row0 = np.stack([s1, s2], axis=-1)
    row1 = np.stack([-np.conj(s2), np.conj(s1)], axis=-1)
    return np.stack([row0, row1], axis=-2)


def _matrix(effective):
    return effective.matrix if isinstance(effective, EffectiveChannel) else np.asarray(effective)


def transmit(effective, codeword, snr0, rng=None, noise=None):
    """Send one codeword over the selected channel.

    Parameters
    ----------
    effective : EffectiveChannel or ndarray
        Channel matrix of shape ``(..., N_B, 2)``.
    codeword : ndarray
        Output of :func:`alamouti_encode`.
    snr0 : float
        Average received SNR scale (linear).
    rng : numpy.random.Generator, optional
        Noise source. ``None`` together with ``noise=None`` transmits
        without noise.
    noise : ndarray, optional
        Pre-drawn noise of shape ``(..., N_B, 2)``.

    Returns
    -------
    ndarray
        Received block of shape ``(..., N_B, 2)``.
    """
    H = _matrix(effective)
    if H.shape[-1] != 2:
        raise ValueError(f"Alamouti transmission needs exactly 2 transmit antennas, got {H.shape[-1]}")
    if snr0 < 0:
        raise ValueError(f"snr0 must be non-negative, got {snr0}")
    X = np.asarray(codeword)
    Y = np.sqrt(snr0) * (H @ np.swapaxes(X, -1, -2))
    if noise is None and rng is not None:
        noise = complex_normal(rng, Y.shape)
    if noise is not None:
        Y = Y + noise
    return Y


def alamouti_decode(received, effective):
    """Linear Alamouti combiner normalized by the channel energy.

    Returns ``(s1_hat, s2_hat)``. With no noise and ``snr0 = 1`` these equal
    the transmitted symbols; in general they are ``sqrt(snr0) * s`` plus
    complex Gaussian noise of variance ``1 / sum|H|^2``.
    """
    H = _matrix(effective)
    Y = np.asarray(received)
    if Y.shape[-2:] != (H.shape[-2], 2):
        raise ValueError(f"received block shape {Y.shape} does not match channel {H.shape}")
    energy = np.sum(np.abs(H) ** 2, axis=(-2, -1))
    if np.any(energy <= 0):
        raise ValueError("channel has zero energy; block is undecodable")
    h1, h2 = H[..., 0], H[..., 1]
    y1, y2 = Y[..., 0], np.conj(Y[..., 1])
    s1 = np.sum(np.conj(h1) * y1 + h2 * y2, axis=-1) / energy
    s2 = np.sum(np.conj(h2) * y1 - h1 * y2, axis=-1) / energy
    return s1, s2
