"""Random and max-gain beam selection per link.

Every link ``(n, m)`` keeps exactly one of its ``B[n][m]`` beams. Beam
indices are reported 1-based to match the beam numbering ``k = 1..B``.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EffectiveChannel",
    "select_random",
    "select_optimal",
    "select",
    "branch_gains",
    "instantaneous_snr",
]


@dataclass(frozen=True)
class EffectiveChannel:
    """Selected gains ``matrix[..., n, m]`` and the 1-based beam indices."""

    matrix: np.ndarray
    selected_index: np.ndarray
    topology: object

    @property
    def shape(self):
        return self.matrix.shape[-2:]


def _gather(realization, index0):
    topo = realization.topology
    batch = realization.batch_shape
    matrix = np.empty(batch + topo.shape, dtype=complex)
    for n, m, _ in topo.links():
        g = realization.gains[n][m]
        k = index0[..., n, m]
        matrix[..., n, m] = np.take_along_axis(g, k[..., None], axis=-1)[..., 0]
    return EffectiveChannel(matrix, index0 + 1, topo)


def select_random(realization, rng=None, uniforms=None):
    """Pick one beam per link uniformly at random.

    Parameters
    ----------
    realization : ChannelRealization
    rng : numpy.random.Generator, optional
        Source of the selection draws.
    uniforms : ndarray, optional
        Pre-drawn uniforms on [0, 1) of shape ``batch + (N_B, M)``; used
        instead of ``rng`` when given.
    """
    topo = realization.topology
    shape = realization.batch_shape + topo.shape
    if uniforms is None:
        if rng is None:
            raise ValueError("select_random needs either rng or uniforms")
        uniforms = rng.random(shape)
    elif uniforms.shape != shape:
        raise ValueError(f"uniforms must have shape {shape}, got {uniforms.shape}")
    counts = topo.as_array()
    index0 = np.minimum(np.floor(uniforms * counts).astype(np.intp), counts - 1)
    return _gather(realization, index0)


def select_optimal(realization):
    """Pick the beam with the largest ``|h|^2`` on each link.

    Exact ties go to the smallest beam index.
    """
    topo = realization.topology
    index0 = np.empty(realization.batch_shape + topo.shape, dtype=np.intp)
    for n, m, _ in topo.links():
        power = np.abs(realization.gains[n][m]) ** 2
        index0[..., n, m] = np.argmax(power, axis=-1)
    return _gather(realization, index0)


def select(realization, policy, rng=None, uniforms=None):
    """Dispatch on ``policy`` (``"optimal"`` or ``"random"``)."""
    if policy == "optimal":
        return select_optimal(realization)
    if policy == "random":
        return select_random(realization, rng, uniforms)
    raise ValueError(f"unknown selection policy {policy!r}; expected 'optimal' or 'random'")


def branch_gains(effective):
    """Power gains ``|matrix|^2`` of the selected branches."""
    matrix = effective.matrix if isinstance(effective, EffectiveChannel) else np.asarray(effective)
    return np.abs(matrix) ** 2


def instantaneous_snr(gains, snr0):
    """Post-combining SNR ``snr0 * sum(gains)`` over the last two axes."""
    if snr0 < 0:
        raise ValueError(f"snr0 must be non-negative, got {snr0}")
    return snr0 * np.sum(gains, axis=(-2, -1))
