"""Beam topology and i.i.d. Rayleigh channel realizations.

A transmit antenna ``m`` steers ``M_B`` narrow beams. Each of them is
captured by exactly one of the ``N_B`` wide receive beams, so the beams of
antenna ``m`` are partitioned into the sets ``B[n][m]``. A channel
realization holds one complex gain per beam of every set.

All sampling functions accept an optional ``size`` so that a whole batch of
independent realizations can be drawn at once; the batch axes are always
leading axes.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BeamTopology",
    "ChannelRealization",
    "make_uniform_topology",
    "topology_from_matrix",
    "sample_channel",
    "substream",
    "complex_normal",
]


@dataclass(frozen=True)
class BeamTopology:
    """Partition of transmit beams among receive beams.

    Parameters
    ----------
    num_tx_antennas : int
        Number of transmit reconfigurable antennas ``M``.
    num_rx_beams : int
        Number of receive beams ``N_B``.
    beams_per_link : tuple of tuple of int
        ``beams_per_link[n][m]`` is the number of beams from transmit
        antenna ``m`` captured by receive beam ``n``.
    """

    num_tx_antennas: int
    num_rx_beams: int
    beams_per_link: tuple

    def __post_init__(self):
        if self.num_tx_antennas < 1:
            raise ValueError(f"num_tx_antennas must be >= 1, got {self.num_tx_antennas}")
        if self.num_rx_beams < 1:
            raise ValueError(f"num_rx_beams must be >= 1, got {self.num_rx_beams}")
        rows = tuple(tuple(int(b) for b in row) for row in self.beams_per_link)
        if len(rows) != self.num_rx_beams or any(len(r) != self.num_tx_antennas for r in rows):
            raise ValueError(
                f"beams_per_link must be {self.num_rx_beams}x{self.num_tx_antennas}, "
                f"got {[len(r) for r in rows]}"
            )
        for n, row in enumerate(rows):
            for m, b in enumerate(row):
                if b < 1:
                    raise ValueError(f"beams_per_link[{n}][{m}] must be >= 1, got {b}")
        budgets = {sum(rows[n][m] for n in range(self.num_rx_beams)) for m in range(self.num_tx_antennas)}
        if len(budgets) != 1:
            raise ValueError(
                f"every transmit antenna must steer the same number of beams, got column sums {sorted(budgets)}"
            )
        object.__setattr__(self, "beams_per_link", rows)

    @property
    def beam_budget(self):
        """Beams steered by each transmit antenna (``M_B``)."""
        return sum(row[0] for row in self.beams_per_link)

    @property
    def shape(self):
        return (self.num_rx_beams, self.num_tx_antennas)

    @property
    def total_beams(self):
        return sum(sum(row) for row in self.beams_per_link)

    @property
    def is_uniform(self):
        first = self.beams_per_link[0][0]
        return all(b == first for row in self.beams_per_link for b in row)

    def as_array(self):
        return np.array(self.beams_per_link, dtype=int)

    def links(self):
        """Iterate over ``(n, m, B[n][m])`` in row-major order."""
        for n, row in enumerate(self.beams_per_link):
            for m, b in enumerate(row):
                yield n, m, b


def make_uniform_topology(num_tx_antennas, num_rx_beams, beams_per_tx_antenna):
    """Split ``beams_per_tx_antenna`` evenly over the receive beams.

    Raises
    ------
    ValueError
        If a count is below one or the split is not exact.
    """
    for name, value in (
        ("num_tx_antennas", num_tx_antennas),
        ("num_rx_beams", num_rx_beams),
        ("beams_per_tx_antenna", beams_per_tx_antenna),
    ):
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value}")
    per_link, remainder = divmod(int(beams_per_tx_antenna), int(num_rx_beams))
    if remainder:
        raise ValueError(
            f"M_B not divisible by N_B: {beams_per_tx_antenna} beams over "
            f"{num_rx_beams} receive beams leaves remainder {remainder}"
        )
    row = (per_link,) * int(num_tx_antennas)
    return BeamTopology(int(num_tx_antennas), int(num_rx_beams), (row,) * int(num_rx_beams))


def topology_from_matrix(beams_per_link):
    """Build a topology from an explicit ``N_B x M`` matrix of beam counts."""
    rows = [list(r) for r in beams_per_link]
    if not rows or not rows[0]:
        raise ValueError("beams_per_link matrix must be non-empty")
    return BeamTopology(len(rows[0]), len(rows), tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class ChannelRealization:
    """Complex gains of every beam, ``gains[n][m]`` has shape ``batch + (B[n][m],)``."""

    gains: tuple
    topology: BeamTopology

    def __post_init__(self):
        topo = self.topology
        if len(self.gains) != topo.num_rx_beams:
            raise ValueError("gains do not match the topology")
        batch = None
        for n, m, b in topo.links():
            g = self.gains[n][m]
            if g.shape[-1:] != (b,):
                raise ValueError(f"link ({n}, {m}) holds {g.shape[-1:]} gains, expected {b}")
            if batch is None:
                batch = g.shape[:-1]
            elif g.shape[:-1] != batch:
                raise ValueError("inconsistent batch shape across links")

    @property
    def batch_shape(self):
        return self.gains[0][0].shape[:-1]

    def link(self, n, m):
        return self.gains[n][m]


def substream(master_seed, *index):
    """Independent generator for ``(master_seed, *index)``.

    The same arguments always give the same stream. Streams that differ in
    any index component are statistically independent (numpy's
    ``SeedSequence`` spawn keys).
    """
    key = tuple(int(i) for i in index)
    if any(i < 0 for i in key):
        raise ValueError(f"stream indices must be non-negative, got {key}")
    seq = np.random.SeedSequence(int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(seq))


def complex_normal(rng, shape):
    """Circularly-symmetric complex Gaussian samples with unit power."""
    shape = tuple(shape) if np.iterable(shape) else (int(shape),)
    z =rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def sample_channel(topology, rng, size=None):
    """Draw a Rayleigh channel realization over ``topology``.

    Parameters
    ----------
    topology : BeamTopology
    rng : numpy.random.Generator
    size : int or tuple of int, optional
        Leading batch shape. ``None`` draws a single realization.

    Returns
    -------
    ChannelRealization
        Each gain has independent real and imaginary parts of variance
        1/2, hence ``E|h|^2 = 1`` and ``|h|^2`` is unit-mean exponential.
    """
    batch = () if size is None else tuple(np.atleast_1d(size).tolist())
    flat = complex_normal(rng, batch + (topology.total_beams,))
    rows = []
    offset = 0
    for row in topology.beams_per_link:
        out = []
        for b in row:
            out.append(flat[..., offset:offset + b])
            offset += b
        rows.append(tuple(out))
    return ChannelRealization(tuple(rows), topology)
