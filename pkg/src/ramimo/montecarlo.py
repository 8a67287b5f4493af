"""Seeded Monte Carlo BER sweeps, selection-gain estimates and slopes.

Trials are grouped into fixed blocks of :data:`BLOCK_TRIALS`. Block ``b``
at linear SNR ``snr0`` draws all of its randomness from
``substream(master_seed, key(snr0), b)`` in a fixed order, so a trial's
outcome depends only on ``(config, snr0, trial_index)``. The stopping rule
is evaluated on blocks in index order, which makes every sweep independent
of how many workers computed the blocks.
"""

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beam_selection import branch_gains, select, select_optimal, select_random
from .channel import BeamTopology, complex_normal, sample_channel, substream
from .stbc import alamouti_decode, alamouti_encode, demodulate, get_constellation, modulate, transmit

__all__ = [
    "BLOCK_TRIALS",
    "SimulationConfig",
    "BerRecord",
    "BerCurve",
    "run_trial",
    "simulate_block",
    "run_ber_sweep",
    "estimate_selection_gain_mc",
    "estimate_diversity_order",
    "slope_window",
    "read_ber_csv",
]

BLOCK_TRIALS = 16384

POLICIES = ("optimal", "random")


@dataclass(frozen=True)
class SimulationConfig:
    """Everything that determines a BER sweep.

    ``parallelism`` only controls how many blocks are computed at once; it
    never changes the result.
    """

    topology: BeamTopology
    selection: str = "optimal"
    modulation: str = "qpsk"
    snr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    max_trials: int = 10_000_000
    target_bit_errors: int = 100
    master_seed: int = 0
    parallelism: object = 1

    def __post_init__(self):
        if self.topology.num_tx_antennas != 2:
            raise ValueError(
                f"the Alamouti link needs M = 2 transmit antennas, got {self.topology.num_tx_antennas}"
            )
        if self.selection not in POLICIES:
            raise ValueError(f"selection must be one of {POLICIES}, got {self.selection!r}")
        object.__setattr__(self, "modulation", get_constellation(self.modulation).name)
        grid = tuple(float(x) for x in self.snr_grid_db)
        if not grid:
            raise ValueError("snr_grid_db must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"snr_grid_db must be strictly increasing, got {list(grid)}")
        object.__setattr__(self, "snr_grid_db", grid)
        if self.max_trials < 1:
            raise ValueError(f"max_trials must be >= 1, got {self.max_trials}")
        if self.target_bit_errors < 1:
            raise ValueError(f"target_bit_errors must be >= 1, got {self.target_bit_errors}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be non-negative, got {self.master_seed}")
        if self.parallelism != "auto" and (int(self.parallelism) != self.parallelism or self.parallelism < 1):
            raise ValueError(f"parallelism must be a positive integer or 'auto', got {self.parallelism!r}")

    @property
    def bits_per_trial(self):
        return 2 * get_constellation(self.modulation).bits_per_symbol

    @property
    def workers(self):
        if self.parallelism == "auto":
            return os.cpu_count() or 1
        return int(self.parallelism)


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    bits_sent: int
    bit_errors: int
    trials: int = 0

    @property
    def ber(self):
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @property
    def stderr(self):
        if not self.bits_sent:
            return 0.0
        p = self.ber
        return math.sqrt(p * (1.0 - p) / self.bits_sent)

    @property
    def zero_errors(self):
        """True when the trial budget ran out before a single error."""
        return self.bit_errors == 0


@dataclass
class BerCurve:
    records: list
    config: SimulationConfig = None
    flagged: list = field(default_factory=list)

    @property
    def snr_db(self):
        return np.array([r.snr_db for r in self.records])

    @property
    def ber(self):
        return np.array([r.ber for r in self.records])

    @property
    def stderr(self):
        return np.array([r.stderr for r in self.records])

    def record_at(self, snr_db):
        for r in self.records:
            if math.isclose(r.snr_db, snr_db, rel_tol=0.0, abs_tol=1e-9):
                return r
        raise KeyError(f"no record at {snr_db} dB")

    def to_csv(self, fh=None):
        """Write ``snr_db,bits,errors,ber,stderr``; returns the text if ``fh`` is None."""
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["snr_db", "bits", "errors", "ber", "stderr"])
        for r in self.records:
            writer.writerow([repr(r.snr_db), r.bits_sent, r.bit_errors, repr(r.ber), repr(r.stderr)])
        if fh is None:
            return out.getvalue()


def read_ber_csv(fh):
    """Parse a curve written by :meth:`BerCurve.to_csv`."""
    reader = csv.DictReader(fh)
    expected = ["snr_db", "bits", "errors", "ber", "stderr"]
    if reader.fieldnames != expected:
        raise ValueError(f"BER CSV must have columns {expected}, got {reader.fieldnames}")
    records = [BerRecord(float(row["snr_db"]), int(row["bits"]), int(row["errors"])) for row in reader]
    return BerCurve(records)


def _snr_key(snr0):
    # stream key from the IEEE-754 bits of snr0, so inserting grid points
    # leaves the other points' streams untouched
    return int(np.float64(snr0).view(np.uint64))


def simulate_block(config, snr0, block_index, noiseless=False):
    """Bit errors of every trial in one block.

    Returns
    -------
    ndarray of int
        Errors per trial, shape ``(BLOCK_TRIALS,)``.
    """
    topo = config.topology
    const = get_constellation(config.modulation)
    rng = substream(config.master_seed, _snr_key(snr0), block_index)
    # fixed draw order: gains, selection uniforms, bits, noise; both
    # policies therefore see the same channels and noise
    realization = sample_channel(topo, rng, size=BLOCK_TRIALS)
    uniforms = rng.random((BLOCK_TRIALS,) + topo.shape)
    bits = rng.integers(0, 2, size=(BLOCK_TRIALS, config.bits_per_trial), dtype=np.int8)
    noise = complex_normal(rng, (BLOCK_TRIALS, topo.num_rx_beams, 2))
    effective = select(realization, config.selection, uniforms=uniforms)
    symbols = modulate(bits, const)
    codeword = alamouti_encode(symbols[:, 0], symbols[:, 1])
    received = transmit(effective, codeword, snr0, noise=None if noiseless else noise)
    s1, s2 = alamouti_decode(received, effective)
    detected = demodulate(np.stack([s1, s2], axis=-1), const)
    return np.count_nonzero(detected != bits, axis=-1)


def run_trial(config, snr0, trial_index, noiseless=False):
    """Bits sent and bit errors of a single trial.

    A trial is one channel draw, one selection and one Alamouti block of
    two symbols. The result is identical to the matching trial inside a
    sweep.
    """
    if trial_index < 0:
        raise ValueError(f"trial_index must be non-negative, got {trial_index}")
    block, lane = divmod(int(trial_index), BLOCK_TRIALS)
    errors = simulate_block(config, snr0, block, noiseless=noiseless)
    return config.bits_per_trial, int(errors[lane])


def _sweep_point(config, snr_db, pool, noiseless=False):
    snr0 = 10.0 ** (snr_db / 10.0)
    wave = max(1, config.workers)
    trials = errors = 0
    block = 0
    done = False
    while not done:
        indices = range(block, block + wave)
        if pool is None:
            results = [simulate_block(config, snr0, b, noiseless) for b in indices]
        else:
            results = list(pool.map(lambda b: simulate_block(config, snr0, b, noiseless), indices))
        for per_trial in results:
            take = min(BLOCK_TRIALS, config.max_trials - trials)
            errors += int(per_trial[:take].sum())
            trials += take
            if errors >= config.target_bit_errors or trials >= config.max_trials:
                done = True
                break
        block += wave
    return BerRecord(snr_db, trials * config.bits_per_trial, errors, trials)


def run_ber_sweep(config, noiseless=False):
    """BER at every grid point, stopping each point at the error target.

    Each point accumulates whole blocks until ``target_bit_errors`` is
    reached or ``max_trials`` trials have been spent (the last block is
    truncated). Points that finish without errors are kept with
    ``ber = 0`` and listed in ``BerCurve.flagged``.
    """
    workers = config.workers
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        records = [_sweep_point(config, snr_db, pool, noiseless) for snr_db in config.snr_grid_db]
    finally:
        if pool is not None:
            pool.shutdown()
    flagged = [r.snr_db for r in records if r.zero_errors]
    return BerCurve(records, config, flagged)


def estimate_selection_gain_mc(topology, trials, seed):
    """Monte Carlo selection gain in dB at unit SNR scale.

    Optimal and random selection are applied to the same channel draws.
    The standard error comes from the delta method on the ratio of means.

    Returns
    -------
    gain_db, stderr_db : float
    """
    if trials < 10_000:
        raise ValueError(f"trials must be at least 10000, got {trials}")
    rng = substream(seed, 0)
    realization = sample_channel(topology, rng, size=int(trials))
    x = branch_gains(select_optimal(realization)).sum(axis=(-2, -1))
    y = branch_gains(select_random(realization, rng)).sum(axis=(-2, -1))
    mx, my = x.mean(), y.mean()
    cov = np.cov(x, y)
    ratio = mx / my
    var_ratio = (cov[0, 0] / my**2 - 2 * mx * cov[0, 1] / my**3 + mx**2 * cov[1, 1] / my**4) / x.size
    stderr_db = 10.0 / math.log(10.0) * math.sqrt(max(var_ratio, 0.0)) / ratio
    return 10.0 * math.log10(ratio), stderr_db


def estimate_diversity_order(curve, snr_lo_db, snr_hi_db):
    """Magnitude of the log-log BER slope between two grid points.

    Expressed in decades of BER per 10 dB of SNR.
    """
    lo, hi = curve.record_at(snr_lo_db), curve.record_at(snr_hi_db)
    if lo.bit_errors == 0 or hi.bit_errors == 0:
        raise ValueError("zero-error record: not enough statistics for a slope")
    if hi.snr_db == lo.snr_db:
        raise ValueError("slope needs two distinct SNR points")
    return -(math.log10(hi.ber) - math.log10(lo.ber)) / ((hi.snr_db - lo.snr_db) / 10.0)


def slope_window(curve, ber_range=(1e-5, 1e-3), min_errors=100):
    """Two highest-SNR points with BER inside ``ber_range`` and enough errors.

    Returns
    -------
    (snr_lo_db, snr_hi_db)
    """
    lo_ber, hi_ber = ber_range
    usable = [
        r for r in curve.records
        if r.bit_errors >= min_errors and lo_ber <= r.ber <= hi_ber
    ]
    if len(usable) < 2:
        raise ValueError(
            f"need two points with BER in [{lo_ber:g}, {hi_ber:g}] and >= {min_errors} errors, "
            f"found {len(usable)}"
        )
    usable.sort(key=lambda r: r.snr_db)
    return usable[-2].snr_db, usable[-1].snr_db
