"""Beam selection and Alamouti coding for lens-based reconfigurable-antenna MIMO."""

from .analysis import (
    GainReportRow,
    avg_snr_optimal,
    avg_snr_random,
    conditional_ber,
    expected_max_gain,
    gain_table,
    gaussian_tail,
    max_gain_cdf,
    max_gain_pdf,
    selection_gain_db,
    semi_analytic_ber,
)
from .beam_selection import (
    EffectiveChannel,
    branch_gains,
    instantaneous_snr,
    select,
    select_optimal,
    select_random,
)
from .channel import (
    BeamTopology,
    ChannelRealization,
    complex_normal,
    make_uniform_topology,
    sample_channel,
    substream,
    topology_from_matrix,
)
from .montecarlo import (
    BerCurve,
    BerRecord,
    SimulationConfig,
    estimate_diversity_order,
    estimate_selection_gain_mc,
    read_ber_csv,
    run_ber_sweep,
    run_trial,
    slope_window,
)
from .stbc import (
    BPSK,
    QPSK,
    Constellation,
    alamouti_decode,
    alamouti_encode,
    demodulate,
    get_constellation,
    modulate,
    transmit,
)

__version__ = "0.1.0"
