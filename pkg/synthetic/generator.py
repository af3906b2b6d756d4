"""
Synthetic bearing vibration.

Each recording is a sum of shaft harmonics whose amplitude follows a
degree-2 trend in speed and load, plus random excitation of the
structural resonance, plus one impulse train per bearing defect ringing
the same resonance, plus white noise.
Random excitation carries as much band energy as the defects of a
faulty bearing but no periodicity, so only the envelope reveals the fault. Output depends only
on (spec, condition, seed).
"""
import math
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from core.exceptions import InvalidArgumentError
from core.models import HealthClass

# Conventional defect orders (impacts per shaft revolution)
OUTER_RACE_ORDER = 3.57
INNER_RACE_ORDER = 5.43
BALL_ORDER = 2.32


@dataclass(frozen=True)
class Defect:
    order: float
    severity: float = 1.0

    def __post_init__(self):
        if self.order <= 1:
            raise InvalidArgumentError(f"Defect order must exceed 1, got {self.order}")
        if self.severity < 0:
            raise InvalidArgumentError(f"Defect severity must be >= 0, got {self.severity}")


@dataclass(frozen=True)
class BearingSpec:
    id: str
    health_class: str = HealthClass.HEALTHY
    defects: tuple = ()
    resonance_hz: float = 3000.0
    resonance_q: float = 10.0
    # Aperiodic excitation of the resonance, relative to the shaft fundamental
    excitation: float = 1.4
    # None means the dataset-wide runs_per_cell
    runs: int = None

    def __post_init__(self):
        if self.health_class == HealthClass.HEALTHY and self.defects:
            raise InvalidArgumentError(f"Healthy bearing {self.id} cannot carry defects")
        if self.resonance_hz <= 0 or self.resonance_q <= 0:
            raise InvalidArgumentError(f"Bearing {self.id} needs a positive resonance and Q")
        if self.excitation < 0:
            raise InvalidArgumentError(f"Bearing {self.id} excitation must be >= 0")


@dataclass(frozen=True)
class ConditionGrid:
    speeds_rpm: tuple
    loads_nm: tuple
    held_out: tuple = ()
    # Explicit (rpm, Nm) cells; empty means the full speed x load product
    cells: tuple = ()
    duration_s: float = 1.0
    fs: float = 48000.0
    channels: int = 2

    def __post_init__(self):
        if any(s <= 0 for s in self.speeds_rpm):
            raise InvalidArgumentError("Speeds must be positive")
        if self.channels < 1 or self.fs <= 0 or self.duration_s <= 0:
            raise InvalidArgumentError("Grid needs positive fs, duration and channel count")
        conditions = set(self.conditions())
        outside = [c for c in self.held_out if tuple(c) not in conditions]
        if outside:
            raise InvalidArgumentError(f"Held-out conditions outside the grid: {outside}")

    def conditions(self):
        if self.cells:
            return [(float(s), float(t)) for s, t in self.cells]
        return [(float(s), float(t)) for s in self.speeds_rpm for t in self.loads_nm]

    def is_held_out(self, speed_rpm, load_nm):
        return (float(speed_rpm), float(load_nm)) in {(float(s), float(t)) for s, t in self.held_out}

    @property
    def n_samples(self):
        return int(round(self.duration_s * self.fs))


@dataclass(frozen=True)
class SignalModel:
    """Amplitudes and trend coefficients shared by every bearing."""
    n_harmonics: int = 10
    # amplitude factor 1 + b1*fo + b2*to + b3*fo^2 (fo in Hz, to in Nm)
    beta_fo: float = 0.02
    beta_to: float = 0.03
    beta_fo2: float = 1e-4
    # Per-defect resonance power at severity 1, as the random drive level
    # that would deliver the same power. Constant across speed.
    impulse_gain: float = 1.0
    snr_db: float = 20.0
    # A2 sits under the test bench: weaker coupling, same noise floor
    channel_gains: tuple = field(default=(1.0, 0.5))

    def trend(self, fo, to):
        return 1.0 + self.beta_fo * fo + self.beta_to * to + self.beta_fo2 * fo ** 2

    def harmonic_amplitudes(self):
        return 1.0 / np.arange(1, self.n_harmonics + 1)

    def channel_gain(self, channel):
        if channel < len(self.channel_gains):
            return self.channel_gains[channel]
        return self.channel_gains[-1]


def default_bearings():
    """
    Three healthy and three faulty bearings, each faulty one with two defects.

    Every bearing shares one excitation level, so nothing but the defects
    tells the classes apart.
    """
    return [
        BearingSpec('AM-01'),
        BearingSpec('AM-02'),
        BearingSpec('AM-03'),
        BearingSpec('F3-01', HealthClass.FAULTY,
                    (Defect(OUTER_RACE_ORDER), Defect(BALL_ORDER))),
        BearingSpec('F5-01', HealthClass.FAULTY,
                    (Defect(INNER_RACE_ORDER), Defect(BALL_ORDER))),
        BearingSpec('F7-01', HealthClass.FAULTY,
                    (Defect(INNER_RACE_ORDER), Defect(OUTER_RACE_ORDER))),
    ]


# Runs per bearing in the motor test campaign the defaults imitate
CAMPAIGN_RUNS = {'AM-01': 6, 'AM-02': 2, 'AM-03': 2, 'F3-01': 4, 'F5-01': 4, 'F7-01': 4}


def cell_seed(master_seed, bearing_id, speed_rpm, load_nm, run):
    """Seed for one recording, independent of generation order."""
    key = [
        int(master_seed),
        zlib.crc32(bearing_id.encode('utf-8')),
        int(round(speed_rpm)),
        int(round(load_nm * 1000)),
        int(run),
    ]
    return np.random.SeedSequence(key)


def impulse_indices(rate_hz, fs, n, offset_s=0.0):
    """Sample indices of a periodic impulse train starting at offset_s."""
    if rate_hz <= 0:
        raise InvalidArgumentError(f"Impulse rate must be positive, got {rate_hz}")
    period = 1.0 / rate_hz
    count = int(math.floor((n / fs - offset_s) / period)) + 1
    times = offset_s + period * np.arange(max(count, 0))
    idx = np.round(times * fs).astype(int)
    return idx[(idx >= 0) & (idx < n)]


def resonance_response(impulses, fs, resonance_hz, q):
    """Ring a decaying resonance at every impulse (two-pole resonator)."""
    decay = math.pi * resonance_hz / q
    r = math.exp(-decay / fs)
    theta = 2 * math.pi * resonance_hz / fs
    b = [0.0, r * math.sin(theta)]
    a = [1.0, -2 * r * math.cos(theta), r * r]
    return signal.lfilter(b, a, impulses)


def generate_recording(spec, speed_rpm, load_nm, seed, grid, model=None):
    """
    One multi-channel recording with shape (channels, n).

    ``seed`` is an int or a numpy SeedSequence.
    """
    model = model or SignalModel()
    fs = grid.fs
    n = grid.n_samples
    fo = speed_rpm / 60.0
    to = float(load_nm)
    gain = model.trend(fo, to)

    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    phase_seq, noise_seq, fault_seq, excitation_seq = seq.spawn(4)
    phase_rng = np.random.default_rng(phase_seq)
    noise_rng = np.random.default_rng(noise_seq)
    fault_rng = np.random.default_rng(fault_seq)
    excitation_rng = np.random.default_rng(excitation_seq)

    t = np.arange(n) / fs
    alphas = model.harmonic_amplitudes()
    harmonics = np.arange(1, model.n_harmonics + 1)

    # Noise is referenced to the A1 fundamental so weaker channels see a lower SNR
    noise_std = alphas[0] * gain / math.sqrt(2) * 10 ** (-model.snr_db / 20)

    fault = np.zeros(n)
    for defect in spec.defects:
        rate = defect.order * fo
        offset = fault_rng.uniform(0.0, 1.0 / rate)
        if defect.severity == 0:
            continue
        # sqrt(fs / rate) keeps the train's power equal to white drive at impulse_gain
        impulses = np.zeros(n)
        impulses[impulse_indices(rate, fs, n, offset)] = (
            model.impulse_gain * defect.severity * alphas[0] * gain * math.sqrt(fs / rate)
        )
        fault += resonance_response(impulses, fs, spec.resonance_hz, spec.resonance_q)

    # One structural response, seen by every channel through its gain
    structure = resonance_response(
        spec.excitation * alphas[0] * gain * excitation_rng.standard_normal(n),
        fs, spec.resonance_hz, spec.resonance_q,
    )

    data = np.empty((grid.channels, n))
    for ch in range(grid.channels):
        phases = phase_rng.uniform(0, 2 * np.pi, size=model.n_harmonics)
        shaft = (gain * alphas[:, None] * np.cos(
            2 * np.pi * fo * harmonics[:, None] * t[None, :] + phases[:, None]
        )).sum(axis=0)
        noise = noise_std * noise_rng.standard_normal(n)
        x = model.channel_gain(ch) * (shaft + structure)
        if spec.defects:
            x = x + model.channel_gain(ch) * fault
        data[ch] = x + noise
    return data
