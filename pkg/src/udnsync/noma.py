"""Per-sub-band SINRs, rates, and pair completion times.

A scheduled transmitter superposes two power-weighted signals for its
strong and weak receivers on one sub-band. After successive
interference cancellation the weak receiver decodes interference-free,
while the strong receiver sees the weak signal as co-receiver
interference. Once the weak receiver's transfer finishes, the strong
link keeps the sub-band to itself and continues at its
interference-free rate with the same power coefficient.

The orthogonal baseline shares the same sub-band between the two
receivers with equal orthogonal (time-share) portions at full transmit
power, so each leg runs at half the effective bandwidth and the pair
finishes when the slower leg does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class CompletionError(ValueError):
    """A zero-rate leg makes the transfer time infinite."""


@dataclass(frozen=True)
class PairLink:
    """Effective channel of one TX triplet on one sub-band.

    Gains are power gains with path loss folded in; gain_strong must
    dominate gain_weak. alpha_strong + alpha_weak <= 1.
    """

    gain_strong: float
    gain_weak: float
    alpha_strong: float
    alpha_weak: float
    noise_w: float
    tx_power_w: float
    bandwidth_hz: float
    payload_bits: float

    def __post_init__(self):
        if self.gain_strong < self.gain_weak:
            raise ValueError("gain_strong must be >= gain_weak")
        if self.alpha_strong < 0 or self.alpha_weak < 0:
            raise ValueError("power coefficients must be non-negative")
        if self.alpha_strong + self.alpha_weak > 1.0 + 1e-12:
            raise ValueError("power coefficients must sum to at most 1")
        if self.noise_w < 0 or self.tx_power_w <= 0:
            raise ValueError("bad power parameters")


@dataclass(frozen=True)
class PairTimes:
    t_strong: float
    t_weak: float

    @property
    def t_pair(self) -> float:
        return max(self.t_strong, self.t_weak)


def sinr_strong(link: PairLink) -> float:
    """Post-SIC SINR of the strong receiver, with co-RX interference."""
    interference = link.gain_strong * link.alpha_weak * link.tx_power_w
    denom = interference + link.noise_w
    if denom == 0.0:
        raise CompletionError("undefined SINR: zero noise and zero interference")
    return link.gain_strong * link.alpha_strong * link.tx_power_w / denom

def sinr_weak(link: PairLink) -> float:
    """Interference-free SINR of the weak receiver."""
    if link.noise_w == 0.0:
        raise CompletionError("undefined SINR: zero noise power")
    return link.gain_weak * link.alpha_weak * link.tx_power_w / link.noise_w


def sinr_strong_alone(link: PairLink) -> float:
    """Strong receiver's SINR once the weak transfer has finished.

    The power coefficient is kept, only the co-RX interference drops."""
    if link.noise_w == 0.0:
        raise CompletionError("undefined SINR: zero noise power")
    return link.gain_strong * link.alpha_strong * link.tx_power_w / link.noise_w


def rate(sinr: float, bandwidth_hz: float) -> float:
    """Shannon rate in bits/s; bandwidth 1 Hz recovers spectral efficiency."""
    if sinr < 0:
        raise ValueError("sinr must be >= 0")
    return bandwidth_hz * math.log2(1.0 + sinr)


def pair_completion_noma(link: PairLink) -> PairTimes:
    """Piecewise completion times of both legs under superposed access.

    The weak leg always takes L/R_weak. The strong leg takes L/R_strong
    if it finishes within the weak leg's window; otherwise the residual
    bits drain at the interference-free rate after the weak leg ends.
    """
    l = link.payload_bits
    r_weak = rate(sinr_weak(link), link.bandwidth_hz)
    r_strong = rate(sinr_strong(link), link.bandwidth_hz)
    r_alone = rate(sinr_strong_alone(link), link.bandwidth_hz)
    if r_weak <= 0.0 or r_strong <= 0.0:
        raise CompletionError("infinite completion: zero-rate leg")
    t_weak = l / r_weak
    if l / r_strong <= t_weak:
        t_strong = l / r_strong
    else:
        t_strong = t_weak + (l - r_strong * t_weak) / r_alone
    return PairTimes(t_strong=t_strong, t_weak=t_weak)


def pair_completion_oma(link: PairLink) -> PairTimes:
    """Orthogonal baseline: equal-share legs at full power, no power split."""
    if link.noise_w <= 0:
        raise CompletionError("undefined SINR: zero noise power")
    l = link.payload_bits
    r_strong = rate(link.gain_strong * link.tx_power_w / link.noise_w,
                    link.bandwidth_hz)
    r_weak = rate(link.gain_weak * link.tx_power_w / link.noise_w,
                  link.bandwidth_hz)
    if r_strong <= 0.0 or r_weak <= 0.0:
        raise CompletionError("infinite completion: zero-gain leg")
    return PairTimes(t_strong=2.0 * l / r_strong, t_weak=2.0 * l / r_weak)
