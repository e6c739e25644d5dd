"""Physical constants used across the toolkit.

Defaults are CODATA 2018 exact SI values for h and k_B, and literature
gyromagnetic ratios expressed in Hz/G. Nothing downstream hard-codes these;
pass a modified ``PhysicalConstants`` to change them.
"""

from dataclasses import dataclass, asdict, replace
import math


@dataclass(frozen=True)
class PhysicalConstants:
    h: float = 6.62607015e-34  # J s
    k_B: float = 1.380649e-23  # J/K
    e: float = 1.602176634e-19  # J/eV
    gamma_e: float = 2.8024951e6  # Hz/G, NV electron (g = 2.0028)
    gamma_n14: float = 307.7  # Hz/G
    gamma_c13: float = 1070.84  # Hz/G

    @property
    def hbar(self):
        return self.h / (2 * math.pi)

    def mev_to_joule(self, energy_mev):
        return energy_mev * 1e-3 * self.e

    def mev_to_hz(self, energy_mev):
        return self.mev_to_joule(energy_mev) / self.h

    def hz_to_mev(self, freq_hz):
        return freq_hz * self.h / (1e-3 * self.e)

    def as_dict(self):
        return asdict(self)

    def replace(self, **changes):
        return replace(self, **changes)


DEFAULT_CONSTANTS = PhysicalConstants()
