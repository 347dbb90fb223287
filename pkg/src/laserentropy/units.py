"""Physical constants and unit conversion for the command-line layer.

The numerical core is dimensionless. Energies here are normalized to eV,
which is the common unit handed to :class:`~laserentropy.engine.ReservoirPhoton`.
SI defining constants (exact since the 2019 redefinition).
"""

PLANCK_H = 6.62607015e-34  # J s
HBAR = PLANCK_H / (2.0 * 3.141592653589793)  # J s
BOLTZMANN_K = 1.380649e-23  # J/K
ELECTRON_VOLT = 1.602176634e-19  # J

FREQUENCY_UNITS = ("eV", "Hz")
TEMPERATURE_UNITS = ("eV", "K")


def photon_energy_ev(value: float, unit: str) -> float:
    """Photon energy hν in eV from an energy in eV or a frequency in Hz."""
    if unit == "eV":
        return float(value)
    if unit == "Hz":
        return PLANCK_H * value / ELECTRON_VOLT
    raise ValueError(f"unknown frequency unit {unit!r}; expected one of {FREQUENCY_UNITS}")


def thermal_energy_ev(value: float, unit: str) -> float:
    """k_BT in eV from a temperature in K or an energy in eV."""
    if unit == "eV":
        return float(value)
    if unit == "K":
        return BOLTZMANN_K * value / ELECTRON_VOLT
    raise ValueError(f"unknown temperature unit {unit!r}; expected one of {TEMPERATURE_UNITS}")


def photon_rate_from_power(power_w: float, frequency_hz: float) -> float:
    """κ = P/(hν) photons per second, i.e. k_B P/ħν_ℓ in units of k_B."""
    if power_w < 0 or frequency_hz <= 0:
        raise ValueError("power must be nonnegative and frequency positive")
    return power_w / (PLANCK_H * frequency_hz)
