"""Rate conventions shared by the weak-field hierarchy and the master-equation verifier.

All rates are in units of the spontaneous-emission rate gamma (which fixes the
unit of time) and all energies in units of hbar*gamma.

Convention, fixed once here so the two solvers can never disagree by a factor
of two:

* kappa is the cavity *field* (amplitude) decay rate.  The transmission
  collapse operator is sqrt(2*kappa)*a, so the photon emission rate out of the
  cavity is 2*kappa*<a^dag a>.
* gamma is the atomic *population* decay rate.  The fluorescence collapse
  operator is sqrt(gamma)*sigma_minus, so the spontaneous-emission rate is
  gamma*<sigma_+ sigma_->, and the excited-state amplitude decays at gamma/2.

These choices reproduce the damping brackets of the amplitude hierarchy
(gamma/4 + kappa/2 on single-excitation amplitudes, gamma/4 + 3*kappa/2 on
double-excitation ones).
"""


def transmission_rate(kappa: float, photon_number: float) -> float:
    """Photon flux through the output mirror for a given mean photon number."""
    return 2.0 * kappa * photon_number


def fluorescence_rate(gamma: float, excited_population: float) -> float:
    """Spontaneous-emission flux for a given excited-state population."""
    return gamma * excited_population


def cavity_amplitude_decay(kappa: float) -> float:
    """Decay rate of a single-photon amplitude, per the field convention."""
    return kappa


def atom_amplitude_decay(gamma: float) -> float:
    """Decay rate of the excited-state amplitude."""
    return gamma / 2.0
