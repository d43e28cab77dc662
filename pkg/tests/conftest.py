"""Shared parameter points used across the test modules."""
from qdresponse.model import Params


def bistable_point(ep0=8.0) -> Params:
    """Inversion-vs-pump scenario with a bistable window in ep0."""
    return Params(delta_p0=-8.0, delta_c0=0.8, g0=1.0, eta=0.2,
                  omega_k0=100.0, kappa_c0=1.35, gamma_q0=0.1, ep0=ep0)


def detuning_scan_point(ep0=81.0, g0=0.1) -> Params:
    """Inversion-vs-pump-detuning scenario (swept in delta_p0)."""
    return Params(delta_p0=0.0, delta_c0=10.0, g0=g0, eta=0.2,
                  omega_k0=100.0, kappa_c0=1.35, gamma_q0=0.1, ep0=ep0)


def absorption_point(eta=0.02, delta0=0.0) -> Params:
    """Signal-absorption scenario (central resonance plus phonon sidebands)."""
    return Params(delta_p0=0.0, delta_c0=0.0, g0=1.5, eta=eta,
                  omega_k0=10.0, kappa_c0=1.35, gamma_q0=0.1, ep0=3.15,
                  delta0=delta0)


def transmission_point_params(ep0=5.0, eta=0.015, g0=1.5) -> Params:
    """Power-transmission scenario with the narrow phonon dip."""
    return Params(delta_p0=-10.0, delta_c0=-10.0, g0=g0, eta=eta,
                  omega_k0=10.0, kappa_c0=1.35, gamma_q0=0.1, ep0=ep0)


def kerr_point(eta=0.06, ep0=0.34, g0=0.5) -> Params:
    """Kerr-switch scenario on the blue sideband of the pump."""
    return Params(delta_p0=-10.0, delta_c0=-10.0, g0=g0, eta=eta,
                  omega_k0=10.0, kappa_c0=1.35, gamma_q0=0.1, ep0=ep0)


def kerr_peaks_point(omega_k0=10.0) -> Params:
    """Kerr-peak scenario with both drives on the exciton line."""
    return Params(delta_p0=0.0, delta_c0=0.0, g0=1.5, eta=0.06,
                  omega_k0=omega_k0, kappa_c0=1.35, gamma_q0=0.1, ep0=0.54)
