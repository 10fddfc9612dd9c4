"""Bounds on the L2 induced norm of continuous-time LTI systems restricted
to nonnegative inputs."""

from ._l2plus import (
    L2PlusError,
    PeakInfo,
    StateSpace,
    SweepResult,
    UpperBoundResult,
    UpsilonResult,
    certify,
    delay_demo,
    empirical_gain,
    fourier_coeffs,
    freq_response,
    hinf_norm,
    is_internally_positive,
    matrix_l2plus_bruteforce,
    matrix_l2plus_lower,
    parse_system,
    parseval_check,
    read_system,
    sip_qp_oracle,
    subtract,
    sweep,
    upper_bound,
    upsilon,
    upsilon_sequence,
)

__all__ = [
    "L2PlusError",
    "PeakInfo",
    "StateSpace",
    "SweepResult",
    "UpperBoundResult",
    "UpsilonResult",
    "certify",
    "delay_demo",
    "empirical_gain",
    "fourier_coeffs",
    "freq_response",
    "hinf_norm",
    "is_internally_positive",
    "matrix_l2plus_bruteforce",
    "matrix_l2plus_lower",
    "parse_system",
    "parseval_check",
    "read_system",
    "sip_qp_oracle",
    "subtract",
    "sweep",
    "upper_bound",
    "upsilon",
    "upsilon_sequence",
]
