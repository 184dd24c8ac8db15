"""Transmon energies, quality factors, and the photon dephasing bound.

In the transmon regime the charging energy tracks the anharmonicity
magnitude, ``E_C ~ |alpha|``, and the qubit frequency obeys
``f = sqrt(8 E_J E_C) - E_C``, which inverts to

    E_J = (f + E_C)^2 / (8 E_C).

Coherence times convert to quality factors through Q = omega*T = 2*pi*f*T,
and the pure dephasing quality factor removes the relaxation contribution
from the echo:

    Q_phi = 1 / (1/Q_2E - 1/(2 Q_1)).

Residual resonator photons bound dephasing via

    Gamma_p = nbar * kappa_res * chi^2 / (kappa_res^2 + chi^2).

Published bounds of this kind insert kappa and chi as ordinary frequencies
and divide 2*pi*f_qubit by the resulting rate; that convention is the
default here because it regresses against the quoted device numbers.  Pass
``strict_angular=True`` for the dimensionally strict all-angular evaluation,
which is 2*pi lower.

Frequencies are MHz (qubit), kHz (chi, kappa); times are us.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import UnphysicalDephasing, ValidationError

__all__ = [
    "TransmonParams",
    "CoherenceSummary",
    "energies_from_spectroscopy",
    "quality_factors",
    "photon_dephasing_bound",
]


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ValidationError(f"{name} must be > 0, got {value}")


def energies_from_spectroscopy(
    f_qubit_mhz: float, alpha_mhz: float
) -> tuple[float, float, float]:
    """Charging and Josephson energies from qubit frequency and anharmonicity.

    Uses E_C = |alpha| exactly (no higher-order corrections) and
    E_J = (f + E_C)^2 / (8 E_C).  Returns ``(e_c_mhz, e_j_mhz, ej_ec_ratio)``.
    """
    _require_positive(f_qubit_mhz=f_qubit_mhz, alpha_mhz=alpha_mhz)
    e_c = alpha_mhz
    e_j = (f_qubit_mhz + e_c) ** 2 / (8.0 * e_c)
    return e_c, e_j, e_j / e_c


@dataclass(frozen=True)
class CoherenceSummary:
    """Coherence times with their quality factors (Q = 2*pi*f*T)."""

    t1_us: float
    t2e_us: float
    q1: float
    q2e: float
    q_phi: float

    def record(self) -> dict:
        return {
            "t1_us": self.t1_us,
            "t2e_us": self.t2e_us,
            "q1": self.q1,
            "q2e": self.q2e,
            "q_phi": self.q_phi,
        }


def quality_factors(
    f_qubit_mhz: float,
    t1_us: float,
    t2e_us: float,
    boundary_tol: float = 0.01,
) -> CoherenceSummary:
    """Q_1, Q_2E, and the pure dephasing quality factor Q_phi.

    A relaxation-limited echo has T_2E = 2*T_1 and infinite Q_phi.
    Measurement noise routinely lands right on that boundary, so anything
    within ``boundary_tol`` (relative, default 1%) of it also reports
    ``inf``; beyond it the data is unphysical and raises
    :class:`UnphysicalDephasing`.
    """
    _require_positive(f_qubit_mhz=f_qubit_mhz, t1_us=t1_us, t2e_us=t2e_us)
    q1 = 2.0 * math.pi * f_qubit_mhz * t1_us
    q2e = 2.0 * math.pi * f_qubit_mhz * t2e_us
    ratio = t2e_us / (2.0 * t1_us)
    if ratio > 1.0 + boundary_tol:
        raise UnphysicalDephasing(
            f"t2e = {t2e_us} us exceeds 2*t1 = {2.0 * t1_us} us by more than "
            f"{100.0 * boundary_tol:.1f}%"
        )
    if ratio >= 1.0 - boundary_tol:
        q_phi = math.inf
    else:
        q_phi = 1.0 / (1.0 / q2e - 1.0 / (2.0 * q1))
    return CoherenceSummary(t1_us=t1_us, t2e_us=t2e_us, q1=q1, q2e=q2e, q_phi=q_phi)


def photon_dephasing_bound(
    nbar: float,
    kappa_khz: float,
    chi_khz: float,
    f_qubit_mhz: float,
    strict_angular: bool = False,
) -> float:
    """Quality-factor bound from residual readout-resonator photons.

    Gamma_p = nbar * kappa * chi^2 / (kappa^2 + chi^2), with kappa and chi
    inserted as ordinary frequencies and the result divided into
    2*pi*f_qubit (the convention that reproduces published device bounds).
    ``strict_angular=True`` instead treats kappa and chi as angular rates,
    giving a bound 2*pi smaller.  Returns ``inf`` for nbar = 0 or chi = 0.
    """
    if nbar < 0:
        raise ValidationError(f"nbar must be >= 0, got {nbar}")
    _require_positive(kappa_khz=kappa_khz, f_qubit_mhz=f_qubit_mhz)
    if nbar == 0.0 or chi_khz == 0.0:
        return math.inf
    gamma_per_s = nbar * (kappa_khz * 1e3) * chi_khz**2 / (kappa_khz**2 + chi_khz**2)
    if strict_angular:
        gamma_per_s *= 2.0 * math.pi
    return 2.0 * math.pi * f_qubit_mhz * 1e6 / gamma_per_s


@dataclass(frozen=True)
class TransmonParams:
    """Spectroscopic description of one transmon with derived energies."""

    f_qubit_mhz: float
    alpha_mhz: float
    chi_khz: float | None = None
    kappa_khz: float | None = None
    f_res_ghz: float | None = None
    nbar: float = 0.01

    def __post_init__(self) -> None:
        _require_positive(f_qubit_mhz=self.f_qubit_mhz, alpha_mhz=self.alpha_mhz)
        if self.kappa_khz is not None:
            _require_positive(kappa_khz=self.kappa_khz)
        if self.nbar < 0:
            raise ValidationError(f"nbar must be >= 0, got {self.nbar}")
        if self.ej_ec_ratio < 10.0:
            warnings.warn(
                f"E_J/E_C = {self.ej_ec_ratio:.2f} < 10: outside the transmon regime",
                stacklevel=2,
            )

    @property
    def e_c_mhz(self) -> float:
        return energies_from_spectroscopy(self.f_qubit_mhz, self.alpha_mhz)[0]

    @property
    def e_j_mhz(self) -> float:
        return energies_from_spectroscopy(self.f_qubit_mhz, self.alpha_mhz)[1]

    @property
    def ej_ec_ratio(self) -> float:
        return energies_from_spectroscopy(self.f_qubit_mhz, self.alpha_mhz)[2]

    def photon_dephasing_q(self, strict_angular: bool = False) -> float:
        """Photon dephasing bound for this device; needs chi and kappa."""
        if self.chi_khz is None or self.kappa_khz is None:
            raise ValidationError("photon dephasing bound needs chi_khz and kappa_khz")
        return photon_dephasing_bound(
            self.nbar, self.kappa_khz, self.chi_khz, self.f_qubit_mhz, strict_angular
        )

    def record(self) -> dict:
        rec = {
            "f_qubit_mhz": self.f_qubit_mhz,
            "alpha_mhz": self.alpha_mhz,
            "e_c_mhz": self.e_c_mhz,
            "e_j_mhz": self.e_j_mhz,
            "ej_ec_ratio": self.ej_ec_ratio,
            "nbar": self.nbar,
        }
        if self.f_res_ghz is not None:
            rec["f_res_ghz"] = self.f_res_ghz
        if self.chi_khz is not None:
            rec["chi_khz"] = self.chi_khz
        if self.kappa_khz is not None:
            rec["kappa_khz"] = self.kappa_khz
        if self.chi_khz is not None and self.kappa_khz is not None:
            rec["q_phi_photon"] = self.photon_dephasing_q()
        return rec
