"""Junction electrical figures of merit via the Ambegaokar-Baratoff relation.

A tunnel junction with normal-state resistance ``R_n`` and superconducting
gap ``Delta`` carries (zero-temperature form)

    I_c = pi * Delta / (2 e R_n),

so the critical current density depends only on the resistance-area product:
``J_c = (pi Delta / 2e) / (R_n A)``.  At the aluminum default
Delta = 180 ueV the numerator is 282.74 uV, giving the handy rule
``J_c [A/cm^2] = 100 * 282.74 / R_nA [Ohm um^2]``.

Units are fixed at the boundaries of this module: resistances in Ohm, areas
in um^2, gaps in ueV; currents are returned in nA and current densities in
A/cm^2.  All conversion factors live here and nowhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

__all__ = [
    "DEFAULT_DELTA_UEV",
    "JunctionElectrical",
    "ab_voltage_uv",
    "critical_current",
    "critical_current_density",
    "rn_for_target",
]

DEFAULT_DELTA_UEV = 180.0

# 1 uA/um^2 = 1e-6 A / 1e-8 cm^2
A_PER_CM2_PER_UA_PER_UM2 = 100.0
NA_PER_UA = 1000.0


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ValidationError(f"{name} must be > 0, got {value}")


def ab_voltage_uv(delta_uev: float = DEFAULT_DELTA_UEV) -> float:
    """The Ambegaokar-Baratoff product I_c*R_n = pi*Delta/(2e), in uV."""
    _require_positive(delta_uev=delta_uev)
    return math.pi * delta_uev / 2.0


def critical_current(r_n_ohm: float, delta_uev: float = DEFAULT_DELTA_UEV) -> float:
    """Critical current in nA for a junction of resistance ``r_n_ohm``.

    I_c = pi*Delta/(2 e R_n); 6.6 kOhm at the 180 ueV gap gives 42.8 nA.
    """
    _require_positive(r_n_ohm=r_n_ohm)
    return ab_voltage_uv(delta_uev) / r_n_ohm * NA_PER_UA


def critical_current_density(
    rna_ohm_um2: float, delta_uev: float = DEFAULT_DELTA_UEV
) -> float:
    """Critical current density in A/cm^2 from the resistance-area product."""
    _require_positive(rna_ohm_um2=rna_ohm_um2)
    return ab_voltage_uv(delta_uev) / rna_ohm_um2 * A_PER_CM2_PER_UA_PER_UM2


def rn_for_target(
    j_c_acm2: float, area_um2: float, delta_uev: float = DEFAULT_DELTA_UEV
) -> float:
    """Design inverse: room-temperature resistance hitting a target J_c.

    Exact inverse of :func:`critical_current_density` for the given area;
    the roundtrip is exact to floating precision.
    """
    _require_positive(j_c_acm2=j_c_acm2, area_um2=area_um2)
    rna = ab_voltage_uv(delta_uev) / (j_c_acm2 / A_PER_CM2_PER_UA_PER_UM2)
    return rna / area_um2


@dataclass(frozen=True)
class JunctionElectrical:
    """Measured junction with derived Ambegaokar-Baratoff quantities."""

    r_n_ohm: float
    area_um2: float
    delta_uev: float = DEFAULT_DELTA_UEV

    def __post_init__(self) -> None:
        _require_positive(
            r_n_ohm=self.r_n_ohm, area_um2=self.area_um2, delta_uev=self.delta_uev
        )

    @property
    def rna_ohm_um2(self) -> float:
        return self.r_n_ohm * self.area_um2

    @property
    def i_c_na(self) -> float:
        return critical_current(self.r_n_ohm, self.delta_uev)

    @property
    def j_c_acm2(self) -> float:
        return critical_current_density(self.rna_ohm_um2, self.delta_uev)

    def record(self) -> dict:
        return {
            "rn_ohm": self.r_n_ohm,
            "area_um2": self.area_um2,
            "delta_uev": self.delta_uev,
            "rna_ohm_um2": self.rna_ohm_um2,
            "ic_na": self.i_c_na,
            "jc_acm2": self.j_c_acm2,
        }
