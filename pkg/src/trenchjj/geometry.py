"""First-order shadow geometry for double-angle deposition into an etched trench.

The trench cross-section is a symmetric trapezoid: top width ``w`` at the
substrate surface, depth ``d``, sidewalls rising at ``phi`` degrees from
horizontal so each wall base sits ``d*cot(phi)`` inside its top edge.  A
collimated beam tilted ``theta`` from the substrate normal grazes the top
corner of the wall it sweeps over and shades a floor strip of width
``d*tan(|theta|)`` next to that wall.  Two depositions at opposite tilts
(with an oxidation in between) leave a central strip coated by both films;
that strip is the tunnel junction.  Narrowing the trench pushes the shadow
past the midpoint and the overlap vanishes, which is how the junction width
and length are patterned without any resist.

The model is deliberately first order: films are infinitely thin for
shadowing purposes and the first electrode's own edge casts no shadow on the
second deposition.  Because both shadows hang from top corners, the overlap
width does not depend on the sidewall angle for any tilt steeper than the
wall-slope complement (all practical tilts; the wall base only matters for
near-normal beams, where the coated region is clipped to the floor extent).

All lengths are in nanometers; junction areas are reported in um^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SameSideDeposition, ValidationError

__all__ = [
    "TrenchProfile",
    "DepositionStep",
    "FloorCoverage",
    "JunctionGeometry",
    "effective_thickness",
    "floor_shadow",
    "coverage",
    "junction_geometry",
    "overlap_vs_rotation",
    "min_width_for_overlap",
]

NM2_PER_UM2 = 1e6


def _check_tilt(tilt_deg: float) -> None:
    if not abs(tilt_deg) < 90.0:
        raise ValidationError(f"tilt angle must satisfy |tilt| < 90 deg, got {tilt_deg}")


def _check_rotation(rotation_deg: float) -> None:
    if not abs(rotation_deg) < 90.0:
        raise ValidationError(f"in-plane rotation must satisfy |rot| < 90 deg, got {rotation_deg}")


@dataclass(frozen=True)
class TrenchProfile:
    """Etched trench: depth, sidewall angle, piecewise-constant top width.

    Parameters
    ----------
    depth_nm:
        Etch depth in nm.
    sidewall_deg:
        Sidewall angle measured from horizontal, in (0, 90]; vertical walls
        are 90.  Dry-etched Si trenches typically come out at 85-88.
    segments:
        Ordered ``(length_nm, top_width_nm)`` pairs along the trench axis.
        Width transitions are sharp.
    """

    depth_nm: float
    sidewall_deg: float
    segments: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.depth_nm > 0:
            raise ValidationError(f"trench depth must be > 0, got {self.depth_nm}")
        if not 0.0 < self.sidewall_deg <= 90.0:
            raise ValidationError(
                f"sidewall angle must lie in (0, 90] deg, got {self.sidewall_deg}"
            )
        segs = tuple((float(ln), float(w)) for ln, w in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValidationError("trench needs at least one segment")
        inset = self.base_inset_nm
        for i, (length, width) in enumerate(segs):
            if not length > 0:
                raise ValidationError(f"segment {i}: length must be > 0, got {length}")
            if not width > 0:
                raise ValidationError(f"segment {i}: top width must be > 0, got {width}")
            if not width > 2.0 * inset:
                raise ValidationError(
                    f"segment {i}: top width {width} nm does not clear the wall bases "
                    f"(needs > {2.0 * inset:.1f} nm at {self.sidewall_deg} deg sidewalls)"
                )

    @property
    def base_inset_nm(self) -> float:
        """Horizontal inset of each wall base from its top edge, d*cot(phi)."""
        phi = math.radians(self.sidewall_deg)
        return self.depth_nm * math.cos(phi) / math.sin(phi)


@dataclass(frozen=True)
class DepositionStep:
    """One angled evaporation.

    ``tilt_deg`` is signed: positive and negative tilts approach the trench
    from opposite azimuths.  ``rotation_deg`` models in-plane chip
    misalignment during loading; 0 means the beam's horizontal component is
    exactly cross-trench.
    """

    tilt_deg: float
    nominal_nm: float
    rotation_deg: float = 0.0

    def __post_init__(self) -> None:
        _check_tilt(self.tilt_deg)
        if not self.nominal_nm > 0:
            raise ValidationError(f"nominal thickness must be > 0, got {self.nominal_nm}")
        _check_rotation(self.rotation_deg)


@dataclass(frozen=True)
class FloorCoverage:
    """Per-segment floor interval coated by a single deposition.

    Intervals are expressed in the cross-trench coordinate whose origin is
    the top edge of the wall a positive-tilt beam sweeps over, increasing
    toward the far wall.  ``None`` marks a fully shadowed segment.
    """

    intervals: tuple[tuple[float, float] | None, ...]

    def covered_widths(self) -> tuple[float, ...]:
        return tuple(0.0 if iv is None else iv[1] - iv[0] for iv in self.intervals)


@dataclass(frozen=True)
class JunctionGeometry:
    """Overlap-junction dimensions; all zeros when no overlap forms.

    ``overlap_width_nm`` is the length-weighted mean overlap over the
    forming segments, so ``area_um2 == overlap_width_nm * overlap_length_nm
    * 1e-6`` holds even if the forming run spans several widths.
    ``axial_shift_nm`` is the along-trench displacement of each film's
    shadow pattern, nonzero only under in-plane rotation.
    """

    overlap_width_nm: float
    overlap_length_nm: float
    area_um2: float
    formed: bool
    segment_overlaps_nm: tuple[float, ...] = ()
    axial_shift_nm: tuple[float, float] = (0.0, 0.0)

    def record(self) -> dict:
        """Flat record used by the CLI and result files."""
        return {
            "overlap_width_nm": self.overlap_width_nm,
            "overlap_length_nm": self.overlap_length_nm,
            "area_um2": self.area_um2,
            "formed": self.formed,
        }


def effective_thickness(nominal_nm: float, tilt_deg: float) -> float:
    """Film thickness landing on a horizontal surface from a tilted beam.

    The crystal monitor reads the flux along the beam, so the substrate
    collects ``nominal * cos(tilt)``: a 30.5 nm nominal deposition at 49 deg
    lands 20 nm on the floor.
    """
    _check_tilt(tilt_deg)
    if not nominal_nm > 0:
        raise ValidationError(f"nominal thickness must be > 0, got {nominal_nm}")
    return nominal_nm * math.cos(math.radians(tilt_deg))


def floor_shadow(depth_nm: float, tilt_deg: float) -> float:
    """Cross-trench width of the floor strip shaded by the upstream wall.

    The beam grazes the wall's top corner and first reaches the floor
    ``depth * tan(|tilt|)`` from that edge.  A vertical beam casts none.
    """
    _check_tilt(tilt_deg)
    if not depth_nm > 0:
        raise ValidationError(f"depth must be > 0, got {depth_nm}")
    return depth_nm * math.tan(math.radians(abs(tilt_deg)))


def _projected_shadow(depth_nm: float, step: DepositionStep, rotation_deg: float) -> float:
    # rotating the chip in plane leaves only the cross-trench component of
    # the beam's horizontal direction to set the shadow width
    return floor_shadow(depth_nm, step.tilt_deg) * math.cos(math.radians(rotation_deg))


def _axial_shift(depth_nm: float, step: DepositionStep, rotation_deg: float) -> float:
    # signed along-trench displacement of the shadow pattern
    return depth_nm * math.tan(math.radians(step.tilt_deg)) * math.sin(math.radians(rotation_deg))


def coverage(profile: TrenchProfile, step: DepositionStep) -> FloorCoverage:
    """Floor interval coated by one deposition, per trench segment.

    For a positive tilt the coated strip runs from the shadow edge (clipped
    below at the wall-base inset) to the far wall base ``w - inset``;
    negative tilts mirror the interval.  A segment whose shadow reaches the
    far wall base is fully shadowed and reports ``None``.
    """
    shadow = _projected_shadow(profile.depth_nm, step, step.rotation_deg)
    inset = profile.base_inset_nm
    near = max(shadow, inset)
    intervals: list[tuple[float, float] | None] = []
    for _, width in profile.segments:
        if near >= width - inset:
            intervals.append(None)
        elif step.tilt_deg >= 0:
            intervals.append((near, width - inset))
        else:
            intervals.append((inset, width - near))
    return FloorCoverage(tuple(intervals))


def _check_opposite(tilt1_deg: float, tilt2_deg: float) -> None:
    if tilt1_deg * tilt2_deg >= 0:
        raise SameSideDeposition(
            "deposition tilts must approach from opposite sides, "
            f"got {tilt1_deg} and {tilt2_deg} deg"
        )


def _overlap_from_shadows(
    profile: TrenchProfile,
    shadow1: float,
    shadow2: float,
    shifts: tuple[float, float],
) -> JunctionGeometry:
    inset = profile.base_inset_nm
    near1 = max(shadow1, inset)
    near2 = max(shadow2, inset)
    overlaps = tuple(max(0.0, width - near1 - near2) for _, width in profile.segments)
    length = sum(ln for (ln, _), ov in zip(profile.segments, overlaps) if ov > 0)
    area_nm2 = sum(ln * ov for (ln, _), ov in zip(profile.segments, overlaps))
    formed = area_nm2 > 0
    return JunctionGeometry(
        overlap_width_nm=area_nm2 / length if formed else 0.0,
        overlap_length_nm=length if formed else 0.0,
        area_um2=area_nm2 / NM2_PER_UM2,
        formed=formed,
        segment_overlaps_nm=overlaps,
        axial_shift_nm=shifts,
    )


def junction_geometry(
    profile: TrenchProfile, step1: DepositionStep, step2: DepositionStep
) -> JunctionGeometry:
    """Junction overlap left by two opposite-tilt depositions.

    Per segment of top width ``w`` the overlap is ``w - s1 - s2`` with
    ``s_i = depth * tan(|tilt_i|)`` (clipped below at the wall-base inset),
    so the junction width follows the trench width and the junction length
    is the length of the segments wide enough to form one.  The sidewall
    angle cancels: both shadows are anchored at top edges.  Each step's own
    ``rotation_deg`` is honored.
    """
    _check_opposite(step1.tilt_deg, step2.tilt_deg)
    return _overlap_from_shadows(
        profile,
        _projected_shadow(profile.depth_nm, step1, step1.rotation_deg),
        _projected_shadow(profile.depth_nm, step2, step2.rotation_deg),
        (
            _axial_shift(profile.depth_nm, step1, step1.rotation_deg),
            _axial_shift(profile.depth_nm, step2, step2.rotation_deg),
        ),
    )


def overlap_vs_rotation(
    profile: TrenchProfile,
    step1: DepositionStep,
    step2: DepositionStep,
    rotation_deg: float,
) -> JunctionGeometry:
    """Junction overlap when the chip is rotated in plane by ``rotation_deg``.

    The rotation applies to both depositions, overriding each step's own
    ``rotation_deg``.  Projecting the flux vector shrinks the cross-trench
    shadow by cos(rotation) while each film's pattern slides
    ``depth * tan(tilt) * sin(rotation)`` along the trench (reported in
    ``axial_shift_nm``; the slide itself leaves per-segment overlap
    unchanged in this model).  At rotation 0 the result equals
    ``junction_geometry`` for unrotated steps.
    """
    _check_rotation(rotation_deg)
    _check_opposite(step1.tilt_deg, step2.tilt_deg)
    return _overlap_from_shadows(
        profile,
        _projected_shadow(profile.depth_nm, step1, rotation_deg),
        _projected_shadow(profile.depth_nm, step2, rotation_deg),
        (
            _axial_shift(profile.depth_nm, step1, rotation_deg),
            _axial_shift(profile.depth_nm, step2, rotation_deg),
        ),
    )


def min_width_for_overlap(depth_nm: float, tilt1_deg: float, tilt2_deg: float) -> float:
    """Trench width at and below which no junction forms.

    Returns the sum of the two shadow widths; a segment overlaps exactly
    when its top width exceeds this (the midpoint criterion for symmetric
    tilts).
    """
    _check_opposite(tilt1_deg, tilt2_deg)
    return floor_shadow(depth_nm, tilt1_deg) + floor_shadow(depth_nm, tilt2_deg)
