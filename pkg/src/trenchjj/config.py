"""Device configuration: a sectioned key-value file, or the same tree as JSON.

The plain-text format is line-oriented and diff-friendly::

    # comment (';' also starts one)
    [trench]
    depth_nm = 1100
    sidewall_deg = 86
    segments = 180:3000, 2000:1000     # length_nm:width_nm pairs

    [deposition.1]
    tilt_deg = 49
    nominal_nm = 30.5

    [deposition.2]
    tilt_deg = -49
    nominal_nm = 123

    [junction]
    rn_ohm = 6600
    area_um2 = 0.0648
    delta_uev = 180

    [transmon]
    f_qubit_mhz = 2811.6
    alpha_mhz = 190.5
    chi_khz = -70
    kappa_khz = 667
    f_res_ghz = 6.65
    nbar = 0.01

A ``.json`` file (or any file starting with ``{``) is read as the same
structure: top-level keys ``trench``, ``deposition`` (a list of objects),
``junction``, ``transmon``; trench segments are ``[length_nm, width_nm]``
pairs.  Unknown sections and keys are dropped with a warning naming them;
all domain-type invariants are re-validated while loading.  Defaults:
``delta_uev = 180`` and ``nbar = 0.01``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingSection, ParseError, ValidationError
from .geometry import DepositionStep, TrenchProfile
from .transmon import TransmonParams

__all__ = ["JunctionSettings", "DeviceConfig", "load_config"]

DEFAULT_DELTA_UEV = 180.0
DEFAULT_NBAR = 0.01


@dataclass(frozen=True)
class JunctionSettings:
    """Electrical inputs for the junction stage; delta defaults to 180 ueV."""

    rn_ohm: float | None = None
    area_um2: float | None = None
    delta_uev: float = DEFAULT_DELTA_UEV

    def __post_init__(self) -> None:
        for name in ("rn_ohm", "area_um2"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValidationError(f"{name} must be > 0, got {value}")
        if not self.delta_uev > 0:
            raise ValidationError(f"delta_uev must be > 0, got {self.delta_uev}")


@dataclass(frozen=True)
class DeviceConfig:
    """Validated configuration for one device."""

    trench: TrenchProfile | None = None
    deposition: tuple[DepositionStep, ...] = ()
    junction: JunctionSettings | None = None
    transmon: TransmonParams | None = None
    t1_us: float | None = None
    t2e_us: float | None = None

    def require(self, section: str):
        value = getattr(self, section)
        if value is None or (section == "deposition" and len(value) < 2):
            raise MissingSection(
                f"config is missing the '{section}' section"
                + (" (two deposition steps needed)" if section == "deposition" else "")
            )
        return value


_TRENCH_KEYS = {"depth_nm", "sidewall_deg", "segments"}
_DEPOSITION_KEYS = {"tilt_deg", "nominal_nm", "rotation_deg"}
_JUNCTION_KEYS = {"rn_ohm", "area_um2", "delta_uev"}
_TRANSMON_KEYS = {
    "f_qubit_mhz",
    "alpha_mhz",
    "chi_khz",
    "kappa_khz",
    "f_res_ghz",
    "nbar",
    "t1_us",
    "t2e_us",
}


def _strip_comment(line: str) -> str:
    for marker in ("#", ";"):
        pos = line.find(marker)
        if pos >= 0:
            line = line[:pos]
    return line.rstrip()


def _parse_text(text: str) -> dict:
    """Parse the sectioned key-value format into a raw dict-of-dicts tree."""
    sections: dict[str, dict[str, str]] = {}
    current: dict[str, str] | None = None
    current_name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", line=lineno, column=len(line))
            name = line[1:-1].strip().lower()
            if not name:
                raise ParseError("empty section name", line=lineno, column=2)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", line=lineno)
            current = {}
            current_name = name
            sections[name] = current
            continue
        if "=" not in line:
            raise ParseError(
                f"expected 'key = value', got {line!r}", line=lineno, column=len(line)
            )
        if current is None:
            raise ParseError(f"key outside any section: {line!r}", line=lineno, column=1)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not key:
            raise ParseError("empty key", line=lineno, column=1)
        if key in current:
            raise ParseError(f"duplicate key '{key}' in [{current_name}]", line=lineno)
        current[key] = value
    return sections


def _parse_float(section: str, key: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError(f"[{section}] {key}: expected a number, got {value!r}") from None


def _parse_segments(value) -> tuple[tuple[float, float], ...]:
    if isinstance(value, str):
        pairs = []
        for chunk in value.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(":")
            if len(parts) != 2:
                raise ParseError(
                    f"[trench] segments: expected 'length_nm:width_nm', got {chunk!r}"
                )
            pairs.append(
                (
                    _parse_float("trench", "segments", parts[0]),
                    _parse_float("trench", "segments", parts[1]),
                )
            )
        if not pairs:
            raise ParseError("[trench] segments: no segments given")
        return tuple(pairs)
    try:
        return tuple((float(ln), float(w)) for ln, w in value)
    except (TypeError, ValueError):
        raise ParseError(f"[trench] segments: malformed segment list {value!r}") from None


def _warn_unknown(section: str, data: dict, known: set[str]) -> dict:
    unknown = sorted(set(data) - known)
    if unknown:
        warnings.warn(
            f"config section [{section}] has unknown keys, ignored: {', '.join(unknown)}",
            stacklevel=3,
        )
    return {k: v for k, v in data.items() if k in known}


def _build_config(tree: dict) -> DeviceConfig:
    known_sections = {"trench", "junction", "transmon", "deposition"}
    extra = sorted(
        name
        for name in tree
        if name not in known_sections and not name.startswith("deposition.")
    )
    if extra:
        warnings.warn(f"unknown config sections ignored: {', '.join(extra)}", stacklevel=2)

    trench = None
    if "trench" in tree:
        data = _warn_unknown("trench", dict(tree["trench"]), _TRENCH_KEYS)
        for key in ("depth_nm", "sidewall_deg", "segments"):
            if key not in data:
                raise ValidationError(f"[trench] missing required key '{key}'")
        trench = TrenchProfile(
            depth_nm=_parse_float("trench", "depth_nm", data["depth_nm"]),
            sidewall_deg=_parse_float("trench", "sidewall_deg", data["sidewall_deg"]),
            segments=_parse_segments(data["segments"]),
        )

    steps = []
    if isinstance(tree.get("deposition"), list):
        raw_steps = [(f"deposition[{i}]", d) for i, d in enumerate(tree["deposition"])]
    else:
        names = sorted(
            (name for name in tree if name.startswith("deposition.")),
            key=lambda s: s.split(".", 1)[1],
        )
        raw_steps = [(name, tree[name]) for name in names]
    for name, raw in raw_steps:
        data = _warn_unknown(name, dict(raw), _DEPOSITION_KEYS)
        for key in ("tilt_deg", "nominal_nm"):
            if key not in data:
                raise ValidationError(f"[{name}] missing required key '{key}'")
        steps.append(
            DepositionStep(
                tilt_deg=_parse_float(name, "tilt_deg", data["tilt_deg"]),
                nominal_nm=_parse_float(name, "nominal_nm", data["nominal_nm"]),
                rotation_deg=_parse_float(name, "rotation_deg", data.get("rotation_deg", 0.0)),
            )
        )

    junction = None
    if "junction" in tree:
        data = _warn_unknown("junction", dict(tree["junction"]), _JUNCTION_KEYS)
        junction = JunctionSettings(
            rn_ohm=(
                _parse_float("junction", "rn_ohm", data["rn_ohm"]) if "rn_ohm" in data else None
            ),
            area_um2=(
                _parse_float("junction", "area_um2", data["area_um2"])
                if "area_um2" in data
                else None
            ),
            delta_uev=_parse_float(
                "junction", "delta_uev", data.get("delta_uev", DEFAULT_DELTA_UEV)
            ),
        )

    transmon = None
    t1_us = None
    t2e_us = None
    if "transmon" in tree:
        data = _warn_unknown("transmon", dict(tree["transmon"]), _TRANSMON_KEYS)
        for key in ("f_qubit_mhz", "alpha_mhz"):
            if key not in data:
                raise ValidationError(f"[transmon] missing required key '{key}'")
        get = lambda key: (
            _parse_float("transmon", key, data[key]) if key in data else None
        )
        transmon = TransmonParams(
            f_qubit_mhz=get("f_qubit_mhz"),
            alpha_mhz=get("alpha_mhz"),
            chi_khz=get("chi_khz"),
            kappa_khz=get("kappa_khz"),
            f_res_ghz=get("f_res_ghz"),
            nbar=get("nbar") if "nbar" in data else DEFAULT_NBAR,
        )
        t1_us = get("t1_us")
        t2e_us = get("t2e_us")

    return DeviceConfig(
        trench=trench,
        deposition=tuple(steps),
        junction=junction,
        transmon=transmon,
        t1_us=t1_us,
        t2e_us=t2e_us,
    )


def load_config(path) -> DeviceConfig:
    """Load and fully validate a device config (key-value text or JSON)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if path.suffix.lower() == ".json" or stripped.startswith("{"):
        try:
            tree = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
        if not isinstance(tree, dict):
            raise ParseError("top-level JSON value must be an object")
        tree = {str(k).lower(): v for k, v in tree.items()}
    else:
        tree = _parse_text(text)
    return _build_config(tree)
