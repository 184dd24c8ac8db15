"""Data ingestion, result emission, and the end-to-end pipeline.

Numeric result files are CSV with 17 significant digits or JSON with
shortest-roundtrip floats; both are byte-deterministic for identical
inputs.  A ``MANIFEST.json`` accompanies every pipeline run recording the
tool version, input digests, and per-stage status and timing; numeric
outputs from a failed run are retained and the manifest marks the failed
stage and everything after it as skipped.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import DeviceConfig
from .decayfit import DecayCurve, fit_echo, fit_t1, residual_diagnostics
from .electrical import JunctionElectrical, critical_current
from .errors import (
    EmptyTrace,
    GapError,
    ParseError,
    PipelineStageError,
    TrenchJJError,
    ValidationError,
)
from .fluctuations import TimeTrace, overlapping_allan, summarize, welch_psd
from .geometry import junction_geometry
from .transmon import quality_factors

__all__ = [
    "ingest_trace",
    "read_decay_curve",
    "write_csv",
    "write_json",
    "RunReport",
    "StageRecord",
    "run_pipeline",
]


def _float_repr(value) -> str:
    return "%.17g" % float(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    """CSV writer with full double precision (17 significant digits)."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    _float_repr(v) if isinstance(v, (int, float, np.floating)) and not isinstance(v, bool) else v
                    for v in row
                ]
            )


def write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(obj, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _read_rows(path: Path, required: list[str]) -> tuple[list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: missing CSV header")
        fields = [f.strip() for f in reader.fieldnames]
        for name in required:
            if name not in fields:
                raise ParseError(
                    f"{path}: missing required column '{name}' (found: {', '.join(fields)})"
                )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            clean = {}
            for key, value in row.items():
                if key is None:
                    raise ParseError(f"{path}: too many fields", line=lineno)
                clean[key.strip()] = value
            for name in required:
                try:
                    clean[name] = float(clean[name])
                except (TypeError, ValueError):
                    raise ParseError(
                        f"{path}: column '{name}': expected a number, got {clean.get(name)!r}",
                        line=lineno,
                    ) from None
            rows.append(clean)
    return fields, rows


def ingest_trace(path, column: str = "value_us") -> TimeTrace:
    """Read a trace CSV (``timestamp_s``, value column) into a TimeTrace.

    The sampling interval is the median timestamp difference; any interval
    deviating from it by more than 50% raises :class:`GapError` naming the
    offending rows.  Drop or interpolate gaps before ingesting.
    """
    path = Path(path)
    _, rows = _read_rows(path, ["timestamp_s", column])
    if len(rows) < 2:
        raise EmptyTrace(f"{path}: needs at least 2 rows, got {len(rows)}")
    stamps = np.array([row["timestamp_s"] for row in rows])
    values = np.array([row[column] for row in rows])
    diffs = np.diff(stamps)
    tau0 = float(np.median(diffs))
    if tau0 <= 0:
        raise ValidationError(f"{path}: timestamps must be increasing")
    bad = np.nonzero(np.abs(diffs - tau0) > 0.5 * tau0)[0]
    if bad.size:
        indices = tuple(int(i) + 1 for i in bad)
        shown = ", ".join(str(i) for i in indices[:10])
        raise GapError(
            f"{path}: {bad.size} interval(s) deviate >50% from tau0 = {tau0} s "
            f"at sample indices {shown}"
            + ("..." if bad.size > 10 else ""),
            indices=indices,
        )
    return TimeTrace(tau0_s=tau0, values_us=values, label=path.stem)


def read_decay_curve(path) -> DecayCurve:
    """Read a decay-curve CSV with columns delay_us, signal[, sigma]."""
    path = Path(path)
    fields, rows = _read_rows(path, ["delay_us", "signal"])
    if not rows:
        raise EmptyTrace(f"{path}: no data rows")
    delays = np.array([row["delay_us"] for row in rows])
    signals = np.array([row["signal"] for row in rows])
    sigma = None
    if "sigma" in fields:
        try:
            sigma = np.array([float(row["sigma"]) for row in rows])
        except (TypeError, ValueError):
            raise ParseError(f"{path}: column 'sigma': expected numbers") from None
    return DecayCurve(delays_us=delays, signals=signals, sigma=sigma)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class StageRecord:
    name: str
    status: str  # ok | failed | skipped
    outputs: tuple[str, ...] = ()
    seconds: float = 0.0
    error: str | None = None


@dataclass(frozen=True)
class RunReport:
    version: str
    input_digests: dict[str, str]
    stages: tuple[StageRecord, ...]

    @property
    def complete(self) -> bool:
        return all(stage.status == "ok" for stage in self.stages)

    def manifest(self) -> dict:
        return {
            "tool": "trenchjj",
            "version": self.version,
            "inputs": dict(self.input_digests),
            "complete": self.complete,
            "stages": [
                {
                    "name": s.name,
                    "status": s.status,
                    "outputs": list(s.outputs),
                    "seconds": s.seconds,
                    **({"error": s.error} if s.error else {}),
                }
                for s in self.stages
            ],
        }


def write_fluct_outputs(
    trace: TimeTrace, out_dir: Path, segment_len: int = 128, bins: int = 30
) -> list[str]:
    """Allan/PSD/summary CSVs for one trace; returns the file names."""
    stem = trace.label or "trace"
    allan = overlapping_allan(trace)
    psd = welch_psd(trace, segment_len=segment_len)
    summary = summarize(trace, bins=bins)
    names = [
        f"{stem}_allan.csv",
        f"{stem}_psd.csv",
        f"{stem}_summary.csv",
        f"{stem}_hist.csv",
    ]
    write_csv(
        out_dir / names[0],
        ["tau_s", "adev_us", "count"],
        zip(allan.taus_s, allan.adev_us, allan.counts),
    )
    write_csv(
        out_dir / names[1],
        ["freq_hz", "psd_us2_per_hz"],
        zip(psd.freqs_hz, psd.psd_us2_per_hz),
    )
    write_csv(
        out_dir / names[2],
        ["mean_us", "stddev_us", "median_us", "iqr_us", "rcv", "n_samples", "tau0_s"],
        [
            (
                summary.mean,
                summary.stddev,
                summary.median,
                summary.iqr,
                summary.rcv,
                trace.values_us.size,
                trace.tau0_s,
            )
        ],
    )
    write_csv(
        out_dir / names[3],
        ["bin_lo_us", "bin_hi_us", "count"],
        zip(summary.hist_edges[:-1], summary.hist_edges[1:], summary.hist_counts),
    )
    return names


def _fit_record(curve: DecayCurve, kind: str) -> dict:
    result = fit_t1(curve) if kind == "t1" else fit_echo(curve)
    diag = residual_diagnostics(curve, result)
    rec = result.record()
    rec["diagnostics"] = {
        "lag1_autocorr": diag.lag1_autocorr,
        "reduced_chisq": diag.reduced_chisq,
        "passed": diag.passed,
    }
    return rec


def run_pipeline(
    config: DeviceConfig,
    traces,
    out_dir,
    config_path=None,
    t1_curve=None,
    echo_curve=None,
    segment_len: int = 128,
    bins: int = 30,
    trace_column: str = "value_us",
) -> RunReport:
    """Run the configured stages geometry -> junction -> transmon -> fit -> fluct.

    Only stages whose inputs are present run: geometry needs the trench and
    two deposition steps, junction its section with ``rn_ohm``, transmon its
    section, fit any curve file, fluct any trace file.  Result files carry
    stable names in ``out_dir``.  On the first stage failure the remaining
    stages are marked skipped, the manifest is still written, and a
    :class:`PipelineStageError` wrapping the cause is raised.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_paths = [Path(p) for p in (traces or [])]

    digests = {}
    if config_path is not None:
        digests[str(config_path)] = _sha256(Path(config_path))
    for path in trace_paths + [Path(p) for p in (t1_curve, echo_curve) if p is not None]:
        digests[str(path)] = _sha256(path) if path.exists() else "missing"

    stages: list[tuple[str, object]] = []
    if config.trench is not None and len(config.deposition) >= 2:
        stages.append(("geometry", None))
    if config.junction is not None and config.junction.rn_ohm is not None:
        stages.append(("junction", None))
    if config.transmon is not None:
        stages.append(("transmon", None))
    if t1_curve is not None or echo_curve is not None:
        stages.append(("fit", None))
    if trace_paths:
        stages.append(("fluct", None))
    if not stages:
        raise ValidationError("nothing to run: no configured sections, curves, or traces")

    records: list[StageRecord] = []
    failure: PipelineStageError | None = None
    for i, (name, _) in enumerate(stages):
        start = time.perf_counter()
        try:
            outputs = _run_stage(
                name,
                config,
                trace_paths,
                out_dir,
                t1_curve,
                echo_curve,
                segment_len,
                bins,
                trace_column,
            )
            records.append(
                StageRecord(
                    name=name,
                    status="ok",
                    outputs=tuple(outputs),
                    seconds=time.perf_counter() - start,
                )
            )
        except (TrenchJJError, OSError) as exc:
            records.append(
                StageRecord(
                    name=name,
                    status="failed",
                    seconds=time.perf_counter() - start,
                    error=str(exc),
                )
            )
            records.extend(
                StageRecord(name=later, status="skipped") for later, _ in stages[i + 1 :]
            )
            failure = PipelineStageError(name, exc)
            break

    report = RunReport(
        version=__version__, input_digests=digests, stages=tuple(records)
    )
    write_json(out_dir / "MANIFEST.json", report.manifest())
    if failure is not None:
        raise failure
    return report


def _run_stage(
    name: str,
    config: DeviceConfig,
    trace_paths: list[Path],
    out_dir: Path,
    t1_curve,
    echo_curve,
    segment_len: int,
    bins: int,
    trace_column: str,
) -> list[str]:
    if name == "geometry":
        geom = junction_geometry(config.trench, config.deposition[0], config.deposition[1])
        write_json(out_dir / "geometry.json", geom.record())
        return ["geometry.json"]

    if name == "junction":
        settings = config.junction
        if settings.area_um2 is not None:
            rec = JunctionElectrical(
                settings.rn_ohm, settings.area_um2, settings.delta_uev
            ).record()
        else:
            rec = {
                "rn_ohm": settings.rn_ohm,
                "delta_uev": settings.delta_uev,
                "ic_na": critical_current(settings.rn_ohm, settings.delta_uev),
            }
        write_json(out_dir / "junction.json", rec)
        return ["junction.json"]

    if name == "transmon":
        rec = config.transmon.record()
        if config.t1_us is not None and config.t2e_us is not None:
            rec.update(
                quality_factors(
                    config.transmon.f_qubit_mhz, config.t1_us, config.t2e_us
                ).record()
            )
        write_json(out_dir / "transmon.json", _json_safe(rec))
        return ["transmon.json"]

    if name == "fit":
        outputs = []
        for kind, path in (("t1", t1_curve), ("echo", echo_curve)):
            if path is None:
                continue
            rec = _fit_record(read_decay_curve(path), kind)
            fname = f"fit_{kind}.json"
            write_json(out_dir / fname, rec)
            outputs.append(fname)
        return outputs

    if name == "fluct":
        outputs = []
        for path in trace_paths:
            trace = ingest_trace(path, column=trace_column)
            outputs.extend(
                write_fluct_outputs(trace, out_dir, segment_len=segment_len, bins=bins)
            )
        return outputs

    raise ValidationError(f"unknown stage '{name}'")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    return obj
