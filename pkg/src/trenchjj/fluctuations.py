"""Fluctuation statistics for coherence-time trajectories.

A repeated T1 (or T2E) measurement gives a uniformly sampled time trace.
This module computes the statistics used to characterize its stability:

* overlapping Allan deviation of the trace treated as frequency-type data,
  reported in the trace's own units (us) so it reads directly against the
  coherence time;
* Welch power spectral density with 50%-overlapping segments and a periodic
  Hann window, one-sided, density-normalized so white noise of variance
  sigma^2 sits at 2*sigma^2*tau0;
* histogram and robust summaries, including the robust coefficient of
  variation RCV = IQR/median (quartiles by linear interpolation);
* illustrative reference lines: a slope -1 line anchored at the second PSD
  point and a white-noise level A_W, drawn as sqrt(A_W/tau) on Allan axes.
  Neither is a fit.

White noise shows up as a -1/2 log-log slope in the Allan deviation and a
flat PSD; a peak in the Allan curve above the white line signals a
Lorentzian (telegraph) process and is reported as a bare local maximum,
never as a fitted model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TraceTooShort, ValidationError, ZeroMedian

__all__ = [
    "GAUSSIAN_IQR_FACTOR",
    "TimeTrace",
    "AllanResult",
    "PsdResult",
    "TraceSummary",
    "ReferenceLines",
    "overlapping_allan",
    "welch_psd",
    "reference_lines",
    "summarize",
    "gaussian_rcv_bound",
    "allan_peaks_above_white",
]

MIN_TRACE_LEN = 16

# IQR of a Gaussian is 2*Phi^-1(3/4) standard deviations
GAUSSIAN_IQR_FACTOR = 1.3489795003921634


@dataclass(frozen=True)
class TimeTrace:
    """Uniformly sampled trace of a coherence time.

    ``tau0_s`` is the sampling interval in seconds; ``values_us`` the
    samples (us).  Gaps are not representable: drop or interpolate them
    before constructing the trace.
    """

    tau0_s: float
    values_us: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        if not self.tau0_s > 0:
            raise ValidationError(f"sampling interval must be > 0, got {self.tau0_s}")
        values = np.asarray(self.values_us, dtype=float)
        object.__setattr__(self, "values_us", values)
        if values.ndim != 1:
            raise ValidationError("trace values must be a 1-D array")
        if values.size < MIN_TRACE_LEN:
            raise TraceTooShort(
                f"trace has {values.size} samples, needs at least {MIN_TRACE_LEN}"
            )

    @property
    def duration_s(self) -> float:
        return self.tau0_s * self.values_us.size


@dataclass(frozen=True)
class AllanResult:
    """Overlapping Allan deviation versus integration time."""

    taus_s: np.ndarray
    adev_us: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class PsdResult:
    """One-sided Welch power spectral density."""

    freqs_hz: np.ndarray
    psd_us2_per_hz: np.ndarray
    segment_count: int


@dataclass(frozen=True)
class TraceSummary:
    """Histogram and robust statistics of a trace."""

    mean: float
    stddev: float
    median: float
    iqr: float
    rcv: float
    hist_counts: np.ndarray
    hist_edges: np.ndarray


@dataclass(frozen=True)
class ReferenceLines:
    """Illustrative noise guides for the PSD and Allan plots (not fits)."""

    freqs_hz: np.ndarray
    one_over_f: np.ndarray
    white_psd: np.ndarray
    taus_s: np.ndarray | None = None
    white_adev: np.ndarray | None = None


def default_m_grid(n: int) -> np.ndarray:
    """Averaging factors: every integer up to N/8, then log-spaced to N/4.

    The dense head keeps full resolution where estimates are tight; the
    log tail (at most 30 points per decade) caps the cost of large
    averaging factors.  The largest factor is N/4 so the longest
    integration time stays at a quarter of the trace duration.
    """
    m_head_max = n // 8
    head = np.arange(1, m_head_max + 1)
    m_max = n // 4
    if m_max <= m_head_max:
        return head[head <= max(1, m_max)]
    decades = math.log10(m_max / max(1, m_head_max))
    n_tail = max(2, int(math.ceil(30 * decades)) + 1)
    tail = np.unique(
        np.round(np.geomspace(max(1, m_head_max), m_max, n_tail)).astype(int)
    )
    return np.unique(np.concatenate([head, tail[tail > m_head_max]]))


def overlapping_allan(trace: TimeTrace, m_values=None) -> AllanResult:
    """Overlapping Allan deviation of the trace.

    The samples are treated as frequency-type data: with block averages
    ybar_j over ``m`` consecutive samples,

        AVAR(m*tau0) = mean_j (ybar_{j+m} - ybar_j)^2 / 2

    taken over all N - 2m + 1 overlapping positions, and the deviation is
    its square root, in the same units as the samples.  ``m_values``
    overrides the default grid (integers, each <= N/4).
    """
    values = trace.values_us
    n = values.size
    if n < MIN_TRACE_LEN:
        raise TraceTooShort(f"trace has {n} samples, needs at least {MIN_TRACE_LEN}")
    if m_values is None:
        ms = default_m_grid(n)
    else:
        ms = np.unique(np.asarray(list(m_values), dtype=int))
        if ms.size == 0 or ms[0] < 1:
            raise ValidationError("averaging factors must be positive integers")
        if ms[-1] > n // 4:
            raise ValidationError(
                f"max averaging factor {ms[-1]} exceeds N/4 = {n // 4} "
                "(integration times are capped at a quarter of the trace)"
            )

    csum = np.concatenate([[0.0], np.cumsum(values)])
    adev = np.empty(ms.size)
    counts = np.empty(ms.size, dtype=int)
    for i, m in enumerate(ms):
        ybar = (csum[m:] - csum[:-m]) / m
        d = ybar[m:] - ybar[:-m]
        counts[i] = d.size
        adev[i] = math.sqrt(0.5 * float(np.mean(d * d)))
    return AllanResult(taus_s=ms * trace.tau0_s, adev_us=adev, counts=counts)


def _hann_periodic(length: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(length) / length))


def welch_psd(trace: TimeTrace, segment_len: int = 128) -> PsdResult:
    """Welch PSD of the mean-subtracted trace, one-sided density.

    The global mean is removed once, the trace is split into
    50%-overlapping segments of ``segment_len`` samples, each segment is
    multiplied by a periodic Hann window, and the one-sided periodograms
    are averaged.  Normalization is the density convention compensated for
    window power, so white noise of variance sigma^2 reads 2*sigma^2*tau0
    (us^2/Hz); interior bins carry the factor 2, DC and Nyquist do not.
    """
    if segment_len < 2:
        raise ValidationError(f"segment length must be >= 2, got {segment_len}")
    values = trace.values_us
    n = values.size
    if n < segment_len:
        raise TraceTooShort(
            f"trace has {n} samples, needs at least segment_len = {segment_len}"
        )
    x = values - values.mean()
    step = segment_len // 2
    window = _hann_periodic(segment_len)
    starts = range(0, n - segment_len + 1, step)
    segments = np.stack([x[s : s + segment_len] * window for s in starts])
    spectra = np.abs(np.fft.rfft(segments, axis=1)) ** 2
    scale = 2.0 * trace.tau0_s / float(window @ window)
    psd = spectra.mean(axis=0) * scale
    psd[0] /= 2.0
    if segment_len % 2 == 0:
        psd[-1] /= 2.0
    freqs = np.fft.rfftfreq(segment_len, d=trace.tau0_s)
    return PsdResult(freqs_hz=freqs, psd_us2_per_hz=psd, segment_count=len(segments))


def reference_lines(psd: PsdResult, a_w: float, taus_s=None) -> ReferenceLines:
    """Illustrative 1/f and white-noise guides for the PSD and Allan plots.

    The 1/f line is anchored at the second PSD point with a log-log slope
    of -1 (NaN at DC).  The white line is the constant ``a_w`` on the PSD
    axes and sqrt(a_w/tau) on the Allan axes when ``taus_s`` is given.
    Neither line is fitted to anything.
    """
    freqs = psd.freqs_hz
    if freqs.size < 2:
        raise ValidationError("reference lines need a PSD with at least 2 points")
    if a_w < 0:
        raise ValidationError(f"white-noise level must be >= 0, got {a_w}")
    anchor_f = freqs[1]
    anchor_p = psd.psd_us2_per_hz[1]
    with np.errstate(divide="ignore"):
        one_over_f = np.where(freqs > 0, anchor_p * anchor_f / freqs, np.nan)
    white_psd = np.full_like(freqs, float(a_w))
    taus = None
    white_adev = None
    if taus_s is not None:
        taus = np.asarray(taus_s, dtype=float)
        white_adev = np.sqrt(a_w / taus)
    return ReferenceLines(
        freqs_hz=freqs,
        one_over_f=one_over_f,
        white_psd=white_psd,
        taus_s=taus,
        white_adev=white_adev,
    )


def summarize(trace: TimeTrace, bins: int = 30) -> TraceSummary:
    """Histogram plus robust statistics of the trace.

    Median uses the midpoint convention for even N; quartiles interpolate
    linearly between order statistics (the common type-7 rule), so the
    reported RCV = IQR/median is reproducible against box plots built the
    same way.  The returned mean and sample standard deviation are the
    parameters of the Gaussian overlay for the histogram.
    """
    values = trace.values_us
    if values.size < 4:
        raise ValidationError("summary statistics need at least 4 samples")
    if bins < 1:
        raise ValidationError(f"bins must be >= 1, got {bins}")
    median = float(np.median(values))
    if median == 0.0:
        raise ZeroMedian("median is zero; RCV undefined")
    q1, q3 = np.quantile(values, [0.25, 0.75])
    iqr = float(q3 - q1)
    counts, edges = np.histogram(values, bins=bins)
    return TraceSummary(
        mean=float(values.mean()),
        stddev=float(values.std(ddof=1)),
        median=median,
        iqr=iqr,
        rcv=iqr / median,
        hist_counts=counts,
        hist_edges=edges,
    )


def gaussian_rcv_bound(sigma: float, mean: float) -> float:
    """RCV lower bound for works that publish only mean and sigma.

    Assumes a Gaussian distribution, whose IQR is about 1.349 sigma, so
    RCV ~ 1.349*sigma/mean.  Skewed distributions have a larger true RCV.
    """
    if not mean > 0:
        raise ValidationError(f"mean must be > 0, got {mean}")
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    return GAUSSIAN_IQR_FACTOR * sigma / mean


def allan_peaks_above_white(allan: AllanResult, a_w: float) -> list[tuple[float, float]]:
    """Local Allan-deviation maxima rising above the white-noise guide.

    A peak above sqrt(a_w/tau) hints at a Lorentzian (telegraph) noise
    process.  This is a plain local-maximum report, not a model fit.
    """
    if a_w < 0:
        raise ValidationError(f"white-noise level must be >= 0, got {a_w}")
    taus, adev = allan.taus_s, allan.adev_us
    peaks = []
    for i in range(1, taus.size - 1):
        if adev[i] > adev[i - 1] and adev[i] >= adev[i + 1]:
            if adev[i] > math.sqrt(a_w / taus[i]):
                peaks.append((float(taus[i]), float(adev[i])))
    return peaks
