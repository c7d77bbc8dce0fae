"""Recover singular-point locations from a spectrum; classify model zeros.

The residual sequence d_n = 2n(z_n - n) carries the mean level of the
potential as its constant block and each order-0 singularity at x0 as an
oscillation c*sin(2*x0*n)/(2*pi*n); higher-order singularities oscillate with
faster-decaying envelopes.  A tapered DFT over the index n therefore shows a
peak at angular frequency 2*x0, i.e. the singular point sits at half the
peak frequency.  Resolution is one frequency bin, pi/N in location units,
and is reported as such - never tighter.

Classification of exponential-sum model zeros is by counting rectangle:
each located zero is attached to the gap whose two-frequency partial sum
vanishes there, and per-label spacing/density statistics are compared with
the predicted spacing pi/(omega_l - omega_{l-1}) (the merged middle family
against pi/(2*(omega_{J+1} - omega_J))).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .eigen import Spectrum
from .errors import DomainError, InsufficientDataError, UnsupportedPotentialError
from .expansion import ExpSum
from .potential import PI
from .zeros import CountingRectangle

__all__ = [
    "RecoveryOptions",
    "RecoveryReport",
    "SubsequenceLabeling",
    "DensityRow",
    "recover_singularities",
    "classify_model_zeros",
    "density_report",
    "label_mean_spacing",
    "predicted_spacing",
    "recovery_report_to_json",
    "recovery_peaks_to_csv",
    "recovery_series_to_csv",
]

MIN_EIGENVALUES = 64


@dataclass(frozen=True)
class RecoveryOptions:
    peak_threshold_factor: float = 5.0   # times the median magnitude
    guard_location: float = 0.05         # ignore candidate locations below this
    merge_bins: int = 3                  # peaks closer than this merge


@dataclass(frozen=True)
class RecoveryReport:
    estimated_locations: tuple   # (location, peak magnitude), ascending
    resolution: float            # frequency-bin width in location units: pi/N
    detrended_mean: float        # removed constant block (mean-level estimate)
    n_used: int
    dft_locations: tuple         # location grid of the magnitude series
    dft_magnitudes: tuple

    def __post_init__(self):
        locs = [x for x, _ in self.estimated_locations]
        if locs != sorted(locs):
            raise ValueError("estimated locations must be sorted ascending")
        if any(not 0.0 < x < PI / 2 for x in locs):
            raise ValueError("estimated locations must lie in (0, pi/2)")


def recover_singularities(spec: Spectrum,
                          options: RecoveryOptions = RecoveryOptions()
                          ) -> RecoveryReport:
    """Locate singular points from the residual sequence of a spectrum."""
    n_used = spec.n_max
    if n_used < MIN_EIGENVALUES:
        raise InsufficientDataError(
            f"recovery needs at least {MIN_EIGENVALUES} eigenvalues, got {n_used}")
    if spec.index_offset != 0:
        raise UnsupportedPotentialError(
            "recovery expects a potential with no nonpositive spectrum "
            f"(index offset {spec.index_offset})")
    n = np.arange(1, n_used + 1, dtype=float)
    d = 2.0 * n * (spec.z_values() - n)
    mean = float(d.mean())
    window = np.hanning(n_used)
    mags = np.abs(np.fft.rfft((d - mean) * window))
    k = np.arange(len(mags))
    locations = PI * k / n_used          # candidate x = (angular freq)/2
    resolution = PI / n_used

    k_min = max(1, int(math.ceil(options.guard_location * n_used / PI)))
    k_max = n_used // 2 - 1              # exclude DC band and Nyquist
    band = mags[k_min:k_max]
    if band.size == 0:
        raise InsufficientDataError("spectrum too short for the peak band")
    threshold = options.peak_threshold_factor * float(np.median(band))

    peaks = []
    for i in range(k_min, k_max):
        lo = max(0, i - options.merge_bins)
        if mags[i] > threshold and mags[i] >= mags[lo:i + options.merge_bins + 1].max():
            peaks.append((float(locations[i]), float(mags[i])))
    # merge near-coincident maxima, keeping the strongest
    peaks.sort()
    merged = []
    for loc, mag in peaks:
        if merged and loc - merged[-1][0] < options.merge_bins * resolution:
            if mag > merged[-1][1]:
                merged[-1] = (loc, mag)
        else:
            merged.append((loc, mag))
    return RecoveryReport(estimated_locations=tuple(merged),
                          resolution=resolution, detrended_mean=mean,
                          n_used=n_used,
                          dft_locations=tuple(float(x) for x in locations),
                          dft_magnitudes=tuple(float(m) for m in mags))


# ---------------------------------------------------------------------------
# model-zero classification

@dataclass(frozen=True)
class SubsequenceLabeling:
    zeros: tuple                 # located model zeros (complex)
    labels: tuple                # rectangle label per zero
    window_alpha: float
    window_height: float

    def per_label(self) -> dict:
        out = {}
        for z, lab in zip(self.zeros, self.labels):
            out.setdefault(lab, []).append(z)
        return {lab: sorted(zs, key=lambda z: z.imag) for lab, zs in out.items()}


def classify_model_zeros(s: ExpSum, rectangles, zeros) -> SubsequenceLabeling:
    """Attach every zero to the rectangle whose gap partial sum vanishes there.

    Membership is geometric first (the zero must lie inside the rectangle's
    window; remember the rectangles share the imaginary-axis strip), with
    ties broken by the relative residual of each candidate's partial sum.
    """
    zeros = [complex(z) for z in zeros]
    subs = {r.label: s.subsum(r.freq_lo, r.freq_hi) for r in rectangles}
    labels = []
    for z in zeros:
        candidates = []
        for r in rectangles:
            h = r.h if r.h is not None else float("inf")
            if not (r.alpha <= z.imag <= r.alpha + r.s and abs(z.real) <= h):
                continue
            sub = subs[r.label]
            za = np.array([z])
            rel = float(np.abs(sub.eval(za))[0] / sub.term_magnitude(za)[0])
            candidates.append((rel, r.label))
        if not candidates:
            raise DomainError(
                f"zero {z} lies outside every counting rectangle "
                "(geometry misconfiguration)")
        labels.append(min(candidates)[1])
    alphas = [r.alpha for r in rectangles]
    heights = [r.s for r in rectangles]
    return SubsequenceLabeling(zeros=tuple(zeros), labels=tuple(labels),
                               window_alpha=min(alphas),
                               window_height=max(heights))


def predicted_spacing(rect: CountingRectangle) -> float:
    """Theoretical vertical spacing of the zero family of one gap."""
    return 2.0 * PI / rect.gap


def label_mean_spacing(labeling: SubsequenceLabeling, label: str) -> float:
    zs = labeling.per_label().get(label, [])
    if len(zs) < 2:
        raise InsufficientDataError(
            f"need at least two zeros with label {label} for a spacing")
    ims = np.array([z.imag for z in zs])
    return float(np.diff(ims).mean())


@dataclass(frozen=True)
class DensityRow:
    label: str
    count: int
    predicted: float
    budget: float
    slack: float
    passed: bool
    mean_spacing: float | None
    predicted_spacing: float


def density_report(labeling: SubsequenceLabeling, rectangles,
                   epsilon: float = 0.1):
    """Per-label empirical counts and spacings against the gap predictions.

    Returns (rows, total_row) where total_row = (total count, sum of
    predictions) - the sum of predictions telescopes to the window height.
    """
    groups = labeling.per_label()
    rows = []
    total = 0
    total_pred = 0.0
    for r in rectangles:
        zs = groups.get(r.label, [])
        pred = labeling.window_height * r.gap / (2.0 * PI)
        budget = 1.0 + epsilon
        count = len(zs)
        spacing = None
        if count >= 2:
            ims = np.array([z.imag for z in zs])
            spacing = float(np.diff(ims).mean())
        rows.append(DensityRow(label=r.label, count=count, predicted=pred,
                               budget=budget,
                               slack=budget - abs(count - pred),
                               passed=abs(count - pred) < budget,
                               mean_spacing=spacing,
                               predicted_spacing=predicted_spacing(r)))
        total += count
        total_pred += pred
    return tuple(rows), (total, total_pred)


# ---------------------------------------------------------------------------
# serialization

def recovery_report_to_json(report: RecoveryReport, path) -> None:
    payload = {
        "n_used": report.n_used,
        "resolution": report.resolution,
        "detrended_mean": report.detrended_mean,
        "estimated_locations": [
            {"location": x, "peak_magnitude": m}
            for x, m in report.estimated_locations],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def recovery_peaks_to_csv(report: RecoveryReport, path, meta: str = "") -> None:
    with open(path, "w", newline="") as fh:
        if meta:
            fh.write(f"# {meta}\n")
        fh.write(f"# resolution={report.resolution:.17g} n={report.n_used}\n")
        writer = csv.writer(fh)
        writer.writerow(["location", "peak_magnitude"])
        for x, m in report.estimated_locations:
            writer.writerow([f"{x:.17g}", f"{m:.17g}"])


def recovery_series_to_csv(report: RecoveryReport, path, meta: str = "") -> None:
    with open(path, "w", newline="") as fh:
        if meta:
            fh.write(f"# {meta}\n")
        writer = csv.writer(fh)
        writer.writerow(["location", "dft_magnitude"])
        for x, m in zip(report.dft_locations, report.dft_magnitudes):
            writer.writerow([f"{x:.17g}", f"{m:.17g}"])
