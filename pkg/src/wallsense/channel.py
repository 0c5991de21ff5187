"""Closed-form sensing power and SSNR for an indoor Tx/Rx pair.

Dynamic power follows cascaded Friis stages: Tx -> target -> Rx for the
direct path and Tx -> wall -> target -> Rx for a bounce, the latter carrying
the wall amplitude-reflection coefficient squared.  Coexisting dynamic paths
combine coherently, so their relative phases (from exact path lengths) drive
constructive/destructive interference.  SSNR divides the combined dynamic
power by the line-of-sight interference term gamma * P_los + b.

Two forms are provided: the full form in watts, and a proportional form
that drops the constant factors and keeps only the distance dependence
(with alpha1 = R^2/4pi and alpha2 = R/sqrt(pi) weighting the bounce and
cross terms).  The proportional form carries an optional global scale used
to calibrate simulated values against measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import PathSet, ReflectedEntry  # noqa: F401  (re-exported)

FOUR_PI = 4.0 * math.pi


class ChannelError(ValueError):
    """Bad physical input (nonpositive distance, negative power, ...)."""


class SingularPathError(ChannelError):
    """Target coincides with a device; apply an exclusion radius upstream."""


@dataclass(frozen=True)
class RfParameters:
    """Physical constants of the link.  Field names carry SI unit suffixes.

    Derived quantities (aperture, cascade constant, bounce weights) are
    recomputed from the primaries so they can never drift out of sync.
    """

    ptx_w: float = 1.0
    gain_tx: float = 1.0
    gain_rx: float = 1.0
    wavelength_m: float = 0.06
    rcs_m2: float = 1.0
    wall_reflection: float = 0.3
    interference_gamma: float = 1e-3
    interference_floor_w: float = 1e-12

    def __post_init__(self) -> None:
        for name in ("ptx_w", "gain_tx", "gain_rx", "wavelength_m", "rcs_m2", "interference_gamma"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ChannelError(f"{name} must be a positive finite number, got {v!r}")
        if not (math.isfinite(self.interference_floor_w) and self.interference_floor_w >= 0):
            raise ChannelError(f"interference_floor_w must be >= 0, got {self.interference_floor_w!r}")
        if not (math.isfinite(self.wall_reflection) and 0.0 <= self.wall_reflection <= 1.0):
            raise ChannelError(f"wall_reflection must be in [0, 1], got {self.wall_reflection!r}")

    @property
    def aperture_m2(self) -> float:
        """Effective receive aperture G_R * lambda^2 / 4pi."""
        return self.gain_rx * self.wavelength_m**2 / FOUR_PI

    @property
    def cascade_w_m2(self) -> float:
        """P_T * G_T * A_R / 4pi, the constant shared by every cascade."""
        return self.ptx_w * self.gain_tx * self.aperture_m2 / FOUR_PI

    @property
    def alpha1(self) -> float:
        """Bounce-power weight of the proportional form: R^2 / 4pi."""
        return self.wall_reflection**2 / FOUR_PI

    @property
    def alpha2(self) -> float:
        """Cross-term weight of the proportional form: R / sqrt(pi)."""
        return self.wall_reflection / math.sqrt(math.pi)


@dataclass(frozen=True)
class SsnrValue:
    """A sensing SNR as a linear ratio plus its dB representation."""

    linear: float
    db: float

    @classmethod
    def from_linear(cls, linear: float) -> "SsnrValue":
        if linear < 0:
            raise ChannelError(f"SSNR must be nonnegative, got {linear!r}")
        db = 10.0 * math.log10(linear) if linear > 0.0 else -math.inf
        return cls(linear, db)


def p_los(params: RfParameters, r_d: float) -> float:
    """Line-of-sight received power over a direct Tx->Rx distance (watts)."""
    if not r_d > 0:
        raise ChannelError(f"r_d must be positive, got {r_d!r}")
    return params.ptx_w * params.gain_tx * params.aperture_m2 / (FOUR_PI * r_d * r_d)


def p_dyn_los(params: RfParameters, r_t: float, r_r: float) -> float:
    """Two-hop cascade Tx -> target -> Rx (watts)."""
    if not (r_t > 0 and r_r > 0):
        raise ChannelError(f"distances must be positive, got r_t={r_t!r} r_r={r_r!r}")
    return (
        params.ptx_w
        * params.gain_tx
        * params.rcs_m2
        * params.aperture_m2
        / (FOUR_PI**2 * (r_t * r_r) ** 2)
    )


def p_dyn_wall(params: RfParameters, d1: float, d2: float, r_leg: float) -> float:
    """Three-hop cascade with one wall bounce (watts).

    d1/d2 split the bounce leg; r_leg is the remaining direct leg (to the Rx
    for a Tx-side bounce, to the target from the Tx for an Rx-side bounce).
    """
    if not (d1 > 0 and d2 > 0 and r_leg > 0):
        raise ChannelError(f"distances must be positive, got d1={d1!r} d2={d2!r} r_leg={r_leg!r}")
    return (
        params.ptx_w
        * params.gain_tx
        * params.wall_reflection**2
        * params.rcs_m2
        * params.aperture_m2
        / (FOUR_PI**3 * (d1 * d2 * r_leg) ** 2)
    )


def phase_difference(d1: float, d2: float, r_t: float, wavelength_m: float) -> float:
    """Unwrapped phase lead of the bounce over the direct leg, radians."""
    if not wavelength_m > 0:
        raise ChannelError(f"wavelength must be positive, got {wavelength_m!r}")
    return 2.0 * math.pi * (d1 + d2 - r_t) / wavelength_m


def p_dyn_combined(paths: Sequence[tuple[float, float]], wavelength_m: float) -> float:
    """Coherent sum of (power, path_length) contributions (watts).

    Computes |sum_k sqrt(P_k) exp(-j 2 pi L_k / lambda)|^2 with phases taken
    relative to the first path, so a single path passes through to within
    one rounding of sqrt, and two paths reduce to the cosine form
    P1 + P2 + 2 sqrt(P1 P2) cos(delta phi).
    """
    if not wavelength_m > 0:
        raise ChannelError(f"wavelength must be positive, got {wavelength_m!r}")
    if not paths:
        return 0.0
    l_ref = paths[0][1]
    re = 0.0
    im = 0.0
    for power, length in paths:
        if power < 0:
            raise ChannelError(f"path power must be >= 0, got {power!r}")
        if not length > 0:
            raise ChannelError(f"path length must be positive, got {length!r}")
        amp = math.sqrt(power)
        ph = 2.0 * math.pi * (length - l_ref) / wavelength_m
        re += amp * math.cos(ph)
        im -= amp * math.sin(ph)
    return re * re + im * im


def _dynamic_paths(params: RfParameters, paths: PathSet) -> list[tuple[float, float]]:
    """(power, full path length) per dynamic path; direct path first."""
    out = [(p_dyn_los(params, paths.r_t, paths.r_r), paths.r_t + paths.r_r)]
    for e in paths.valid_reflected():
        r_leg = paths.r_r if e.side == "tx" else paths.r_t
        out.append((p_dyn_wall(params, e.d1, e.d2, r_leg), e.d1 + e.d2 + r_leg))
    return out


def ssnr_full(params: RfParameters, paths: PathSet) -> SsnrValue:
    """Full-form SSNR: coherent dynamic power over gamma * P_los + b."""
    if paths.singular:
        raise SingularPathError("target coincides with a device")
    p_d = p_dyn_combined(_dynamic_paths(params, paths), params.wavelength_m)
    p_i = params.interference_gamma * p_los(params, paths.r_d) + params.interference_floor_w
    return SsnrValue.from_linear(p_d / p_i)


def ssnr_simplified(paths: PathSet, alpha1: float, alpha2: float, wavelength_m: float) -> float:
    """Proportional-form SSNR keeping only the distance dependence.

    Terms: alpha1 * r_d^2/(d1 d2 r_leg)^2 per bounce, r_d^2/(r_t r_r)^2 for
    the direct path, and alpha2 * cos(dphi) * r_d^2 / ((d1 d2 r_leg)(r_t r_r))
    per direct-bounce pair.  With two bounces present, their mutual cross
    term uses 2*alpha1 (the coherent-amplitude weight).  Tiny negative
    totals from rounding of destructive sums clamp to zero.
    """
    if paths.singular:
        raise SingularPathError("target coincides with a device")
    if not wavelength_m > 0:
        raise ChannelError(f"wavelength must be positive, got {wavelength_m!r}")
    if not (paths.r_t > 0 and paths.r_r > 0 and paths.r_d > 0):
        raise ChannelError("path set has nonpositive distances")

    inv_los = 1.0 / (paths.r_t * paths.r_r)
    l_los = paths.r_t + paths.r_r
    bounces: list[tuple[float, float]] = []  # (inverse denominator, full length)
    for e in paths.valid_reflected():
        r_leg = paths.r_r if e.side == "tx" else paths.r_t
        bounces.append((1.0 / (e.d1 * e.d2 * r_leg), e.d1 + e.d2 + r_leg))

    total = inv_los * inv_los
    for inv_k, l_k in bounces:
        total += alpha1 * inv_k * inv_k
        total += alpha2 * math.cos(2.0 * math.pi * (l_k - l_los) / wavelength_m) * inv_los * inv_k
    for i in range(len(bounces)):
        for j in range(i + 1, len(bounces)):
            inv_i, l_i = bounces[i]
            inv_j, l_j = bounces[j]
            total += 2.0 * alpha1 * math.cos(2.0 * math.pi * (l_i - l_j) / wavelength_m) * inv_i * inv_j
    return paths.r_d * paths.r_d * max(total, 0.0)


def ssnr_wall_simplified(paths: PathSet) -> float:
    """Proportional bounce-only SSNR: sum of r_d^2/(d1 d2 r_leg)^2 terms."""
    if paths.singular:
        raise SingularPathError("target coincides with a device")
    valid = paths.valid_reflected()
    if not valid:
        raise ChannelError("path set has no valid wall bounce")
    total = 0.0
    for e in valid:
        r_leg = paths.r_r if e.side == "tx" else paths.r_t
        total += (paths.r_d / (e.d1 * e.d2 * r_leg)) ** 2
    return total


def cassini_constant(r_d: float, ssnr_min_linear: float) -> float:
    """Boundary product r_t * r_r of the no-wall model at a linear threshold.

    Points where the proportional direct-path SSNR equals the threshold
    satisfy r_t * r_r = r_d / sqrt(threshold): a Cassini oval with the
    devices as foci.
    """
    if not r_d > 0:
        raise ChannelError(f"r_d must be positive, got {r_d!r}")
    if not ssnr_min_linear > 0:
        raise ChannelError(f"ssnr_min_linear must be positive, got {ssnr_min_linear!r}")
    return r_d / math.sqrt(ssnr_min_linear)


def calibration_scale(simplified_at_reference: float, threshold_db: float) -> float:
    """Scale factor that puts a reference geometry exactly at the threshold."""
    if not simplified_at_reference > 0:
        raise ChannelError("reference SSNR must be positive")
    return 10.0 ** (threshold_db / 10.0) / simplified_at_reference
