"""Monte Carlo CM and BICM mutual information over complex AWGN."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .mapping import Constellation

LN2 = math.log(2.0)


@dataclass(frozen=True)
class MiEstimate:
    cm: float
    cm_se: float
    bicm: float
    bicm_se: float
    samples: int


def _mi_terms(c: Constellation, snr_db: float, n: int, rng: np.random.Generator):
    pts = c.complex_points()
    q = c.q
    m = q.bit_length() - 1
    n0 = 10 ** (-snr_db / 10)
    idx = rng.integers(0, q, size=n)
    noise = rng.standard_normal((n, 2)) * math.sqrt(n0 / 2)
    y = pts[idx] + noise[:, 0] + 1j * noise[:, 1]
    ll = -np.abs(y[:, None] - pts[None, :]) ** 2 / n0
    lse = logsumexp(ll, axis=1)
    cm = math.log2(q) - (lse - ll[np.arange(n), idx]) / LN2
    bicm = np.full(n, float(m))
    labels = np.arange(q)  # symbol x carries label x
    for b in range(m):
        bit = (labels >> b) & 1
        same = bit[None, :] == bit[idx][:, None]
        bicm -= (lse - logsumexp(np.where(same, ll, -np.inf), axis=1)) / LN2
    return cm, bicm


def mutual_information(c: Constellation, snr_db: float, samples: int = 10 ** 6,
                       seed: int | np.random.Generator = 0, chunk: int = 50_000) -> MiEstimate:
    """CM and BICM (per-bit marginalised) estimates from one shared sample set.

    The binary label of a point is the field element mapped onto it.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    s1 = np.zeros(2)
    s2 = np.zeros(2)
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        cm, bicm = _mi_terms(c, snr_db, n, rng)
        s1 += (cm.sum(), bicm.sum())
        s2 += ((cm ** 2).sum(), (bicm ** 2).sum())
        done += n
    mean = s1 / samples
    var = np.maximum(s2 / samples - mean ** 2, 0.0)
    se = np.sqrt(var / samples)
    return MiEstimate(float(mean[0]), float(se[0]), float(mean[1]), float(se[1]), samples)


def cm_capacity(c: Constellation, snr_db: float, samples: int = 10 ** 6, seed=0) -> float:
    return mutual_information(c, snr_db, samples, seed).cm


def bicm_capacity(c: Constellation, snr_db: float, samples: int = 10 ** 6, seed=0) -> float:
    return mutual_information(c, snr_db, samples, seed).bicm


@dataclass
class CapacityCurve:
    snr_db: np.ndarray
    bits: np.ndarray
    stderr: np.ndarray
    samples: int
    label: str = ""
    meta: dict = field(default_factory=dict)

    def smoothed(self) -> np.ndarray:
        """Isotonic (running max) version, clipped to [0, log2 q]."""
        return np.maximum.accumulate(self.bits)

    def monotone_violations(self, z: float = 2.0) -> list[int]:
        d = np.diff(self.bits)
        tol = z * np.hypot(self.stderr[1:], self.stderr[:-1])
        return [int(i) + 1 for i in np.nonzero(d < -tol)[0]]

    def snr_at(self, rate: float) -> float:
        y = self.smoothed()
        if not y[0] <= rate <= y[-1]:
            raise ValueError(f"rate {rate} outside curve range [{y[0]:.4f}, {y[-1]:.4f}]")
        # first crossing on the monotone curve
        k = int(np.searchsorted(y, rate, side="left"))
        if k == 0:
            return float(self.snr_db[0])
        y0, y1 = y[k - 1], y[k]
        x0, x1 = self.snr_db[k - 1], self.snr_db[k]
        if y1 == y0:
            return float(x0)
        return float(x0 + (rate - y0) * (x1 - x0) / (y1 - y0))


def capacity_curves(c: Constellation, snr_grid, samples: int = 10 ** 6, seed: int = 0):
    """(CM curve, BICM curve) on ``snr_grid`` using a per-point seeded stream."""
    snr = np.asarray(snr_grid, dtype=float)
    est = [mutual_information(c, s, samples, np.random.default_rng([seed, k])) for k, s in enumerate(snr)]
    meta = {"q": c.q, "samples": samples, "seed": seed}
    cm = CapacityCurve(snr, np.array([e.cm for e in est]), np.array([e.cm_se for e in est]), samples, "CM", meta)
    bicm = CapacityCurve(snr, np.array([e.bicm for e in est]), np.array([e.bicm_se for e in est]),
                         samples, "BICM", meta)
    return cm, bicm


def snr_gap_at_rate(cm: CapacityCurve, bicm: CapacityCurve, target_rate: float) -> float:
    """SNR the BICM curve needs beyond the CM curve to reach ``target_rate`` (dB)."""
    return bicm.snr_at(target_rate) - cm.snr_at(target_rate)


def curves_csv(cm: CapacityCurve, bicm: CapacityCurve) -> str:
    import json

    lines = ["# " + json.dumps(cm.meta, sort_keys=True), "snr_db,cm_bits,bicm_bits"]
    for s, a, b in zip(cm.snr_db, cm.bits, bicm.bits):
        lines.append(f"{float(s)!r},{float(a)!r},{float(b)!r}")
    return "\n".join(lines) + "\n"
