"""AWGN channel and Monte Carlo symbol/bit/frame error rate harness."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .code import CodeCoefficients, build_trellis, encode_batch
from .decoder import decode_batch, symbol_metrics
from .mapping import BpskImage, Constellation, build_bpsk_image

CSV_COLUMNS = ("eb_n0_db", "es_n0_db", "frames", "sym_err", "bit_err", "frame_err", "ser", "ber", "fer")

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def snr_convert(eb_n0_db: float, q: int, rate: float) -> float:
    """Es/N0 per channel symbol from Eb/N0; ``rate`` is code rate, log2(q) bits per symbol."""
    if not 0 < rate <= 1:
        raise ValueError(f"invalid code rate {rate}")
    if q < 2 or q & (q - 1):
        raise ValueError(f"q={q} is not a power of two")
    return eb_n0_db + 10 * math.log10(rate * math.log2(q))


def noise_variance(es_n0_db: float, es: float = 1.0) -> float:
    """Per-real-dimension variance N0/2."""
    return es * 10 ** (-es_n0_db / 10) / 2


def awgn(points, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Add zero-mean Gaussian noise of ``variance`` to each real dimension."""
    if variance < 0:
        raise ValueError("negative noise variance")
    points = np.asarray(points)
    sd = math.sqrt(variance)
    if np.iscomplexobj(points):
        noise = rng.standard_normal(points.shape + (2,))
        return points + sd * (noise[..., 0] + 1j * noise[..., 1])
    return points + sd * rng.standard_normal(points.shape)


@dataclass
class PointResult:
    eb_n0_db: float
    es_n0_db: float
    frames: int = 0
    sym_err: int = 0
    bit_err: int = 0
    frame_err: int = 0
    sym_err_sq: int = 0  # sum over frames of (symbol errors in frame)^2
    stop: str = ""
    frame_len: int = 0
    bits_per_symbol: int = 0

    @property
    def ser(self) -> float:
        return self.sym_err / (self.frames * self.frame_len) if self.frames else float("nan")

    @property
    def ber(self) -> float:
        n = self.frames * self.frame_len * self.bits_per_symbol
        return self.bit_err / n if n else float("nan")

    @property
    def fer(self) -> float:
        return self.frame_err / self.frames if self.frames else float("nan")

    def ser_interval(self, z: float = 1.96) -> tuple[float, float]:
        """Normal interval on SER using frame-level variance (errors cluster in frames)."""
        f = self.frames
        if f < 2:
            return (0.0, 1.0)
        mean = self.sym_err / f
        var = max(self.sym_err_sq / f - mean * mean, 0.0) * f / (f - 1)
        half = z * math.sqrt(var / f) / self.frame_len
        return (max(self.ser - half, 0.0), self.ser + half)

    def row(self) -> dict:
        return {"eb_n0_db": self.eb_n0_db, "es_n0_db": self.es_n0_db, "frames": self.frames,
                "sym_err": self.sym_err, "bit_err": self.bit_err, "frame_err": self.frame_err,
                "ser": self.ser, "ber": self.ber, "fer": self.fer}


@dataclass
class SimReport:
    points: list[PointResult]
    seed: int
    config: dict = field(default_factory=dict)

    def monotonicity_violations(self, z: float = 3.0) -> list[int]:
        """Indices where SER rises with SNR by more than z standard errors."""
        bad = []
        for i in range(1, len(self.points)):
            a, b = self.points[i - 1], self.points[i]
            if a.frames < 2 or b.frames < 2:
                continue
            sa = (a.ser_interval(1.0)[1] - a.ser)
            sb = (b.ser_interval(1.0)[1] - b.ser)
            if b.ser - a.ser > z * math.hypot(sa, sb):
                bad.append(i)
        return bad

    def to_dict(self) -> dict:
        return {"seed": self.seed, "config": self.config, "points": [asdict(p) for p in self.points]}


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    """Independent stream per (seed, SNR point, frame index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, frame)))


def run_monte_carlo(code: CodeCoefficients, constellation: Constellation | None, ebn0_db,
                    frame_len: int = 100, ferr_min: int = 100, frames_max: int = 10 ** 6,
                    seed: int = 0, terminate: bool = False, modulation: str = "qam",
                    batch: int = 64, axis: str = "ebn0") -> SimReport:
    """SER/BER/FER per SNR point.

    Each frame draws its information symbols and noise from its own stream, and
    frames are accumulated in index order until ``ferr_min`` frame errors or
    ``frames_max`` frames, so results do not depend on ``batch``.
    ``axis="esn0"`` interprets the sweep values as Es/N0 instead.
    """
    trellis = build_trellis(code)
    q = code.q
    m = q.bit_length() - 1
    n_tx = frame_len + (1 if terminate else 0)
    if modulation == "qam":
        if constellation is None or constellation.q != q:
            raise ValueError("QAM mode needs a q-point constellation")
        pts = constellation.complex_points()
        bits_per_channel_use = m * frame_len / (2 * n_tx)
        image = None
    elif modulation == "bpsk":
        image: BpskImage = build_bpsk_image(q)
        bits_per_channel_use = m * frame_len / (2 * n_tx * m)
        pts = None
    else:
        raise ValueError(f"unknown modulation {modulation!r}")
    offset = 10 * math.log10(bits_per_channel_use)

    results = []
    for k, snr in enumerate(np.atleast_1d(np.asarray(ebn0_db, dtype=float))):
        if axis == "ebn0":
            eb, es = float(snr), float(snr) + offset
        else:
            es, eb = float(snr), float(snr) - offset
        var = noise_variance(es)
        pr = PointResult(eb, es, frame_len=frame_len, bits_per_symbol=m)
        frame = 0
        while True:
            nb = min(batch, frames_max - frame)
            info = np.empty((nb, frame_len), dtype=np.int64)
            rngs = []
            for j in range(nb):
                r = frame_rng(seed, k, frame + j)
                info[j] = r.integers(0, q, size=frame_len)
                rngs.append(r)
            sys_sym, par_sym, _ = encode_batch(trellis, info, terminate)
            if modulation == "qam":
                tx_s, tx_p = pts[sys_sym], pts[par_sym]
                rx_s = np.empty_like(tx_s)
                rx_p = np.empty_like(tx_p)
                for j, r in enumerate(rngs):
                    rx_s[j] = awgn(tx_s[j], var, r)
                    rx_p[j] = awgn(tx_p[j], var, r)
                ms, mp = symbol_metrics(rx_s, pts), symbol_metrics(rx_p, pts)
            else:
                tx_s, tx_p = image.modulate(sys_sym), image.modulate(par_sym)
                rx_s = np.empty_like(tx_s)
                rx_p = np.empty_like(tx_p)
                for j, r in enumerate(rngs):
                    rx_s[j] = awgn(tx_s[j], var, r)
                    rx_p[j] = awgn(tx_p[j], var, r)
                ms = -((rx_s[..., None, :] - image.signs) ** 2).sum(-1)
                mp = -((rx_p[..., None, :] - image.signs) ** 2).sum(-1)
            dec = decode_batch(trellis, ms, mp, terminated=terminate)[:, :frame_len]
            diff = dec ^ info
            sym_errs = (diff != 0).sum(axis=1)
            bit_errs = _POPCOUNT[diff].sum(axis=1)
            stop = ""
            for j in range(nb):
                pr.frames += 1
                se = int(sym_errs[j])
                pr.sym_err += se
                pr.sym_err_sq += se * se
                pr.bit_err += int(bit_errs[j])
                pr.frame_err += int(se > 0)
                if pr.frame_err >= ferr_min:
                    stop = "ferr_min"
                    break
                if pr.frames >= frames_max:
                    stop = "frames_max"
                    break
            frame += nb
            if stop:
                pr.stop = stop
                break
        results.append(pr)
    config = {"code": code.to_dict(), "modulation": modulation, "frame_len": frame_len,
              "ferr_min": ferr_min, "frames_max": frames_max, "terminate": terminate,
              "axis": axis, "sweep": [float(x) for x in np.atleast_1d(ebn0_db)], "seed": seed}
    return SimReport(results, seed, config)


def report_csv(report: SimReport) -> str:
    import json

    lines = ["# " + json.dumps(report.config, sort_keys=True), ",".join(CSV_COLUMNS)]
    for p in report.points:
        r = p.row()
        lines.append(",".join(_fmt(r[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))
