"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line (shown in the terminal summary) and then
asserts, so a failing criterion shows up red rather than being skipped.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from gfconv.capacity import capacity_curves, mutual_information, snr_gap_at_rate
from gfconv.channel import run_monte_carlo
from gfconv.code import CodeCoefficients, build_trellis
from gfconv.decoder import BranchMetrics, brute_force_oracle, max_log_map_decode
from gfconv.gf import default_field
from gfconv.mapping import build_qam
from gfconv.search import mapping_invariance_check, search_codes, search_space_counts, valid_triples
from gfconv.spectrum import compute_spectrum, verify_truncation

# reference spectra: triple -> (d1^2, n1, d2^2, n2)
REFERENCE_GF16 = {
    (12, 4, 0): (Fraction(12, 10), 22128, Fraction(16, 10), 16596),
    (10, 12, 3): (Fraction(20, 10), 5532, Fraction(24, 10), 8424),
    (13, 7, 11): (Fraction(40, 10), 22484, Fraction(48, 10), 141144),
}
REFERENCE_GF64 = {
    (41, 2, 0): (Fraction(16, 42), 238422, "0.38", "0.57", 230886),
    (41, 1, 24): (Fraction(48, 42), 1542390, "1.14", "1.23", 4111444),
    (31, 5, 18): (Fraction(64, 42), 652698, "1.52", "1.61", 1084014),
}
REFERENCE_GF64_D2 = {(31, 5, 18): Fraction(68, 42)}

# operating points (Eb/N0, dB) where the strongest code's SER lies in [1e-3, 1e-2]
SIM_POINT = {16: 5.0, 64: 7.5}
SIM_CODES = {16: [(12, 4, 0), (10, 12, 3), (13, 7, 11)], 64: [(41, 2, 0), (41, 1, 24), (31, 5, 18)]}


def trunc2(x: Fraction) -> str:
    return f"{math.floor(x * 100) / 100:.2f}"


def spectra(q, triples):
    f, c = default_field(q), build_qam(q)
    return {t: compute_spectrum(CodeCoefficients(f, *t), c) for t in triples}


@pytest.fixture(scope="module")
def search64():
    f = default_field(64)
    return search_codes(f, build_qam(f), top=1, threads=1)


def test_criterion_01_gf16_reference_spectra(record_criterion):
    t0 = time.perf_counter()
    got = spectra(16, REFERENCE_GF16)
    dist_ok = all(abs(float(s.d1_sq) - float(REFERENCE_GF16[t][0])) <= 0.01 and s.d1_sq == REFERENCE_GF16[t][0]
                  and abs(float(s.d2_sq) - float(REFERENCE_GF16[t][2])) <= 0.01 and s.d2_sq == REFERENCE_GF16[t][2]
                  for t, s in got.items())
    counts = {t: (s.n1, s.n2) for t, s in got.items()}
    want = {t: (r[1], r[3]) for t, r in REFERENCE_GF16.items()}
    # the only permitted recalibration is one uniform factor of two, on all six cells
    calib = next((k for k in (1, 2) if all((a * k, b * k) == want[t] for t, (a, b) in counts.items())), None)
    ok = dist_ok and calib is not None
    detail = (f"distances {'exact' if dist_ok else 'MISMATCH'}; counts (unordered) "
              + ", ".join(f"{t}={counts[t]} vs {want[t]}" for t in counts)
              + f"; calibration factor {calib}; {time.perf_counter() - t0:.1f}s")
    assert record_criterion(1, "GF(16) spectra", ok, detail)


def test_criterion_02_gf64_reference_spectra(record_criterion):
    t0 = time.perf_counter()
    got = spectra(64, REFERENCE_GF64)
    parts, ok = [], True
    for t, (d1, n1, d1_txt, d2_txt, n2) in REFERENCE_GF64.items():
        s = got[t]
        d_ok = s.d1_sq == d1 and trunc2(s.d1_sq) == d1_txt and trunc2(s.d2_sq) == d2_txt
        if t in REFERENCE_GF64_D2:
            d_ok &= s.d2_sq == REFERENCE_GF64_D2[t]
        n_ok = s.n1 == n1 and (t not in REFERENCE_GF64_D2 or s.n2 == n2)
        ok &= d_ok and n_ok
        parts.append(f"{t}: d1={s.d1_num}/42 d2={s.d2_num}/42 {'ok' if d_ok else 'MISMATCH'}, "
                     f"n1={s.n1} vs {n1}" + (f", n2={s.n2} vs {n2}" if t in REFERENCE_GF64_D2 else ""))
    detail = "; ".join(parts) + f"; {time.perf_counter() - t0:.1f}s"
    assert record_criterion(2, "GF(64) spectra", ok, detail)


def test_criterion_03_search_optimality(record_criterion, search64):
    f16 = default_field(16)
    r16 = search_codes(f16, build_qam(f16), top=1)
    r64 = search64
    # "top equivalence class": every triple attaining the maximal d1
    ok16 = r16.best.d1_num == 40 and (13, 7, 11) in r16.max_d1_class()
    ok64 = r64.best.d1_num == 64 and (31, 5, 18) in r64.max_d1_class()
    elapsed = sum(r64.elapsed.values())
    ok = ok16 and ok64 and elapsed <= 2 * 3600
    detail = (f"GF(16) max d1^2={r16.best.d1_num}/10, class of {len(r16.max_d1_class())} "
              f"{'contains' if ok16 else 'lacks'} (13,7,11) [full-key class {r16.top_class()}]; "
              f"GF(64) max d1^2={r64.best.d1_num}/42, class of {len(r64.max_d1_class())} "
              f"{'contains' if ok64 else 'lacks'} (31,5,18), shortlist {r64.shortlist_size}, {elapsed:.0f}s")
    assert record_criterion(3, "search optimality", ok, detail)


def test_criterion_04_search_space_identity(record_criterion):
    ok = all(math.comb(q * q, 2) - (math.comb(q, 2) + 1) ** 2 + 1 == q * (q - 1) ** 2 * (q + 4) // 4
             and 4 * (math.comb(q * q, 2) - (math.comb(q, 2) + 1) ** 2 + 1) == q * (q - 1) ** 2 * (q + 4)
             and search_space_counts(q).identity_holds
             for q in (2, 4, 8, 16, 64, 256))
    c4 = search_space_counts(4)
    ok4 = (c4.mapping_factor, c4.coefficient_factor, c4.delta_n) == (48, 120, 72)
    detail = f"identity for q in {{2,4,8,16,64,256}}: {ok}; q=4 factors {c4.mapping_factor}, {c4.coefficient_factor}, delta {c4.delta_n}"
    assert record_criterion(4, "search-space identity", ok and ok4, detail)


def test_criterion_05_mapping_invariance_q4(record_criterion):
    t0 = time.perf_counter()
    rep = mapping_invariance_check(default_field(4), build_qam(4))
    detail = (f"{len(rep.best_by_mapping)} mappings, distinct best tuples {sorted(rep.distinct_best)}; "
              f"{time.perf_counter() - t0:.1f}s")
    assert record_criterion(5, "QPSK mapping invariance", rep.invariant and len(rep.best_by_mapping) == 24, detail)


def test_criterion_06_truncation(record_criterion):
    parts, ok = [], True
    for q, refs in ((16, REFERENCE_GF16), (64, REFERENCE_GF64)):
        f, c = default_field(q), build_qam(q)
        for t in refs:
            code = CodeCoefficients(f, *t)
            trunc = verify_truncation(code, c)
            d2 = compute_spectrum(code, c).d2_sq
            ok &= trunc > d2
            parts.append(f"{t}: {float(trunc):.3f} {'>' if trunc > d2 else '<='} d2 {float(d2):.3f}")
    assert record_criterion(6, "truncated length-3 minimum exceeds d2", ok, "; ".join(parts))


def test_criterion_07_decoder_oracle(record_criterion):
    f = default_field(4)
    triples = valid_triples(f)
    rng = np.random.default_rng(2024)
    n, bad_post, bad_hard = 0, 0, 0
    for k in range(1200):
        t = build_trellis(CodeCoefficients(f, *triples[rng.integers(len(triples))]))
        # integer-valued metrics keep every sum exact in floating point
        m = BranchMetrics(-rng.integers(0, 64, (4, 4)).astype(float), -rng.integers(0, 64, (4, 4)).astype(float))
        terminated = k >= 1000
        post, hard = max_log_map_decode(t, m, terminated=terminated)
        ref = brute_force_oracle(t, m, terminated=terminated)
        fin = np.isfinite(ref.L)
        d = np.where(fin, post.L - np.where(fin, ref.L, 0), 0)
        stage_const = all(np.all(d[i, fin[i]] == d[i, fin[i]][0]) for i in range(4))
        bad_post += not (stage_const and (np.isfinite(post.L) == fin).all())
        bad_hard += not (hard == ref.hard()).all()
        n += 1
    ok = bad_post == 0 and bad_hard == 0
    detail = f"{n} instances (200 terminated): posterior mismatches {bad_post}, hard mismatches {bad_hard}"
    assert record_criterion(7, "Max-Log-MAP vs brute force", ok, detail)


def _simulate(q, triples, ebn0, seed, ferr_min=100):
    f, c = default_field(q), build_qam(q)
    return {t: run_monte_carlo(CodeCoefficients(f, *t), c, [ebn0], frame_len=100, ferr_min=ferr_min,
                               frames_max=10 ** 6, seed=seed).points[0] for t in triples}


def test_criterion_08_simulation_ordering(record_criterion):
    parts, ok = [], True
    for q in (16, 64):
        c1, c2, c3 = SIM_CODES[q]
        pts = _simulate(q, SIM_CODES[q], SIM_POINT[q], seed=1)
        iv = {t: pts[t].ser_interval() for t in pts}
        in_range = 1e-3 <= pts[c3].ser <= 1e-2
        enough = all(p.frame_err >= 100 for p in pts.values())
        ordered = iv[c3][1] < iv[c2][0] and iv[c2][1] < iv[c1][0]
        ok &= in_range and enough and ordered
        parts.append(f"GF({q}) @ Eb/N0 {SIM_POINT[q]} dB: "
                     + " < ".join(f"{pts[t].ser:.2e} [{iv[t][0]:.2e},{iv[t][1]:.2e}]" for t in (c3, c2, c1))
                     + f" (range {in_range}, >=100 frame errors {enough}, disjoint {ordered})")
    assert record_criterion(8, "SER ordering", ok, "; ".join(parts))


def test_criterion_09_equal_spectra_equal_ser(record_criterion):
    f, c = default_field(16), build_qam(16)
    a, b = (2, 15, 14), (4, 5, 10)
    same = compute_spectrum(CodeCoefficients(f, *a), c).key() == compute_spectrum(CodeCoefficients(f, *b), c).key()
    parts, ok = [], same
    for snr in (4.0, 5.0, 6.0):
        pa = _simulate(16, [a], snr, seed=11)[a]
        pb = _simulate(16, [b], snr, seed=12)[b]
        ia, ib = pa.ser_interval(), pb.ser_interval()
        overlap = ia[0] <= ib[1] and ib[0] <= ia[1]
        ok &= overlap
        parts.append(f"{snr} dB: {pa.ser:.2e} [{ia[0]:.2e},{ia[1]:.2e}] vs {pb.ser:.2e} [{ib[0]:.2e},{ib[1]:.2e}]")
    assert record_criterion(9, f"same-class SER {a} vs {b}", ok, f"same spectrum {same}; " + "; ".join(parts))


def test_criterion_10_capacity_gaps(record_criterion):
    t0 = time.perf_counter()
    n = 10 ** 6
    cm64, bicm64 = capacity_curves(build_qam(64), np.arange(4.0, 7.01, 0.25), n, seed=0)
    cm4, bicm4 = capacity_curves(build_qam(4), np.arange(-2.0, 2.01, 0.25), n, seed=0)
    gap64 = snr_gap_at_rate(cm64, bicm64, 2.0)
    gap4 = snr_gap_at_rate(cm4, bicm4, 1.0)
    half_width = 1.96 * max(cm64.stderr.max(), bicm64.stderr.max(), cm4.stderr.max(), bicm4.stderr.max())
    ok_parts = (gap64 >= 1.0, gap4 <= 0.1, half_width <= 0.01)
    detail = (f"64-QAM gap at 2.0 b/cu {gap64:.3f} dB (need >= 1.0); QPSK gap at 1.0 b/cu {gap4:.3f} dB "
              f"(need <= 0.1); 95% half-width {half_width:.4f} bits; {time.perf_counter() - t0:.0f}s")
    assert record_criterion(10, "capacity gaps", all(ok_parts), detail)


def _search_dump(rep):
    d = rep.to_dict()
    d.pop("elapsed")
    return json.dumps(d, sort_keys=True)


def test_criterion_11_determinism(record_criterion, search64):
    parts, ok = [], True
    f16, f64 = default_field(16), default_field(64)
    c16, c64 = build_qam(16), build_qam(64)
    base16 = _search_dump(search_codes(f16, c16, top=5, threads=1))
    base64 = _search_dump(search64)
    spec_base = json.dumps({str(t): s.to_dict() for t, s in {**spectra(16, REFERENCE_GF16),
                                                          **spectra(64, REFERENCE_GF64)}.items()})
    inv_base = mapping_invariance_check(default_field(4), build_qam(4)).best_by_mapping
    for threads in (4, 16):
        same16 = _search_dump(search_codes(f16, c16, top=5, threads=threads)) == base16
        same64 = _search_dump(search_codes(f64, c64, top=1, threads=threads)) == base64
        same_spec = json.dumps({str(t): s.to_dict() for t, s in {**spectra(16, REFERENCE_GF16),
                                                              **spectra(64, REFERENCE_GF64)}.items()}) == spec_base
        same_inv = mapping_invariance_check(default_field(4), build_qam(4)).best_by_mapping == inv_base
        ok &= same16 and same64 and same_spec and same_inv
        parts.append(f"threads={threads}: GF(16) search {same16}, GF(64) search {same64}, "
                     f"spectra {same_spec}, invariance {same_inv}")
    assert record_criterion(11, "determinism across 1/4/16 threads", ok, "; ".join(parts))
