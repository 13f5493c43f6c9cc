"""End-to-end acceptance checks at N=1024 with 2000-4000 frames per point.

Every run uses the same fixed seed. Each test appends one PASS/FAIL line to
the terminal summary before asserting.
"""

import math

import numpy as np
import pytest

from isea_ofdm.analytics import empirical_av_stats
from isea_ofdm.constellation import build_constellation, draw_symbols
from isea_ofdm.detectors import isea_detect
from isea_ofdm.frontend import BiasSpec, absval, add_bias, av_noise, clipping_noise, simplified_transmit
from isea_ofdm.harness import (
    SimConfig,
    detector_curve,
    kappa_grid,
    run_dispersion_sweep,
    run_noiseless_threshold,
    run_ser_vs_snr,
    run_sweep,
    snr_at_ser,
)
from isea_ofdm.channel import awgn
from isea_ofdm.ofdm import assemble_frame, demodulate, hermitian_extend, modulate

SEED = 0
N_FFT = 1024

pytestmark = pytest.mark.slow


def grid(start, stop, step):
    return [float(v) for v in np.arange(start, stop + step / 2, step)]


def by_detector(records, detector):
    return {r.snr_db: r for r in records if r.detector == detector}


@pytest.fixture(scope="module")
def threshold_qpsk():
    cfg = SimConfig(constellation="qpsk", kappa=kappa_grid(0.95, 1.3), frames=4000, seed=SEED)
    return run_noiseless_threshold(cfg)


@pytest.fixture(scope="module")
def threshold_8psk():
    cfg = SimConfig(constellation="8psk", kappa=kappa_grid(1.3, 1.65), frames=4000, seed=SEED)
    return run_noiseless_threshold(cfg)


@pytest.fixture(scope="module")
def snr_qpsk_12():
    cfg = SimConfig(
        constellation="qpsk", kappa=[1.2], snr_db=grid(6, 20, 2), frames=2000, seed=SEED,
        detectors=["isea", "clipping", "lower-bound"],
    )
    return run_ser_vs_snr(cfg)


@pytest.fixture(scope="module")
def snr_8psk_15():
    cfg = SimConfig(
        constellation="8psk", kappa=[1.5], snr_db=grid(10, 26, 2), frames=2000, seed=SEED,
        detectors=["isea", "clipping", "lower-bound"],
    )
    return run_ser_vs_snr(cfg)


@pytest.fixture(scope="module")
def snr_8psk_14():
    cfg = SimConfig(
        constellation="8psk", kappa=[1.4], snr_db=grid(10, 32, 2), frames=2000, seed=SEED,
        detectors=["isea", "clipping", "slm"],
    )
    return run_ser_vs_snr(cfg)


def test_c1_av_noise_moments(report):
    kappas = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    rows = empirical_av_stats(kappas, 2000, n_fft=N_FFT, constellation="qpsk", seed=SEED)
    worst = []
    ok = True
    for r in rows:
        for emp, ana in ((r.mean_empirical, r.mean_analytic), (r.rms_empirical, r.rms_analytic)):
            good = abs(emp - ana) <= 1e-3 if ana < 0.01 else abs(emp - ana) <= 0.02 * ana
            ok &= good
            worst.append(abs(emp - ana) / ana)
    detail = ", ".join(f"k={r.kappa}: mean {r.mean_empirical:.4g}/{r.mean_analytic:.4g} rms {r.rms_empirical:.4g}/{r.rms_analytic:.4g}" for r in rows)
    report("1 AV-noise mean/RMS vs closed form", ok, f"max rel err {max(worst):.3%}; {detail}")
    assert ok


def test_c2_noiseless_threshold(report, threshold_qpsk, threshold_8psk):
    def ser(res, kappa):
        return next(r.ser_alg for r in res.records if math.isclose(r.kappa, kappa))

    checks = {
        "QPSK SER(1.25)=0": ser(threshold_qpsk, 1.25) == 0,
        "QPSK SER(1.0)>0": ser(threshold_qpsk, 1.0) > 0,
        "8PSK SER(1.6)=0": ser(threshold_8psk, 1.6) == 0,
        "8PSK SER(1.3)>0": ser(threshold_8psk, 1.3) > 0,
        "QPSK p_th": threshold_qpsk.p_th is not None and abs(threshold_qpsk.p_th - 0.1355) <= 0.01,
        "8PSK p_th": threshold_8psk.p_th is not None and abs(threshold_8psk.p_th - 0.0665) <= 0.007,
    }
    emp = {r.kappa: r.p_a_empirical for res in (threshold_qpsk, threshold_8psk) for r in res.records}
    ok = all(checks.values())
    report(
        "2 noiseless threshold",
        ok,
        f"QPSK kappa_th={threshold_qpsk.kappa_threshold} p_th={threshold_qpsk.p_th:.4f} "
        f"(empirical {emp[threshold_qpsk.kappa_threshold]:.4f}); "
        f"8PSK kappa_th={threshold_8psk.kappa_threshold} p_th={threshold_8psk.p_th:.4f} "
        f"(empirical {emp[threshold_8psk.kappa_threshold]:.4f}); "
        + ", ".join(f"{k}:{'ok' if v else 'FAIL'}" for k, v in checks.items()),
    )
    assert ok


def test_c3_iteration_statistics(report, threshold_qpsk, threshold_8psk):
    rows = [r for r in threshold_qpsk.records if r.kappa >= 1.2 - 1e-9]
    rows += [r for r in threshold_8psk.records if r.kappa >= 1.55 - 1e-9]
    ok = bool(rows) and all(2.9 <= r.iter_mean <= 3.1 and r.iter_max <= 5 for r in rows)
    detail = "; ".join(f"k={r.kappa}: mean={r.iter_mean:.4f} std={r.iter_std:.3f} max={r.iter_max}" for r in rows)
    report("3 iteration statistics", ok, detail)
    assert ok


@pytest.mark.parametrize("name, min_snr", [("QPSK k=1.2", 12.0), ("8PSK k=1.5", 16.0)])
def test_c4_lower_bound_convergence(report, request, name, min_snr):
    records = request.getfixturevalue("snr_qpsk_12" if name.startswith("QPSK") else "snr_8psk_15")
    isea, lb = by_detector(records, "isea"), by_detector(records, "lower-bound")
    parts, ok = [], True
    for snr in sorted(s for s in isea if s >= min_snr):
        a, b = isea[snr], lb[snr]
        se = math.hypot(a.ser_stderr, b.ser_stderr)
        diff = abs(a.ser - b.ser)
        good = diff == 0 or diff <= 3 * se
        ok &= good
        z = 0.0 if diff == 0 else diff / se
        parts.append(f"{snr:g}dB {a.ser:.2e}/{b.ser:.2e} z={z:.2f}")
    report(f"4 ISEA = AWGN bound, {name}, SNR>={min_snr:g}", ok, "; ".join(parts))
    assert ok


@pytest.mark.parametrize("name, target", [("QPSK k=1.2", 3.0), ("8PSK k=1.5", 6.1)])
def test_c5_snr_gain(report, request, name, target):
    records = request.getfixturevalue("snr_qpsk_12" if name.startswith("QPSK") else "snr_8psk_15")
    s_isea = snr_at_ser(*detector_curve(records, "isea", "snr_db"))
    s_clip = snr_at_ser(*detector_curve(records, "clipping", "snr_db"))
    gain = s_clip - s_isea
    ok = abs(gain - target) <= 0.7
    report(f"5 gain over clipping at SER=1e-3, {name}", ok, f"ISEA {s_isea:.2f} dB, clipping {s_clip:.2f} dB, gain {gain:.2f} dB (target {target}+-0.7)")
    assert ok


def test_c6_below_threshold_gains(report, snr_8psk_14):
    s = {d: snr_at_ser(*detector_curve(snr_8psk_14, d, "snr_db")) for d in ("isea", "clipping", "slm")}
    g_clip, g_slm = s["clipping"] - s["isea"], s["slm"] - s["isea"]
    ok_clip, ok_slm = abs(g_clip - 8.0) <= 1.0, abs(g_slm - 4.0) <= 1.0
    floor = by_detector(snr_8psk_14, "clipping")[32.0].ser
    report(
        "6 8PSK k=1.4 gains at SER=1e-3",
        ok_clip and ok_slm,
        f"ISEA {s['isea']:.2f} dB, clipping {s['clipping']:.2f} dB (gain {g_clip:.2f}, target 8+-1 {'ok' if ok_clip else 'FAIL'}), "
        f"SLM {s['slm']:.2f} dB (gain {g_slm:.2f}, target 4+-1 {'ok' if ok_slm else 'FAIL'}); clipping SER at 32 dB {floor:.2e}",
    )
    assert ok_clip and ok_slm


def test_c7_dispersion_ordering(report):
    dets = ["isea", "clipping", "slm"]
    cfg = SimConfig(
        constellation="8psk", kappa=[1.6], snr_db=[20.0], dispersion=grid(0.0, 0.1, 0.01),
        frames=2000, seed=SEED, detectors=dets,
    )
    records = run_dispersion_sweep(cfg)
    curves = {d: {r.dispersion: r for r in records if r.detector == d} for d in dets}
    ds = sorted(curves["isea"])
    parts, compared, ok = [], 0, True
    for d0, d1 in zip(ds, ds[1:]):
        if not all(curves[d][x].symbol_errors > 10 for d in dets for x in (d0, d1)):
            continue
        slope = {d: (math.log10(curves[d][d1].ser) - math.log10(curves[d][d0].ser)) / (d1 - d0) for d in dets}
        good = slope["isea"] > slope["clipping"] and slope["isea"] > slope["slm"]
        ok &= good
        compared += 1
        parts.append(f"[{d0:.2f},{d1:.2f}] " + " ".join(f"{d}={v:.1f}" for d, v in slope.items()))
    ok = ok and compared > 0
    sers = "; ".join(f"D={x:.2f}: " + "/".join(f"{curves[d][x].ser:.1e}" for d in dets) for x in ds)
    report("7 dispersion slope ordering (ISEA steepest)", ok, f"{compared} intervals; " + "; ".join(parts) + f" | SER isea/clip/slm {sers}")
    assert ok


def test_c8_exact_identities(report):
    rng = np.random.default_rng(SEED)
    spec = build_constellation("8psk", N_FFT)
    failures = []
    for _ in range(50):
        frame = assemble_frame(draw_symbols(spec, N_FFT // 2 - 1, rng), N_FFT)
        s = modulate(frame)
        kappa = float(rng.uniform(0.0, 3.0))
        bias = BiasSpec(kappa)
        sb = add_bias(s, bias)
        if not np.array_equal(av_noise(sb).samples, 2 * clipping_noise(sb).samples):
            failures.append("n_a != 2 n_c")
        if np.max(np.abs(demodulate(s).theta - frame.theta)) > 1e-10:
            failures.append("roundtrip")
        if abs(np.sum(s.samples**2) - np.sum(np.abs(frame.theta) ** 2)) > 1e-9:
            failures.append("parseval")
        full = np.fft.ifft(hermitian_extend(frame.payload), norm="ortho")
        if np.max(np.abs(full.imag)) > 1e-12:
            failures.append("realness")
        if not np.array_equal(simplified_transmit(frame, bias).samples, absval(sb).samples):
            failures.append("simplified transmitter")
        y = awgn(absval(sb), 10 ** (-20 / 20), rng)
        res = isea_detect(y, bias, spec)
        if res.converged:
            again = isea_detect(y, bias, spec, max_iter=2, initial_signs=res.final_signs)
            if not (again.converged and np.array_equal(again.payload, res.payload)):
                failures.append("ISEA fixed point")
    cfg = SimConfig(constellation="8psk", kappa=[1.4], snr_db=[18.0, math.inf], frames=40, seed=SEED, slm_candidates=16)
    one, three = run_sweep(cfg), run_sweep(cfg.replace(workers=3))
    if one != three or any(not np.array_equal(a.frame_errors, b.frame_errors) for a, b in zip(one, three)):
        failures.append("determinism across workers")
    ok = not failures
    report("8 exact identities", ok, "all hold over 50 random frames and a 1-vs-3 worker run" if ok else ", ".join(sorted(set(failures))))
    assert ok
