"""End-to-end acceptance checks, one verdict line per criterion.

Each test records PASS/FAIL through the ``record_criterion`` fixture; the
summary section of the pytest report lists them all.  Tolerances are the
stated ones and are not tuned to the implementation.
"""
import dataclasses
import json
import math
import time

import numpy as np
import pytest

from radarlab import analysis
from radarlab.cli import main
from radarlab.config import load_config
from radarlab.dc_estimation import gd_refine, geometric_cost, kasa_init
from radarlab.demod import arctan_demod, dacm_demod
from radarlab.digital_if import IfParams, ddc_fs4, if_modulate
from radarlab.motion import MotionTrace
from radarlab.pipeline import run_pipeline
from radarlab.radar_model import IQRecord, RadarParams, synthesize_iq

from oracles import central_difference, circle_cost, grid_search_circle, hann_weighted_envelope

TAU = 113.95
A0 = 129e-6


# -- 1. pendulum reproduction -------------------------------------------------

@pytest.fixture(scope="module")
def repro():
    cfg = load_config("pendulum-repro")
    t = time.perf_counter()
    rep = run_pipeline(cfg)
    return rep, time.perf_counter() - t


def test_c1_frequencies(repro, record_criterion):
    freqs = [s.peak_freq for s in repro[0].segments]
    ok = len(freqs) == 5 and all(abs(f - 2.03) <= 0.10 for f in freqs)
    record_criterion(1, "segment peak frequencies in 2.03 +/- 0.10 Hz", ok,
                     "freqs=" + ", ".join(f"{f:.4f}" for f in freqs))


def test_c1_first_amplitude(repro, record_criterion):
    seg = repro[0].segments[0]
    ref = hann_weighted_envelope(A0, TAU, seg.start_time, seg.start_time + seg.duration)
    err = seg.peak_amplitude / ref - 1
    record_criterion(1, "first-segment amplitude within 10% of windowed envelope", abs(err) <= 0.10,
                     f"got {seg.peak_amplitude * 1e6:.2f} um, oracle {ref * 1e6:.2f} um ({err:+.2%})")


def test_c1_final_amplitude(repro, record_criterion):
    a = repro[0].segments[-1].peak_amplitude
    err = a / 45e-6 - 1
    record_criterion(1, "final-segment amplitude 45 um +/- 10%", abs(err) <= 0.10,
                     f"got {a * 1e6:.2f} um ({err:+.2%})")


def test_c1_final_snr(repro, record_criterion):
    snr = repro[0].segments[-1].snr_db
    record_criterion(1, "final-segment SNR >= 20 dB", snr >= 20.0, f"snr={snr:.2f} dB")


def test_c1_runtime(repro, record_criterion):
    record_criterion(1, "runtime < 10 s", repro[1] < 10.0, f"{repro[1]:.2f} s")


# -- 2. harmonic linearity ----------------------------------------------------

def test_c2_noiseless_harmonics(record_criterion):
    cfg = load_config("pendulum-repro")
    cfg = dataclasses.replace(cfg, radar=dataclasses.replace(cfg.radar, noise_std=0.0, phase_noise_std=0.0))
    rep = run_pipeline(cfg)
    worst = max(float(np.max(s.harmonic_levels_db)) for s in rep.segments)
    record_criterion(2, "noiseless harmonics <= -30 dB in every segment", worst <= -30.0,
                     f"worst harmonic {worst:.1f} dB over {len(rep.segments)} segments")


# -- 3. circle fit ------------------------------------------------------------

def _random_arc(rng, sigma_ratio=0.0):
    r = 10 ** rng.uniform(-1, 1)
    a, b = rng.uniform(-20, 20, 2)
    span = math.radians(rng.uniform(60, 360))
    n = int(rng.integers(50, 501))
    th = rng.uniform(0, 2 * math.pi) + np.concatenate([[0.0, span], rng.uniform(0, span, n - 2)])
    x = a + r * np.cos(th) + sigma_ratio * r * rng.standard_normal(n)
    y = b + r * np.sin(th) + sigma_ratio * r * rng.standard_normal(n)
    return x, y, a, b, r


def test_c3_exact_circles(record_criterion):
    rng = np.random.default_rng(301)
    worst = 0.0
    for _ in range(1000):
        x, y, a, b, r = _random_arc(rng)
        fit = gd_refine((x, y), kasa_init((x, y)))
        worst = max(worst, abs(fit.center_i - a) / r, abs(fit.center_q - b) / r, abs(fit.radius - r) / r)
    record_criterion(3, "1000 exact circles recovered to 1e-6 relative", worst <= 1e-6,
                     f"worst relative error {worst:.2e}")


def test_c3_noisy_circles_vs_grid(record_criterion):
    rng = np.random.default_rng(302)
    worst = -math.inf
    for _ in range(100):
        x, y, a, b, r = _random_arc(rng, sigma_ratio=rng.uniform(0, 0.05))
        fit = gd_refine((x, y), kasa_init((x, y)))
        *_, j_grid = grid_search_circle(x, y, a, b, r)
        worst = max(worst, circle_cost(x, y, fit.center_i, fit.center_q, fit.radius) - j_grid)
    record_criterion(3, "100 noisy circles: cost <= grid oracle + 1e-6", worst <= 1e-6,
                     f"max(J_fit - J_grid) = {worst:.2e}")


# -- 4. gradient verification ------------------------------------------------

def test_c4_gradients(record_criterion):
    rng = np.random.default_rng(401)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(5, 200))
        x, y = rng.normal(0, rng.uniform(0.2, 5), (2, n))
        p = np.array([*rng.uniform(-3, 3, 2), rng.uniform(0.1, 5)])
        _, g = geometric_cost((x, y), *p)
        fd = central_difference(lambda v: circle_cost(x, y, *v), p, h=1e-6)
        worst = max(worst, np.linalg.norm(g - fd) / np.linalg.norm(fd))
    record_criterion(4, "100 analytic gradients vs central differences <= 1e-5", worst <= 1e-5,
                     f"worst relative error {worst:.2e}")


# -- 5. demodulator equivalence -----------------------------------------------

def test_c5_demodulators(record_criterion):
    rng = np.random.default_rng(501)
    lam = RadarParams().wavelength
    worst_cross = worst_at = worst_dacm = 0.0
    for _ in range(100):
        n = int(rng.integers(200, 2000))
        max_step = rng.uniform(0, math.pi / 2)
        steps = rng.uniform(-max_step, max_step, n - 1)
        phi = np.concatenate([[0.0], np.cumsum(steps)])
        x = phi * lam / (4 * math.pi)
        theta0 = rng.uniform(-math.pi, math.pi)
        iq = IQRecord(100.0, np.cos(theta0 + phi), np.sin(theta0 + phi))
        at = arctan_demod(iq, lam).displacements
        dc = dacm_demod(iq, lam).displacements
        x0 = x - x.mean()

        def rms(v):
            return float(np.sqrt(np.mean(v ** 2)))

        worst_cross = max(worst_cross, rms(at - dc))
        worst_at = max(worst_at, rms(at - at.mean() - x0))
        worst_dacm = max(worst_dacm, rms(dc - dc.mean() - x0))
    ok = worst_cross <= 1e-7 * lam and worst_at <= 1e-9 and worst_dacm <= 1e-9
    record_criterion(5, "arctan/DACM agree to 1e-7*lambda and match truth to 1e-9 m", ok,
                     f"RMS(at-dacm)={worst_cross:.2e} m (limit {1e-7 * lam:.2e}), "
                     f"arctan-truth={worst_at:.2e} m, dacm-truth={worst_dacm:.2e} m")


# -- 6. digital IF round trip -------------------------------------------------

def test_c6_if_round_trip(record_criterion):
    rng = np.random.default_rng(601)
    worst = 0.0
    for _ in range(20):
        ifp = IfParams(clutter_amp=rng.uniform(0, 1), clutter_phase=rng.uniform(-math.pi, math.pi))
        rp = RadarParams(theta0=rng.uniform(-math.pi, math.pi))
        t = np.arange(500) / 100.0
        x = np.zeros_like(t)
        for _ in range(int(rng.integers(1, 4))):
            x += rng.uniform(1e-6, 60e-6) * np.sin(2 * math.pi * rng.uniform(0.1, 10.0) * t
                                                   + rng.uniform(0, 2 * math.pi))
        motion = MotionTrace(100.0, x)
        got = ddc_fs4(if_modulate(motion, rp, ifp), ifp)
        k = got.transient_samples
        got = got.trimmed()
        dci, dcq = ifp.equivalent_dc()
        ref = synthesize_iq(motion, dataclasses.replace(rp, dc_i=dci, dc_q=dcq))
        z_ref = (ref.i_samples + 1j * ref.q_samples)[k:len(ref) - k]
        z = got.i_samples + 1j * got.q_samples
        worst = max(worst, math.sqrt(np.mean(np.abs(z - z_ref) ** 2) / np.mean(np.abs(z_ref) ** 2)))
    ifp = IfParams(signal_amp=0.0, clutter_amp=0.7, clutter_phase=2.1)
    clutter = ddc_fs4(if_modulate(MotionTrace(100.0, np.zeros(500)), RadarParams(), ifp), ifp).trimmed()
    var = max(np.var(clutter.i_samples), np.var(clutter.q_samples))
    ok = worst <= 0.01 and var <= 1e-10
    record_criterion(6, "IF round trip <= 1% RMS and clutter-only variance <= 1e-10", ok,
                     f"worst RMS error {worst:.2e}, clutter variance {var:.2e}")


# -- 7. spectral calibration --------------------------------------------------

def test_c7_spectral_calibration(record_criterion):
    fs, n = 100.0, 2400
    worst_amp = worst_bin = worst_parseval = 0.0
    for offset in (0.13, 0.29, 0.37, 0.5, 0.71, 0.88):
        f0 = (49 + offset) * fs / n
        x = 45e-6 * np.sin(2 * math.pi * f0 * np.arange(n) / fs + 0.4)
        rep = analysis.spectrum(MotionTrace(fs, x))
        worst_amp = max(worst_amp, abs(rep.peak_amplitude / 45e-6 - 1))
        worst_bin = max(worst_bin, abs(rep.peak_freq - f0) / rep.bin_width)
        spec_p, time_p = analysis.parseval_terms(x)
        worst_parseval = max(worst_parseval, abs(spec_p / time_p - 1))
    ok = worst_amp <= 0.02 and worst_bin <= 0.1 and worst_parseval <= 1e-9
    record_criterion(7, "off-bin 45 um tone: amplitude 2%, frequency 0.1 bin, Parseval 1e-9", ok,
                     f"amp error {worst_amp:.2%}, freq error {worst_bin:.3f} bin, Parseval {worst_parseval:.1e}")


# -- 8. determinism ------------------------------------------------------------

def _snapshot(path):
    return {p.name: p.read_bytes() for p in path.iterdir()} if path.is_dir() else {}


def test_c8_determinism(tmp_path, record_criterion):
    base = {"schema_version": 1, "radar": {"carrier_freq": 60e9, "theta0": 0.3, "dc_i": 0.2,
                                            "noise_std": 0.002, "rng_seed": 11},
            "motion": {"type": "pendulum", "arm_length": 0.06, "initial_amplitude": 129e-6,
                       "decay_time": TAU}, "duration": 24.0, "n_segments": 2}
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(base))
    if_cfg = tmp_path / "if.json"
    if_cfg.write_text(json.dumps({**base, "path": "digital_if", "duration": 4.0, "n_segments": 1,
                                  "if_params": {"clutter_amp": 0.2}}))
    runs = [
        ["synth", "--config", str(cfg), "--seed", "5"],
        ["fitdc", "--config", str(cfg)],
        ["demod", "--config", str(cfg), "--method", "both"],
        ["analyze", "--config", str(cfg)],
        ["ddc", "--config", str(if_cfg), "--write-if"],
        ["pipeline", "--config", "pendulum-repro"],
    ]
    bad = []
    for argv in runs:
        out = tmp_path / ("stage" if argv[0] in ("synth", "fitdc", "demod", "analyze") else argv[0])
        codes = []
        first = None
        for _ in range(2):
            codes.append(main(argv + ["--out", str(out)]))
            snap = _snapshot(out)
            first = first or snap
        if codes != [0, 0] or snap != first:
            bad.append(argv[0])
    record_criterion(8, "repeated runs give byte-identical outputs", not bad,
                     "all commands identical" if not bad else "differs: " + ", ".join(bad))
