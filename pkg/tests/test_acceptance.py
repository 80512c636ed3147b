"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` and read the "acceptance criteria"
section of the terminal summary.
"""

import json
import math
import time

import numpy as np

from oscillaton.analysis import default_params, fit_gaussian, full_pipeline, load_params, save_params
from oscillaton.cli import dispatch
from oscillaton.errors import ThresholdError
from oscillaton.fock import ModeSpace, mixing_params
from oscillaton.gaussian import GaussianModel
from oscillaton.invariants import eigenfunction_gram, mixed_commutator_deviation, single_sector_photon_matrix
from oscillaton.scattering import Kinematics, decompose_channels, inelastic_frequency
from oscillaton.traces import TraceSpec, dumps_trace, generate_trace, loads_trace, noise_for_peak_sigma

WIDTH = 0.6
NOISE_780 = noise_for_peak_sigma(0.01 * 1.18, WIDTH)  # 1% peak uncertainty
NOISE_1560 = noise_for_peak_sigma(0.0012, WIDTH)


def bound_outputs():
    code, rep = dispatch(["bound"])
    assert code == 0
    return {k: v["value"] for k, v in rep["outputs"].items()}


def test_1_bound_reproduction(acceptance):
    t0 = time.perf_counter()
    out = bound_outputs()
    elapsed = time.perf_counter() - t0
    ok = (
        abs(out["f_e"] - 1.17) <= 0.005
        and abs(out["r_bound"] / 1.48e-7 - 1) <= 0.01
        and 1.90e-4 <= out["gamma_bound"] <= 1.95e-4
        and elapsed < 1.0
    )
    acceptance(1, "bound reproduction", ok,
               f"f_e={out['f_e']:.5f} R<={out['r_bound']:.4e} |gamma|<={out['gamma_bound']:.4e} rad ({elapsed:.3f} s)")


def test_2_end_to_end_pipeline(acceptance):
    reference = bound_outputs()["gamma_bound"]
    params = default_params()
    t0 = time.perf_counter()
    gammas = []
    for seed in range(100):
        t780 = generate_trace(TraceSpec(GaussianModel(1.18, 0.0, WIDTH, 0.0), noise_sigma=NOISE_780, seed=2 * seed + 1))
        t1560 = generate_trace(TraceSpec(GaussianModel(0.0, 0.0, WIDTH, 0.0), noise_sigma=NOISE_1560, seed=2 * seed + 2))
        gammas.append(full_pipeline(t780, t1560, params).gamma_bound)
    elapsed = time.perf_counter() - t0
    gammas = np.array(gammas)
    median = float(np.median(gammas))
    ok = (
        gammas.min() >= 1.8e-4
        and gammas.max() <= 2.1e-4
        and abs(median / reference - 1) <= 0.03
        and elapsed < 30.0
    )
    acceptance(2, "end-to-end pipeline", ok,
               f"range [{gammas.min():.4e}, {gammas.max():.4e}] median {median:.4e} "
               f"vs {reference:.4e} ({elapsed:.1f} s)")


def test_3_commutation_preservation(acceptance):
    space = ModeSpace()
    t0 = time.perf_counter()
    dev = mixed_commutator_deviation(space, np.linspace(-0.5, 0.5, 20))
    elapsed = time.perf_counter() - t0
    acceptance(3, "commutation preservation", dev < 1e-12 and elapsed < 10.0,
               f"max deviation {dev:.2e} over 20 gammas, levels 0..{space.level_cutoff - 1} ({elapsed:.2f} s)")


def test_4_single_oscillaton_equivalence(acceptance):
    space = ModeSpace()
    block = single_sector_photon_matrix(space)
    standard = np.zeros_like(block)
    for n in range(1, space.n_levels):
        standard[n - 1, n] = math.sqrt(n)
    diff = float(np.max(np.abs(block - standard)))
    acceptance(4, "single-oscillaton equivalence", diff == 0.0, f"max difference {diff!r}")


def test_5_quadratic_channel_scaling(acceptance):
    space = ModeSpace()
    ground = space.index((2, 1))
    gammas = [1e-3, 3e-3, 1e-2]
    ratios = [decompose_channels(space, mixing_params(g)).ratios() for g in gammas]
    spread = max(
        max(r[idx] / g**2 for r, g in zip(ratios, gammas)) / min(r[idx] / g**2 for r, g in zip(ratios, gammas)) - 1
        for idx in ratios[0]
    )
    ground_const = [r[ground] / g**2 for r, g in zip(ratios, gammas)]
    _, rep = dispatch(["predict", "--gamma", "0.001"])
    reports_both = rep["outputs"]["R_constant"]["value"] == 4.0 and "pair_channels" in rep["outputs"]
    ok = spread < 0.01 and all(abs(c / 2.0 - 1) <= 0.01 for c in ground_const) and reports_both
    acceptance(5, "quadratic channel scaling", ok,
               f"per-channel spread {spread:.2e}; ground ratio/gamma^2 = "
               + ", ".join(f"{c:.6f}" for c in ground_const) + "; R constant 4 reported")


def test_6_kinematics(acceptance):
    from scipy import constants

    w = 2.417e15
    exact_half = inelastic_frequency(Kinematics(omega_in=w)) == w / 2
    m_thr = constants.hbar * w / (2 * constants.c**2)
    try:
        inelastic_frequency(Kinematics(omega_in=w, mass=2 * m_thr))
        above_raises = False
    except ThresholdError:
        above_raises = True
    try:
        inelastic_frequency(Kinematics(omega_in=2.0, mass=1.0, c_light=1.0, hbar=1.0))
        boundary_raises = False
    except ThresholdError:
        boundary_raises = True
    masses = np.linspace(0, 0.95 * m_thr, 10)
    freqs = [inelastic_frequency(Kinematics(omega_in=w, mass=m)) for m in masses]
    monotone = all(b < a for a, b in zip(freqs, freqs[1:]))
    ok = exact_half and above_raises and boundary_raises and monotone
    acceptance(6, "kinematics", ok,
               f"omega'(0)=omega/2: {exact_half}; threshold error: {above_raises and boundary_raises}; "
               f"monotone on 10 masses: {monotone}")


def test_7_fitter_soundness(acceptance):
    truth = GaussianModel(1.18, 0.0, WIDTH, 0.0)
    fit = fit_gaussian(generate_trace(TraceSpec(truth)))
    rel = max(abs(fit.model.peak / 1.18 - 1), abs(fit.model.width / WIDTH - 1),
              abs(fit.model.center), abs(fit.model.baseline))
    t0 = time.perf_counter()
    covered = 0
    for seed in range(1000):
        tr = generate_trace(TraceSpec(GaussianModel(0.0, 0.0, WIDTH, 0.0), noise_sigma=NOISE_1560, seed=100_000 + seed))
        f = fit_gaussian(tr, fixed_width=WIDTH, fixed_center=0.0)
        covered += abs(f.model.peak) < 3 * f.sigma["peak"]
    elapsed = time.perf_counter() - t0
    ok = rel < 1e-9 and covered >= 980 and elapsed < 60.0
    acceptance(7, "fitter soundness", ok,
               f"noiseless max error {rel:.1e}; coverage {covered}/1000 ({elapsed:.1f} s)")


def test_8_eigenfunction_orthonormality(acceptance):
    gram = eigenfunction_gram(10, 40)
    dev = float(np.max(np.abs(gram - np.eye(11))))
    acceptance(8, "eigenfunction orthonormality", dev < 1e-10, f"max |G - I| = {dev:.2e} (n, m <= 10, 40 nodes)")


def test_9_serialization(acceptance, tmp_path):
    lossless = 0
    for seed in range(100):
        tr = generate_trace(TraceSpec(GaussianModel(0.3 * (seed % 5), 0.1, 0.5, 0.01),
                                      noise_sigma=0.01, seed=seed, meta=f"seed {seed}"))
        lossless += loads_trace(dumps_trace(tr)) == tr
    path = tmp_path / "params.json"
    save_params(default_params(), path)
    _, direct = dispatch(["bound"])
    _, via_file = dispatch(["bound", "--params", str(path)])
    identical = direct["outputs"] == via_file["outputs"]
    same_bits = json.dumps(direct["outputs"]) == json.dumps(via_file["outputs"])
    ok = lossless == 100 and identical and same_bits and load_params(path) == default_params()
    acceptance(9, "serialization", ok, f"trace round-trips {lossless}/100; params JSON bit-identical: {same_bits}")
