"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines are repeated in the terminal summary) or directly:

    python3 tests/test_acceptance.py
"""
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from oracles import poisson_mixture, raman_by_segments, single_photon_truth  # noqa: E402

from qgpon.detector import loss_breakdown_db  # noqa: E402
from qgpon.keyrate import (  # noqa: E402
    IntensityStats,
    ProtocolStats,
    decoy_bounds,
    finite_size_key_length,
    hoeffding_deviations,
    secure_key_rate,
)
from qgpon.model import ChannelCoefficients, alpha_natural_to_db_per_km, binary_entropy  # noqa: E402
from qgpon.raman import backward_raman_power, forward_raman_power  # noqa: E402
from qgpon.scenarios import assign, preset, qber_contour, sweep_capacity, sweep_feeder, with_capacity  # noqa: E402
from qgpon.topology import ProtocolConfig, QuantumTxConfig  # noqa: E402

RESULTS = []


def report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


def c1_raman_oracle():
    c = ChannelCoefficients()
    pairs = [(c.alpha_us_per_km, c.beta_us_per_nm), (c.alpha_ds_per_km, c.beta_ds_per_nm),
             (c.alpha_clk_per_km, c.beta_clk_per_nm), (c.alpha_q_per_km, c.beta_ds_per_nm)]
    worst = 0.0
    for alpha_s, beta in pairs:
        for length in (0.1, 0.5, 1, 2, 5, 10, 20, 25):
            for forward, fn in ((True, forward_raman_power), (False, backward_raman_power)):
                got = fn(1e-3, beta, 0.14, 0.127, alpha_s, c.alpha_q_per_km, length).watts
                ref = raman_by_segments(1e-3, beta, 0.14, 0.127, alpha_s, c.alpha_q_per_km, length, forward, 10000)
                worst = max(worst, abs(got - ref) / ref)
    return report(1, worst <= 1e-3, f"closed-form Raman vs 10^4-segment integration, worst rel. error {worst:.2e} (<= 1e-3)")


def c2_fig2b_properties():
    fs = list(range(21))
    ns = [8, 16, 32, 64, 128]
    grid = qber_contour(preset("fig2b"), fs, ns)
    q = {(r["F"], r["N"]): r["qber"] for r in grid.records}
    mono_f = all(q[(f, n)] <= q[(f + 1, n)] for n in ns for f in fs[:-1])
    mono_n = all(q[(f, a)] <= q[(f, b)] for f in fs for a, b in zip(ns, ns[1:]))
    corner = q[(0, 8)]
    worst = max(q.values())
    ok = mono_f and mono_n and corner < 0.11 and worst > 0.11
    return report(2, ok, f"fig2b 21x5 QBER grid: monotone in F {mono_f}, in N {mono_n}, "
                         f"QBER(N=8,F=0) {corner:.4f} < 0.11, max QBER {worst:.4f} > 0.11")


def c3_fig3b_anchor():
    s = preset("fig3b_128")
    rate = secure_key_rate(s).rate_bps
    loss = loss_breakdown_db(s)["total_db"]
    arithmetic = 22.8 + 5.5 + alpha_natural_to_db_per_km(0.046) * 20.0
    ok = 100.0 <= rate <= 2500.0 and abs(loss - 30.0) <= 3.0 and abs(loss - arithmetic) <= 0.01
    return report(3, ok, f"fig3b_128 rate {rate:.1f} bps in [100, 2500]; loss {loss:.4f} dB "
                         f"(|loss-30| <= 3, |loss-{arithmetic:.4f}| <= 0.01)")


def c4_fig3a_monotone():
    rates = sweep_feeder(preset("fig3a"), range(21), 20.0).column("rate_bps")
    ok = rates[0] == min(rates) and all(b >= a for a, b in zip(rates, rates[1:]))
    return report(4, ok, f"fig3a F=0..20: min at F=0 and nondecreasing ({rates[0]:.0f} -> {rates[-1]:.0f} bps)")


def c5_fig2a_dichotomy():
    low = sweep_feeder(assign(preset("fig2a"), "signal_plan.ds_launch_dbm", -11), range(21), 20.0).column("rate_bps")
    full = sweep_feeder(preset("fig2a"), range(21), 20.0).column("rate_bps")
    ok = all(r > 0 for r in low) and all(r == 0 for r in full[2:])
    return report(5, ok, f"fig2a: -11 dBm positive at all 21 F (min {min(low):.1f} bps); "
                         f"4 dBm zero for F >= 2 (max {max(full[2:]):.1f} bps)")


def c6_fig4_capacity():
    rates = sweep_capacity(preset("fig4"), [16, 32, 64, 128]).column("rate_bps")
    ok = all(r > 0 for r in rates) and all(b < a for a, b in zip(rates, rates[1:]))
    return report(6, ok, "fig4 N=16/32/64/128 rates " + ", ".join(f"{r:.1f}" for r in rates) + " bps, positive and decreasing")


def _fig5_rate(base, per_drop_km):
    return secure_key_rate(base.evolve(drop_km=float(per_drop_km))).rate_bps


def c7_fig5_reach():
    ok, parts = True, []
    for n in (16, 32, 64, 128):
        base = with_capacity(preset("fig5"), n)
        per_drop = np.arange(0.0, 200.5, 0.5)
        rates = [_fig5_rate(base, d) for d in per_drop]
        mono = all(b <= a for a, b in zip(rates, rates[1:]))
        zeros = [d for d, r in zip(per_drop, rates) if r == 0]
        if not zeros:
            ok, parts = False, parts + [f"N={n}: no zero found"]
            continue
        lo, hi = zeros[0] - 0.5, zeros[0]
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if _fig5_rate(base, mid) > 0 else (lo, mid)
        total = n * hi
        ok &= mono and total > n * 10.0
        parts.append(f"N={n}: zero at {total:.0f} km > {n * 10} km, monotone {mono}")
    return report(7, ok, "fig5 " + "; ".join(parts))


def c8_decoy_soundness():
    rng = np.random.default_rng(2024)
    tx = QuantumTxConfig()
    violations = 0
    for _ in range(1000):
        eta = 10 ** rng.uniform(-5, 0)
        y_bg = rng.uniform(0, 1e-3)
        e_opt = rng.uniform(0, 0.05)
        T = 10 ** rng.uniform(1, 5)
        per = {}
        for name, k in tx.intensities.items():
            q, eq = poisson_mixture(k, eta, y_bg, e_opt)
            n = tx.tx_rate_hz * T * tx.probabilities[name]
            per[name] = IntensityStats(k, n, q, eq / q, n * q * tx.p_z**2)
        stats = ProtocolStats(p_z=tx.p_z, **per)
        true_y1, true_e1 = single_photon_truth(eta, y_bg, e_opt)
        b = decoy_bounds(stats, tx, hoeffding_deviations(stats, 1e-10 / 3))
        violations += b.y1_lower > true_y1 * (1 + 1e-12)
        violations += b.e1_upper < true_e1 * (1 - 1e-12)
    return report(8, violations == 0, f"1000 random draws against the photon-number oracle, violations {violations}")


def c9_threshold():
    tx = QuantumTxConfig()
    cfg = ProtocolConfig()
    from qgpon.keyrate import DecoyBounds

    generous = DecoyBounds(0.0, 0.5, 0.0)
    leaks = 0
    for qber in np.linspace(0.11, 0.5, 200):
        per = {name: IntensityStats(k, 1e13 * tx.probabilities[name], 1e-2, float(qber),
                                    1e13 * tx.probabilities[name] * 1e-2 * tx.p_z**2)
               for name, k in tx.intensities.items()}
        leaks += finite_size_key_length(ProtocolStats(p_z=tx.p_z, **per), generous, cfg, tx).key_length_bits != 0
    h = binary_entropy(0.11)
    ok_abort = leaks == 0
    ok_h = abs(h - 0.49981) <= 1e-5
    return report(9, ok_abort and ok_h, f"abort at QBER >= 0.11 (non-zero keys {leaks}); "
                                        f"h(0.11) = {h:.6f} vs stated 0.49981 +- 1e-5 ({'ok' if ok_h else 'off by %.1e' % abs(h - 0.49981)})")


def c10_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for jobs in ("1", "1", "3"):
            out = Path(tmp) / f"run{len(outs)}.csv"
            subprocess.run([sys.executable, "-m", "qgpon", "sweep", "--preset", "fig3a", "--axis", "F=0:20:1",
                            "--axis", "N=8,32,128", "--out", str(out), "--jobs", jobs], check=True, capture_output=True)
            outs.append(out.read_bytes())
    ok = outs[0] == outs[1] == outs[2]
    return report(10, ok, f"sweep CSV byte-identical over two serial runs and a 3-worker run ({len(outs[0])} bytes)")


CRITERIA = [c1_raman_oracle, c2_fig2b_properties, c3_fig3b_anchor, c4_fig3a_monotone, c5_fig2a_dichotomy,
            c6_fig4_capacity, c7_fig5_reach, c8_decoy_soundness, c9_threshold, c10_determinism]


@pytest.mark.parametrize("check", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
