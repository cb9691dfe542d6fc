"""Acceptance criteria, one test per criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import io
import json
import random
import time
from dataclasses import astuple

import numpy as np

from evdenoise import ingest
from evdenoise.baselines import Bs1Filter, Bs2Filter, Bs3Filter, verdicts
from evdenoise.cli import main
from evdenoise.events import Event, Label, SensorGeometry, strip_labels
from evdenoise.framer import BinaryFrame
from evdenoise.metrics import psnr, ssim
from evdenoise.seqx import (
    Aggregation,
    OpCount,
    OpCounter,
    PastEventWindow,
    ScaledSeqXFilter,
    SeqXConfig,
    SeqXFilter,
    instrumented_check,
)
from evdenoise.synth import Scores, generate, pendulum_scene, score

from oracles import (
    bs1_oracle,
    bs2_oracle,
    bs3_oracle,
    random_geometry,
    random_stream,
    scaled_oracle_threshold_gap,
    seqx_oracle,
)

G128 = SensorGeometry(128, 128)
QUALITY_RADIUS = 1  # object footprint for the denoising-quality scenes


def test_c01_seqx_oracle_equivalence(criterion):
    rng = random.Random(20240101)
    mismatches = 0
    start = time.perf_counter()
    for _ in range(1000):
        g = random_geometry(rng, 32)
        x = rng.choice([1, 2, 4])
        sigma = rng.choice([0.02, 0.05, 0.1])
        mode = rng.choice(list(Aggregation))
        weights = tuple(rng.uniform(0.1, 3) for _ in range(x)) if mode is Aggregation.WAVG and x != 2 else None
        upd = rng.random() < 0.5
        ev = random_stream(rng, g, rng.randint(1, 500))
        cfg = SeqXConfig(x, sigma, mode, weights, upd)
        got = verdicts(SeqXFilter(g, cfg), ev)
        mismatches += got != seqx_oracle(ev, g, x, sigma, mode, cfg.weights, upd)
    elapsed = time.perf_counter() - start
    criterion(1, mismatches == 0 and elapsed < 10, f"{mismatches} mismatching streams / 1000, {elapsed:.2f} s")


def test_c02_baseline_oracle_equivalence(criterion):
    rng = random.Random(20240102)
    mismatches = 0
    start = time.perf_counter()
    for _ in range(1000):
        g = random_geometry(rng, 16)
        ev = random_stream(rng, g, rng.randint(1, 200), max_gap=1500)
        dt = rng.choice([1, 100, 1000, 2000])
        s = rng.choice([1, 2, 3])
        mismatches += verdicts(Bs1Filter(g, dt), ev) != bs1_oracle(ev, dt)
        mismatches += verdicts(Bs2Filter(g, dt, s), ev) != bs2_oracle(ev, dt, s)
        mismatches += verdicts(Bs3Filter(g, dt), ev) != bs3_oracle(ev, dt)
    elapsed = time.perf_counter() - start
    criterion(2, mismatches == 0 and elapsed < 10, f"{mismatches} mismatches over 3x1000 runs, {elapsed:.2f} s")


def test_c03_scaled_path(criterion):
    rng = random.Random(20240103)
    exact_bad = 0
    outside = 0
    near = 0
    start = time.perf_counter()
    for _ in range(1000):
        g = random_geometry(rng, 32)
        x = rng.choice([1, 2, 4])
        ev = random_stream(rng, g, rng.randint(1, 300))
        # exact scaling: sigma * M * N integral
        sigma = rng.randint(1, 2 * g.n_pixels - 1) / g.n_pixels
        cfg = SeqXConfig(x, sigma, update_on_real=rng.random() < 0.5)
        exact_bad += verdicts(ScaledSeqXFilter(g, cfg), ev) != verdicts(SeqXFilter(g, cfg), ev)
        # non-integral scaling; the window stores every event, so both paths
        # see the same suffix and disagreements can be located per event
        cfg = SeqXConfig(x, rng.uniform(0.005, 0.3))
        a = verdicts(ScaledSeqXFilter(g, cfg), ev)
        b = verdicts(SeqXFilter(g, cfg), ev)
        for i in range(x, len(ev)):
            if a[i] != b[i]:
                near += 1
                if scaled_oracle_threshold_gap(ev[i], ev[i - x : i], g, cfg.sigma) > 1:
                    outside += 1
    elapsed = time.perf_counter() - start
    ok = exact_bad == 0 and outside == 0 and elapsed < 5
    criterion(
        3,
        ok,
        f"exact sigma: {exact_bad} disagreeing streams; non-integral: {near} disagreements, "
        f"{outside} beyond one quantum; {elapsed:.2f} s",
    )


def test_c04_constant_memory(criterion):
    sweep = [(128, 128), (240, 180), (346, 260), (640, 480), (768, 640)]
    problems = []
    for x in (1, 2, 4, 8):
        sizes = set()
        for w, h in sweep:
            g = SensorGeometry(w, h)
            f = SeqXFilter(g, SeqXConfig(x, 0.05))
            payload = f.window.slots.itemsize * 8 * len(f.window.slots)
            sizes.add((f.state_size_bits, payload))
        if sizes != {(32 * x, 32 * x)}:
            problems.append(f"X={x}: {sorted(sizes)}")
    cells = [Bs1Filter(SensorGeometry(w, h)).state_cells for w, h in sweep]
    if cells != [w * h for w, h in sweep]:
        problems.append(f"bs1 cells {cells}")
    detail = "; ".join(problems) or f"seqx 32*X bits on all geometries; bs1 cells {cells[0]}..{cells[-1]}"
    criterion(4, not problems, detail)


def test_c05_operation_count(criterion):
    cfg = SeqXConfig(2, 0.05)
    rng = random.Random(5)
    ref = SeqXFilter(G128, cfg)
    win = PastEventWindow(2)
    counts, agree = set(), True
    for i in range(2000):
        e = Event(i, rng.randrange(128), rng.randrange(128))
        want = ref.check(e)
        if not win.full:
            win.write(e.x, e.y)
            continue
        ops = OpCounter()
        agree &= instrumented_check(win, cfg, e, G128, ops) is want
        counts.add(ops.snapshot())
    ok = counts == {OpCount(6, 2, 2, 2)} and agree
    criterion(5, ok, f"per-event (add, div, cmp, write) = {sorted(astuple(c) for c in counts)}, verdicts agree: {agree}")


def test_c06_metric_closed_forms(criterion):
    g = SensorGeometry(100, 100)
    off = BinaryFrame.blank(g)
    on = BinaryFrame(np.full((100, 100), 255, np.uint8), g)
    one = BinaryFrame(off.pixels.copy(), g)
    one.pixels[37, 61] = 255
    p_comp = psnr(off, on)
    p_one = psnr(off, one)
    rng = np.random.default_rng(6)
    self_err = asym = 0.0
    for _ in range(100):
        a = BinaryFrame((rng.random((40, 50)) < 0.2).astype(np.uint8) * 255, SensorGeometry(50, 40))
        b = BinaryFrame((rng.random((40, 50)) < 0.2).astype(np.uint8) * 255, SensorGeometry(50, 40))
        self_err = max(self_err, abs(ssim(a, a) - 1.0))
        asym = max(asym, abs(ssim(a, b) - ssim(b, a)), abs(psnr(a, b) - psnr(b, a)))
    ok = p_comp == 0.0 and abs(p_one - 40.0) <= 1e-9 and self_err <= 1e-12 and asym <= 1e-12
    criterion(
        6, ok, f"complementary {p_comp!r} dB, one pixel {p_one!r} dB, |ssim(a,a)-1| {self_err:.1e}, asym {asym:.1e}"
    )


def _quality(noise_rate, filters):
    truth = generate(pendulum_scene(G128, 5_000_000, 20_000, noise_rate, QUALITY_RADIUS, seed=1))
    ev = strip_labels(truth)
    return {name: score(truth, verdicts(f, ev)) for name, f in filters.items()}


# confusion counts frozen from the first oracle-verified run (seed 1, radius 1)
PINNED_C7 = {"seqx": Scores(tp=75429, fp=878, tn=99749, fn=24987), "bs1": Scores(tp=100349, fp=1136, tn=99491, fn=67)}
PINNED_C8 = {"x4": Scores(tp=56691, fp=915, tn=299425, fn=43725), "x2": Scores(tp=44551, fp=2112, tn=298228, fn=55865)}


def test_c07_quality_vs_baseline(criterion):
    s = _quality(20_000, {"seqx": SeqXFilter(G128, SeqXConfig(2, 0.05)), "bs1": Bs1Filter(G128, 1000)})
    dr = abs(s["seqx"].recall - s["bs1"].recall)
    df = abs(s["seqx"].false_positive_rate - s["bs1"].false_positive_rate)
    detail = (
        f"recall seqx {s['seqx'].recall:.4f} bs1 {s['bs1'].recall:.4f} (|d| {dr:.4f} <= 0.10); "
        f"FPR seqx {s['seqx'].false_positive_rate:.4f} bs1 {s['bs1'].false_positive_rate:.4f} (|d| {df:.4f} <= 0.10)"
    )
    assert s == PINNED_C7, detail
    criterion(7, dr <= 0.10 and df <= 0.10, detail)


def test_c08_window_length(criterion):
    s = _quality(60_000, {"x4": SeqXFilter(G128, SeqXConfig(4, 0.02)), "x2": SeqXFilter(G128, SeqXConfig(2, 0.04))})
    f4, f2 = s["x4"].false_positive_rate, s["x2"].false_positive_rate
    drop = s["x2"].recall - s["x4"].recall
    detail = f"FPR X=4 {f4:.4f} vs X=2 {f2:.4f}; recall X=4 {s['x4'].recall:.4f} vs X=2 {s['x2'].recall:.4f} (drop {drop:+.4f} <= 0.05)"
    assert s == PINNED_C8, detail
    criterion(8, f4 <= f2 and drop <= 0.05, detail)


def test_c09_function_selection(criterion, tmp_path, capsys):
    stream = tmp_path / "study.evb"
    assert main(["generate", str(stream), "--signal-rate", "35000", "--noise-rate", "35000",
                 "--cluster-radius", "3", "--seed", "2"]) == 0
    capsys.readouterr()
    _, events = ingest.load_stream(stream)
    assert main(["analyze", str(stream), "--json"]) == 0
    v = json.loads(capsys.readouterr().out)
    m = v["per_function"]["min"]
    ok = v["selected"] == "min" and m["rule1_pass"] and m["rule2_rank"] == 1 and not v["rule1_fallback"]
    criterion(
        9,
        ok,
        f"{len(events)} events, selected {v['selected']}; min rule1 {m['rule1_pass']}, rule2 rank {m['rule2_rank']}",
    )


def test_c10_sigma_monotonicity(criterion):
    ev = strip_labels(generate(pendulum_scene(G128, 2_000_000, 20_000, 20_000, 2, seed=10)))
    violations = 0
    sizes = []
    for mode in Aggregation:
        lo = verdicts(SeqXFilter(G128, SeqXConfig(2, 0.05, mode)), ev)
        hi = verdicts(SeqXFilter(G128, SeqXConfig(2, 0.1, mode)), ev)
        violations += sum(1 for a, b in zip(lo, hi) if a == Label.REAL and b != Label.REAL)
        sizes.append(f"{mode.value} {sum(lo)}<={sum(hi)}")
    criterion(10, violations == 0, f"{violations} violations over {len(ev)} events; " + ", ".join(sizes))


def test_c11_ingest_round_trips(criterion):
    rng = random.Random(11)
    bad_text = bad_bin = bad_size = 0
    for _ in range(1000):
        g = SensorGeometry(rng.randint(1, 65535), rng.randint(1, 65535))
        n = rng.randint(0, 60)
        t = 0
        ev = []
        for _ in range(n):
            t += rng.choice((0, 1, rng.randrange(10**6), rng.randrange(2**40)))
            ev.append(Event(t, rng.randrange(g.width), rng.randrange(g.height), rng.randint(0, 1)))
        s = io.StringIO()
        ingest.write_text(g, ev, s)
        bad_text += ingest.read_text(io.StringIO(s.getvalue())) != (g, ev)
        b = io.BytesIO()
        ingest.write_binary(g, ev, b)
        raw = b.getvalue()
        bad_size += len(raw) != 16 + 13 * n
        bad_bin += ingest.read_binary(io.BytesIO(raw)) != (g, ev)
    criterion(11, bad_text + bad_bin + bad_size == 0, f"text {bad_text}, binary {bad_bin}, size {bad_size} failures / 1000")
