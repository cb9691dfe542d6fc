"""Render filtered streams to binary frames and compare them with PSNR/SSIM.

bs1 frames serve as the reference; SeqX frames are the test sequence.
"""

import tempfile
from pathlib import Path

from evdenoise import Bs1Filter, SensorGeometry, SeqXFilter, passed, run_filter
from evdenoise.events import strip_labels
from evdenoise.framer import accumulate, default_bundle_sizes, load_frames, save_frames
from evdenoise.metrics import compare_pipelines
from evdenoise.synth import generate, pendulum_scene

geom = SensorGeometry(128, 128)
events = strip_labels(generate(pendulum_scene(geom, duration_us=2_000_000, seed=4)))
ref_events = passed(run_filter(Bs1Filter(geom), events))
test_events = passed(run_filter(SeqXFilter(geom), events))

for count in default_bundle_sizes(geom):
    ref = accumulate(ref_events, geom, count)
    test = accumulate(test_events, geom, count)
    n = min(len(ref), len(test))
    report = compare_pipelines(ref[:n], test[:n], workers=4)
    print(f"{count:>5} events/frame: {n:>3} frames, PSNR {report.mean_psnr:6.2f} dB, SSIM {report.mean_ssim:.4f}")

# frames round-trip through PGM files
with tempfile.TemporaryDirectory() as d:
    frames = accumulate(test_events, geom, 1000)
    save_frames(frames, d)
    assert load_frames(d) == frames
    print(f"wrote and reloaded {len(frames)} PGM files, e.g. {sorted(Path(d).iterdir())[0].name}")
