"""Denoise a synthetic pendulum scene with SeqX and the three baselines.

The scene has ground-truth labels, so each filter gets a recall (fraction of
object events kept) and a false-positive rate (fraction of noise kept).
"""

from evdenoise import Bs1Filter, Bs2Filter, Bs3Filter, SensorGeometry, SeqXConfig, SeqXFilter, verdicts
from evdenoise.events import strip_labels
from evdenoise.synth import generate, pendulum_scene, score

geom = SensorGeometry(128, 128)
truth = generate(pendulum_scene(geom, duration_us=2_000_000, cluster_radius=1, seed=1))
events = strip_labels(truth)
print(f"{len(events)} events, {sum(1 for le in truth if le.label)} from the object")

filters = {
    "seqx X=2 min": SeqXFilter(geom, SeqXConfig.default_for(geom)),
    "bs1 dT=1ms": Bs1Filter(geom, 1000),
    "bs2 dT=2ms s=2": Bs2Filter(geom, 2000, 2),
    "bs3 dT=1ms": Bs3Filter(geom, 1000),
}
print(f"{'filter':<16}{'recall':>8}{'FPR':>8}{'precision':>11}")
for name, f in filters.items():
    s = score(truth, verdicts(f, events))
    print(f"{name:<16}{s.recall:>8.3f}{s.false_positive_rate:>8.3f}{s.precision:>11.3f}")

# SeqX keeps a few coordinates; bs1 keeps one timestamp per pixel.
print(f"seqx state: {filters['seqx X=2 min'].state_size_bits} bits")
print(f"bs1 state:  {filters['bs1 dT=1ms'].state_cells} timestamp cells")
