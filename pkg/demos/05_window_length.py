"""Longer windows with a tighter sigma under heavy background noise."""

from evdenoise import SensorGeometry, SeqXConfig, SeqXFilter, verdicts
from evdenoise.events import strip_labels
from evdenoise.synth import generate, pendulum_scene, score

geom = SensorGeometry(128, 128)
truth = generate(pendulum_scene(geom, 2_000_000, 20_000, 60_000, cluster_radius=1, seed=1))
events = strip_labels(truth)

print(f"{'X':>2}{'sigma':>8}{'recall':>8}{'FPR':>8}")
for x, sigma in [(1, 0.05), (2, 0.04), (2, 0.02), (4, 0.02), (8, 0.02)]:
    s = score(truth, verdicts(SeqXFilter(geom, SeqXConfig(x, sigma)), events))
    print(f"{x:>2}{sigma:>8.3f}{s.recall:>8.3f}{s.false_positive_rate:>8.4f}")
