"""Which aggregation isolates real events best?

Label a synthetic stream with bs1, histogram the window score of each
aggregation for real and noise events, and apply the three selection rules.
"""

import io

from evdenoise import Bs1Filter, SensorGeometry, verdicts
from evdenoise.analysis import build_histograms, select_function
from evdenoise.events import LabeledEvent, strip_labels
from evdenoise.synth import generate, pendulum_scene

geom = SensorGeometry(128, 128)
events = strip_labels(generate(pendulum_scene(geom, 5_000_000, 35_000, 35_000, cluster_radius=3, seed=2)))
labels = verdicts(Bs1Filter(geom, 1000), events)
labeled = [LabeledEvent(e, lab) for e, lab in zip(events, labels)]

hists = build_histograms(labeled, geom, window=2)
verdict = select_function(hists)
print(verdict.report())

buf = io.StringIO()
hists[verdict.selected].to_csv(buf)
print("\nfirst rows of the selected histogram:")
print("\n".join(buf.getvalue().splitlines()[:5]))
