"""State size and per-event arithmetic of SeqX versus a per-pixel filter."""

import random

from evdenoise import Bs1Filter, SensorGeometry, SeqXConfig, SeqXFilter, op_count
from evdenoise.events import Event
from evdenoise.seqx import OpCounter, PastEventWindow, instrumented_check

for w, h in [(128, 128), (346, 260), (640, 480), (768, 640)]:
    g = SensorGeometry(w, h)
    seqx_bits = SeqXFilter(g, SeqXConfig(2, 0.05)).state_size_bits
    bs1_bits = Bs1Filter(g).state_cells * 32  # one 32-bit timestamp per pixel
    print(f"{w:>4}x{h:<4} seqx {seqx_bits:>4} bits   bs1 {bs1_bits:>10} bits")

g = SensorGeometry(128, 128)
cfg = SeqXConfig(2, 0.05)
win = PastEventWindow(2)
rng = random.Random(0)
for i in range(2):
    win.write(rng.randrange(128), rng.randrange(128))
ops = OpCounter()
instrumented_check(win, cfg, Event(10, 5, 5), g, ops)
print("counted per event:", ops.snapshot())
print("closed form:      ", op_count(cfg))
