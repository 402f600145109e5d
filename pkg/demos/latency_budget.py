"""Where the cycles go: per-stage latency of both chains from an impulse."""
from ducddc.pipeline import assert_latency, ddc_run, duc_run

_, duc = duc_run([4000] + [0] * 15)
_, ddc = ddc_run([4000] + [0] * 319)
print(assert_latency(duc).format())
print()
print(assert_latency(ddc).format())
print()
for trace in (duc, ddc):
    print(trace.chain, [(s.name, s.first_valid_cycle) for s in trace.stages])
