"""Turn narration timestamps into temporal windows.

Each narration marks an instant; the window around it scales with how
densely that clip is narrated relative to the whole corpus: half-width
beta_i / (2 alpha), where beta_i is the clip's mean gap between consecutive
narrations and alpha is the corpus mean of the beta_i.
"""
from egoqa.core import Narration, NarrationTrack
from egoqa.windows import compute_stats, narration_window

fast = NarrationTrack(
    "kitchen", 60.0,
    tuple(Narration(t, ts) for t, ts in [
        ("C opens the fridge.", 2.0),
        ("C takes out the milk.", 5.0),
        ("C pours milk in a glass.", 8.0),
        ("C puts the milk back.", 11.0),
    ]),
)
slow = NarrationTrack(
    "garage", 120.0,
    tuple(Narration(t, ts) for t, ts in [
        ("C sands the table top.", 10.0),
        ("C wipes off the dust.", 40.0),
        ("C applies the varnish.", 70.0),
    ]),
)
sparse = NarrationTrack(
    "garden", 30.0,
    (Narration("C waters the roses.", 15.0),),
)

stats = compute_stats([fast, slow, sparse])
print(f"alpha (corpus mean interval): {stats.alpha_s:.3f} s")
for uid, beta in sorted(stats.beta_by_clip.items()):
    tag = " (fallback)" if uid in stats.fallback_clips else ""
    print(f"  beta[{uid}] = {beta:.3f} s{tag}")

print()
for track in (fast, slow, sparse):
    for n in track.narrations:
        w = narration_window(n.t_s, track.clip_uid, stats, track.duration_s)
        print(f"{track.clip_uid:8s} t={n.t_s:6.1f}  ->  "
              f"[{w.start_s:7.3f}, {w.end_s:7.3f}]  {n.text}")

# densely narrated clips get sub-second windows, sparse ones wide windows;
# the single-narration clip borrows beta = alpha and gets exactly 1 s
