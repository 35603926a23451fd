"""Group consecutive narrations into chunks for question generation.

A chunk grows greedily left to right while it has fewer than five sentences
and the incoming narration starts within 30 s of the chunk's first one.
The chunk span is the hull of its members' estimated windows.
"""
from egoqa.chunking import chunk_track
from egoqa.core import Narration, NarrationTrack
from egoqa.windows import compute_stats

timestamps = [0.0, 8.0, 16.0, 24.0, 33.0, 40.0]
track = NarrationTrack(
    "workshop", 60.0,
    tuple(Narration(f"C performs step {i}.", t) for i, t in enumerate(timestamps)),
)
stats = compute_stats([track])

for chunk in chunk_track(track, stats):
    texts = " ".join(track.narrations[i].text for i in chunk.members)
    print(f"chunk {chunk.chunk_index}: members {chunk.members} "
          f"span [{chunk.span.start_s:.2f}, {chunk.span.end_s:.2f}]")
    print(f"  {texts}")

# the narration at t=33 cannot join: 33 - 0 > 30, so a new chunk opens there
