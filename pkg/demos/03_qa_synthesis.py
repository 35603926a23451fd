"""Generate a grounded QA pair plus distractors from one narration chunk.

The chat endpoint is mocked here: the fixture maps a sha256 digest of each
prompt to a scripted completion, so the run is fully deterministic. Swap in
HttpChatEndpoint (or the CLI's --base-url flag) for a live model.
"""
from egoqa.chunking import chunk_track
from egoqa.core import Narration, NarrationTrack
from egoqa.endpoint import EndpointConfig, MockChatEndpoint, prompt_digest
from egoqa.prompts import load_template, render_closeqa_prompt, render_openqa_prompt
from egoqa.synthesis import attach_distractors, generate_openqa, shuffled_choices
from egoqa.windows import compute_stats

track = NarrationTrack(
    "kitchen", 60.0,
    tuple(Narration(t, ts) for t, ts in [
        ("C opens the fridge.", 2.0),
        ("C takes out a lemon.", 6.0),
        ("C cuts the lemon on the board.", 10.0),
    ]),
)
stats = compute_stats([track, NarrationTrack(
    "other", 50.0, (Narration("C walks in.", 5.0), Narration("C sits down.", 15.0)),
)])
chunks = chunk_track(track, stats)
openqa_template = load_template("openqa_llama")
closeqa_template = load_template("closeqa_llama")

# script the two completions the pipeline will ask for
qa_completion = '{"Q": "What did I cut on the board?", "A": "a lemon"}'
openqa_prompt = render_openqa_prompt(chunks[0], track, openqa_template)
closeqa_prompt = render_closeqa_prompt("What did I cut on the board?", "a lemon", closeqa_template)
endpoint = MockChatEndpoint({
    prompt_digest(openqa_prompt): qa_completion,
    prompt_digest(closeqa_prompt): '["an onion", "a carrot", "an apple"]',
})
config = EndpointConfig(base_url="", model="mock")

samples, records = generate_openqa(chunks, {"kitchen": track}, config,
                                   openqa_template, endpoint, split="test")
samples, more_records = attach_distractors(samples, config, closeqa_template, endpoint)

for s in samples:
    print(f"clip {s.clip_uid}  window [{s.window.start_s:.2f}, {s.window.end_s:.2f}]")
    print(f"  Q: {s.question}")
    print(f"  A: {s.answer}")
    print(f"  wrong: {s.wrong_answers}")
    choices, correct_index = shuffled_choices(s, seed=7)
    print(f"  choices (seed 7): {choices}  correct at index {correct_index}")

print()
for r in records + more_records:
    print(f"record kind={r.kind} ref={r.ref} status={r.parse_status} attempts={r.attempts}")
