"""Training-side loss kernels with analytic gradients.

Focal loss scores per-timestep relevance, DIoU penalizes both overlap and
center distance of the predicted window, token cross-entropy covers the
answer decoder, and the total weights grounding and answering equally.
Analytic gradients are spot-checked against a central finite difference.
"""
import numpy as np

from egoqa.core import TemporalWindow
from egoqa.localization import (
    assign_labels,
    combine_losses,
    diou_loss_1d,
    focal_loss,
    token_cross_entropy,
)

labels = assign_labels(n_steps=8, gt=TemporalWindow(12.0, 30.0), duration_s=80.0)
print(f"positive timesteps: {labels.positives}")

scores = np.array([0.1, 0.7, 0.8, 0.15, 0.1, 0.05, 0.1, 0.2])
focal, focal_grad = focal_loss(scores, labels.positives)
print(f"focal loss: {focal:.6f}")

pred = TemporalWindow(10.0, 26.0)
gt = TemporalWindow(12.0, 30.0)
diou, diou_grad = diou_loss_1d(pred, gt)
print(f"diou loss:  {diou:.6f}  grad d(start), d(end) = {diou_grad}")

step = 1e-6
fd = (diou_loss_1d(TemporalWindow(10.0 + step, 26.0), gt)[0]
      - diou_loss_1d(TemporalWindow(10.0 - step, 26.0), gt)[0]) / (2 * step)
print(f"  finite-difference d(start): {fd:.6f} (analytic {diou_grad[0]:.6f})")

dists = [[0.80, 0.15, 0.05], [0.10, 0.85, 0.05]]
qa, _ = token_cross_entropy(dists, target_ids=[0, 1])
print(f"token cross-entropy: {qa:.6f}")

breakdown = combine_losses(focal, diou, qa)
print(f"total = 0.5*(focal + diou) + 0.5*qa = {breakdown.total:.6f}")
