"""Desk-scale comparison of APSO against plain PSO on the bundled phantoms."""

import statistics
from pathlib import Path

import pytest

from src.core.mopso import SwarmMode
from src.core.pipeline import FusionJob, preset_config, run_fusion
from src.io.images import load_image

SAMPLES = Path(__file__).resolve().parents[1] / "samples"


@pytest.mark.slow
def test_apso_beats_plain_pso_in_the_median():
    ct = load_image(SAMPLES / "ct_phantom.pgm")
    mr = load_image(SAMPLES / "mr_phantom.pgm")
    scores = {SwarmMode.APSO: [], SwarmMode.PLAIN_PSO: []}
    for seed in range(1, 11):
        for mode in scores:
            swarm = preset_config("desk").replace(seed=seed, mode=mode)
            report = run_fusion(FusionJob(ct, mr, swarm=swarm, workers=4)).report
            scores[mode].append((report.entropy, report.rmse))
    apso_en = statistics.median(e for e, _ in scores[SwarmMode.APSO])
    pso_en = statistics.median(e for e, _ in scores[SwarmMode.PLAIN_PSO])
    apso_rmse = statistics.median(r for _, r in scores[SwarmMode.APSO])
    pso_rmse = statistics.median(r for _, r in scores[SwarmMode.PLAIN_PSO])
    assert apso_en > pso_en
    assert apso_rmse < pso_rmse
