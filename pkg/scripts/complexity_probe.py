#!/usr/bin/env python3
"""Empirical complexity probe for the two heavy pipeline phases.

The preprocessing (sessionize) phase should scale linearly with the
transaction count; the meeting phase should scale quadratically with the
session count once the similarity matrix is precomputed.  Prints the
measured times and doubling ratios.
"""

from __future__ import annotations

import argparse
import sys
import time

from antsess.antclust import AntClustConfig, run
from antsess.logs import build_catalog, filter_page_requests, parse_log
from antsess.sessions import sessionize
from antsess.similarity import MeasureKind, SimilarityMeasure, similarity_matrix
from antsess.synth import default_model, generate, transactions_for_sessions


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    jaccard = SimilarityMeasure(kind=MeasureKind.JACCARD)
    print("meeting phase (similarity matrix precomputed):")
    previous = None
    for n in (250, 500, 1000):
        target = transactions_for_sessions(n)
        model = default_model(seed=args.seed)
        text, _ = generate(model, target)
        records = filter_page_requests(parse_log(text.splitlines()).records)
        sessions = sessionize(records, build_catalog(records), model.session_timeout)
        matrix = similarity_matrix(sessions, jaccard)
        clustering = run(sessions, jaccard, AntClustConfig(rng_seed=args.seed), sims=matrix)
        seconds = clustering.phase_seconds["simulate"]
        ratio = "" if previous is None else f"  (x{seconds / previous:.2f} per doubling)"
        print(f"  N={len(sessions):5d}  {seconds * 1000:9.1f} ms{ratio}")
        previous = seconds

    print("sessionize phase:")
    previous = None
    for target in (10000, 20000, 40000):
        model = default_model(seed=args.seed)
        text, _ = generate(model, target)
        records = filter_page_requests(parse_log(text.splitlines()).records)
        catalog = build_catalog(records)
        started = time.perf_counter()
        sessionize(records, catalog, model.session_timeout)
        seconds = time.perf_counter() - started
        ratio = "" if previous is None else f"  (x{seconds / previous:.2f} per doubling)"
        print(f"  n={target:6d}  {seconds * 1000:9.1f} ms{ratio}")
        previous = seconds
    return 0


if __name__ == "__main__":
    sys.exit(main())
