"""Local gaps over a 2D document embedding.

Documents come pre-embedded as 2D points (embedding computation is out of
scope). For each point, the marker fraction among its k nearest target-year
neighbors is compared with the same fraction among its k nearest
reference-year neighbors; hotspots of intervention adoption show up as
regions of high local Delta.

Run: python demos/05_local_delta.py
"""

import numpy as np

from excessvocab import EmbeddedPoint, local_delta


def make_points(seed=42, n_per_cluster=600):
    rng = np.random.default_rng(seed)
    points = []
    clusters = [
        # (center, adoption rate among 2024 docs)
        ((0.0, 0.0), 0.55),    # heavy-adoption topic
        ((8.0, 1.0), 0.10),
        ((3.0, 7.0), 0.0),
    ]
    idx = 0
    for (cx, cy), adoption in clusters:
        for year in (2022, 2024):
            for _ in range(n_per_cluster):
                marked = year == 2024 and rng.random() < adoption
                points.append(EmbeddedPoint(
                    id=f"p{idx}", year=year,
                    x=float(cx + rng.normal(0, 0.8)),
                    y=float(cy + rng.normal(0, 0.8)),
                    in_rare=marked, in_common=marked))
                idx += 1
    return points, clusters


def main():
    points, clusters = make_points()
    result = local_delta(points, reference_year=2022, target_year=2024, k=100)
    print(f"{len(result.rows)} points scored, {len(result.errors)} errors")

    xy = np.array([[r.x, r.y] for r in result.rows])
    deltas = np.array([r.delta for r in result.rows])
    for (cx, cy), adoption in clusters:
        near = np.hypot(xy[:, 0] - cx, xy[:, 1] - cy) < 1.5
        print(f"cluster at ({cx:4.1f}, {cy:4.1f}): true adoption {adoption:4.2f}, "
              f"mean local delta {deltas[near].mean():6.3f} over {near.sum()} points")
    print("\nlocal delta recovers the per-cluster adoption rates from geometry alone.")


if __name__ == "__main__":
    main()
