#!/usr/bin/env python3
"""Wall-clock comparison of the embedding methods on one synthetic dataset.

Fits every method on the same normalized training windows and reports train
and infer seconds plus the embedding width. The point of the exercise: the
projection methods amortize their one-off fit, while the per-window
graph/topology constructions pay for every window again at inference.
"""

import argparse
import time

from tsembed.bench import EmbeddingCfg, make_embedder
from tsembed.data_io import split_by_group
from tsembed.preprocess import apply_normalizer_all, fit_normalizer, segment_dataset
from tsembed.rng import derive_seed
from tsembed.synthgen import SynthSpec, generate

METHODS = [
    ("fft", {}),
    ("wavelet", {}),
    ("pca", {"d": 8}),
    ("lle", {"K": 12, "d": 8}),
    ("graph", {}),
    ("tda", {}),
    ("ae", {"d": 8, "epochs": 40}),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--tau", type=int, default=64)
    ap.add_argument("--n-per-class", type=int, default=100)
    args = ap.parse_args()

    ds = generate(SynthSpec(kind="tones", classes=3, tau=args.tau,
                            n_per_class=args.n_per_class, channels=1,
                            noise_sigma=0.2, seed=args.seed))
    train, _, test = split_by_group(ds, (0.6, 0.0, 0.4),
                                    derive_seed(args.seed, "split"))
    train_w = segment_dataset(train, args.tau, 0)
    test_w = segment_dataset(test, args.tau, 0)
    norm = fit_normalizer(train_w, "zscore")
    train_w = apply_normalizer_all(norm, train_w)
    test_w = apply_normalizer_all(norm, test_w)
    print(f"{len(train_w)} train windows, {len(test_w)} test windows, "
          f"tau={args.tau}\n")

    print(f"{'method':<8} {'train_s':>9} {'infer_s':>9} {'dim':>5}")
    for method, params in METHODS:
        embedder = make_embedder(EmbeddingCfg(method=method, name=method,
                                              params=dict(params)))
        t0 = time.perf_counter()
        embedder.fit(train_w, derive_seed(args.seed, method))
        embedder.transform(train_w)
        t1 = time.perf_counter()
        X = embedder.transform(test_w)
        t2 = time.perf_counter()
        print(f"{method:<8} {t1 - t0:>9.4f} {t2 - t1:>9.4f} {X.shape[1]:>5}")


if __name__ == "__main__":
    main()
