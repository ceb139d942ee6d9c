"""Update time and model file size as rows and chain count grow."""

import argparse
import time

import numpy as np

from oric.dataio import record_size, save_model
from oric.estimator import OricConfig, new_model, select, update
from oric.patterns import LabeledBatch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, nargs="+", default=[20000, 100000, 200000])
    ap.add_argument("--chains", type=int, nargs="+", default=[2500, 10000])
    ap.add_argument("--features", type=int, default=23)
    ap.add_argument("--categories", type=int, default=10)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print("rows\tchains\tupdate_s\tselect_s\tregistry\tfile_bytes\tnominal_bytes")
    for n in args.rows:
        codes = rng.integers(0, args.categories, size=(n, args.features))
        labels = (rng.random(n) < 0.5).astype(np.int8)
        batch = LabeledBatch(tuple(f"c{j}" for j in range(args.features)), codes, labels)
        for m in args.chains:
            model = new_model(OricConfig(num_chains=m), batch.schema)
            t0 = time.perf_counter()
            update(model, batch)
            t1 = time.perf_counter()
            select(model)
            t2 = time.perf_counter()
            nominal = sum(record_size(s) for s in model.registry)
            print(f"{n}\t{m}\t{t1 - t0:.2f}\t{t2 - t1:.3f}\t{len(model.registry)}\t{len(save_model(model))}\t{nominal}")


if __name__ == "__main__":
    main()
