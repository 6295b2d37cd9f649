#!/usr/bin/env python3
# Copyright 2026 The polk Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Write the digits 0 and 8 of a 5000-sample MNIST subset as sparse text.

Input is either mnist_5k.csv.gz (784 pixel columns then the digit) or a
wheel of mlxtend, which bundles that file. Pixels are scaled to [0, 1];
digit 0 becomes label 0 and digit 8 becomes label 1.
"""

import argparse
import gzip
import io
import zipfile

import numpy as np

BUNDLED = "mlxtend/data/data/mnist_5k.csv.gz"


def read_table(path):
    if path.endswith(".whl") or path.endswith(".zip"):
        with zipfile.ZipFile(path) as zf:
            raw = zf.read(BUNDLED)
    else:
        with open(path, "rb") as fh:
            raw = fh.read()
    text = gzip.decompress(raw).decode("ascii")
    return np.loadtxt(io.StringIO(text), delimiter=",")


def write_sparse(path, x, y):
    with open(path, "w", newline="\n") as out:
        for row, label in zip(x, y):
            items = [f"{i + 1}:{v:.6g}" for i, v in enumerate(row) if v != 0.0]
            out.write(" ".join([str(int(label))] + items) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("source", help="mnist_5k.csv.gz or an mlxtend wheel")
    ap.add_argument("--train-out", required=True)
    ap.add_argument("--test-out", required=True)
    ap.add_argument("--n-test", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    table = read_table(args.source)
    x, digit = table[:, :-1] / 255.0, table[:, -1].astype(int)
    keep = (digit == 0) | (digit == 8)
    x, y = x[keep], (digit[keep] == 8).astype(int)
    order = np.random.default_rng(args.seed).permutation(len(y))
    x, y = x[order], y[order]
    n_test = args.n_test
    write_sparse(args.train_out, x[n_test:], y[n_test:])
    write_sparse(args.test_out, x[:n_test], y[:n_test])
    print(f"train={len(y) - n_test} test={n_test} dim={x.shape[1]}")


if __name__ == "__main__":
    main()
