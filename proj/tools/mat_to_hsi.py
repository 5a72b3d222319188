#!/usr/bin/env python3
"""Convert a .mat hyperspectral scene and its ground truth to HSIC/HSIG files.

    mat_to_hsi.py Indian_pines_corrected.mat Indian_pines_gt.mat data/indian_pines
writes data/indian_pines.hsic and data/indian_pines.hsig.
"""
import argparse
import struct

import numpy as np
import scipy.io


def only_array(path, key):
    mat = scipy.io.loadmat(path)
    if key:
        return mat[key]
    arrays = [v for k, v in mat.items() if not k.startswith("__") and isinstance(v, np.ndarray)]
    if len(arrays) != 1:
        raise SystemExit(f"{path}: expected one array, found {len(arrays)}; pass --cube-key/--labels-key")
    return arrays[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("cube_mat")
    ap.add_argument("labels_mat")
    ap.add_argument("prefix")
    ap.add_argument("--cube-key")
    ap.add_argument("--labels-key")
    args = ap.parse_args()

    cube = np.asarray(only_array(args.cube_mat, args.cube_key), dtype="<f4")
    labels = np.asarray(only_array(args.labels_mat, args.labels_key), dtype="<u2")
    if cube.ndim != 3 or labels.shape != cube.shape[:2]:
        raise SystemExit(f"shape mismatch: cube {cube.shape}, labels {labels.shape}")
    rows, cols, bands = cube.shape
    with open(args.prefix + ".hsic", "wb") as f:
        f.write(b"HSIC" + struct.pack("<IIII", 1, rows, cols, bands))
        f.write(np.ascontiguousarray(cube).tobytes())
    with open(args.prefix + ".hsig", "wb") as f:
        f.write(b"HSIG" + struct.pack("<III", 1, rows, cols))
        f.write(np.ascontiguousarray(labels).tobytes())
    print(f"{rows} x {cols} x {bands}, {int(labels.max())} classes, {int((labels > 0).sum())} labeled pixels")


if __name__ == "__main__":
    main()
