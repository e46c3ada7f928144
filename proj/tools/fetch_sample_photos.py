#!/usr/bin/env python3
"""Regenerate tests/data/photos from the scikit-image sample data set.

Large images are downscaled so the longer edge is at most 512 pixels.
"""
import argparse
import os

import numpy as np
from skimage import data, io, transform

SOURCES = {
    "astronaut": data.astronaut,
    "camera": data.camera,
    "chelsea": data.chelsea,
    "coffee": data.coffee,
    "coins": data.coins,
    "moon": data.moon,
    "rocket": data.rocket,
    "hubble": data.hubble_deep_field,
    "retina": data.retina,
    "ihc": data.immunohistochemistry,
    "clock": data.clock,
    "cell": data.cell,
    "microaneurysms": data.microaneurysms,
    "page": data.page,
    "text": data.text,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "data", "photos"))
    ap.add_argument("--max-edge", type=int, default=512)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for name, fn in SOURCES.items():
        im = fn()
        h, w = im.shape[:2]
        s = args.max_edge / max(h, w)
        if s < 1:
            im = transform.resize(im, (round(h * s), round(w * s)), anti_aliasing=True, preserve_range=True)
            im = np.clip(np.round(im), 0, 255).astype(np.uint8)
        io.imsave(os.path.join(args.out, name + ".png"), im, check_contrast=False)
        print(name, im.shape)


if __name__ == "__main__":
    main()
