#!/usr/bin/env python3
"""Reference ink-pixel counts for the fixture signature scans (scikit-image Otsu)."""
import json
import sys
from pathlib import Path

import numpy as np
from skimage import io
from skimage.color import rgb2gray, rgba2rgb
from skimage.filters import threshold_otsu


def ink_pixels(path):
    img = io.imread(path)
    if img.ndim == 3 and img.shape[2] == 4:
        img = rgba2rgb(img, background=(1, 1, 1))
    gray = rgb2gray(img) if img.ndim == 3 else img / 255.0
    t = threshold_otsu(gray)
    return int(np.count_nonzero(gray <= t)), float(t)


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[2] / "fixtures"
    refs = {}
    for f in sorted((root / "signatures").glob("*.png")):
        count, t = ink_pixels(f)
        refs[f.name] = {"ink_pixels": count, "otsu_threshold": round(t, 6)}
        print(f.name, count)
    (root / "golden").mkdir(exist_ok=True)
    (root / "golden" / "signatures.json").write_text(json.dumps(refs, indent=2) + "\n")


if __name__ == "__main__":
    main()
