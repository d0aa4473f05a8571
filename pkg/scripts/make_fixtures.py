#!/usr/bin/env python3
"""Write the bundled synthetic curves (and a landmark file) as CSVs.

Usage: python scripts/make_fixtures.py [outdir]
"""

import sys
from pathlib import Path

from warpalign.fixtures import (
    bean_curve,
    closed_shape_pair,
    pqrst_landmarks,
    pqrst_pair,
    spiral_pair,
    two_bump_pair,
)
from warpalign.io import write_curve


def main() -> int:
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    outdir.mkdir(parents=True, exist_ok=True)

    pairs = {
        "two_bump": two_bump_pair(100),
        "pqrst": pqrst_pair(100),
        "spiral": spiral_pair(100),
        "closed_blob": closed_shape_pair(101),
    }
    for name, (c1, c2) in pairs.items():
        write_curve(c1, outdir / f"{name}_1.csv")
        write_curve(c2, outdir / f"{name}_2.csv")
    write_curve(bean_curve(101), outdir / "bean.csv")

    lm = pqrst_landmarks()
    lines = ["a,b"] + [f"{float(a)!r},{float(b)!r}" for a, b in lm.pairs]
    (outdir / "pqrst_landmarks.csv").write_text("\n".join(lines) + "\n")

    print(f"wrote fixtures to {outdir}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
