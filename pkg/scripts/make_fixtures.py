#!/usr/bin/env python3
"""Write the chart corpus to a directory of SVG files."""

import argparse
from pathlib import Path

from legendgen.fixtures import area_chart, fixture_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="fixtures")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in fixture_corpus():
        (out / f"{name}.svg").write_text(text, encoding="utf-8")
    for seed in range(2):
        (out / f"area-{seed}.svg").write_text(area_chart(seed), encoding="utf-8")
    print(f"wrote {len(list(out.glob('*.svg')))} charts to {out}/")


if __name__ == "__main__":
    main()
