#!/usr/bin/env python3
"""Convert hanzi-writer-data character files into the stroke database format.

Each input file <char>.json holds "medians": one polyline per stroke in a 1024-unit
square with the y axis pointing up (baseline offset 900). Output records are
{"character": c, "strokes": [[[x, y], ...], ...]} with y pointing down.
"""

import argparse
import json
import sys
from pathlib import Path

EM = 1024
Y_FLIP = 900


def convert(medians):
    strokes = []
    for median in medians:
        points = []
        for x, y in median:
            p = [min(max(float(x), 0.0), EM), min(max(float(Y_FLIP - y), 0.0), EM)]
            if not points or points[-1] != p:
                points.append(p)
        if len(points) >= 2:
            strokes.append(points)
    return strokes


def gb2312_level1():
    chars = []
    for hi in range(0xB0, 0xD8):
        for lo in range(0xA1, 0xFF):
            try:
                chars.append(bytes([hi, lo]).decode("gb2312"))
            except UnicodeDecodeError:
                pass
    return chars


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--src", required=True, type=Path, help="directory of <char>.json files")
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--chars", type=Path, help="text file whose characters are converted")
    ap.add_argument("--gb2312-level1", action="store_true", help="also convert the 3755 level-1 GB2312 characters")
    args = ap.parse_args()

    wanted = set()
    if args.chars:
        wanted.update(c for c in args.chars.read_text(encoding="utf-8") if not c.isspace())
    if args.gb2312_level1:
        wanted.update(gb2312_level1())
    if not wanted:
        ap.error("nothing to convert: give --chars and/or --gb2312-level1")

    missing = []
    with args.out.open("w", encoding="utf-8") as out:
        for c in sorted(wanted):
            path = args.src / f"{c}.json"
            if not path.exists():
                missing.append(c)
                continue
            strokes = convert(json.loads(path.read_text(encoding="utf-8"))["medians"])
            if not strokes:
                missing.append(c)
                continue
            out.write(json.dumps({"character": c, "strokes": strokes}, ensure_ascii=False, separators=(",", ":")) + "\n")
    if missing:
        print(f"no stroke data for {len(missing)} characters: {''.join(missing)}", file=sys.stderr)


if __name__ == "__main__":
    main()
