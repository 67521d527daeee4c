#!/usr/bin/env python3
"""Materialize MovieLens-100K in its native layout (u.data, u.item).

The GroupLens download host is often unreachable from build sandboxes, so this
script pulls the copy bundled inside the RecBole wheel on PyPI and rewrites it
into the original file formats:

  u.data  user \t item \t rating \t timestamp   (same row order as the original)
  u.item  id|title|release date|video release date|IMDb URL|19 genre flags

RecBole strips the year suffix from titles, keeps only the release year and
drops the IMDb URL, so u.item is a faithful reconstruction of ids and genres
but not of every text column. u.data is byte-equivalent in content.

Usage: fetch_ml100k.py <output-dir>
"""
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]
WHEEL_MEMBER = "recbole/dataset_example/ml-100k/ml-100k.{}"


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 1
    out = pathlib.Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    if (out / "u.data").exists() and (out / "u.item").exists():
        print(f"{out} already populated")
        return 0

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet",
             "recbole==1.2.1", "-d", tmp],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as z:
            inter = z.read(WHEEL_MEMBER.format("inter")).decode("latin-1")
            items = z.read(WHEEL_MEMBER.format("item")).decode("latin-1")

    rows = inter.splitlines()[1:]
    with open(out / "u.data", "w", encoding="latin-1", newline="\n") as f:
        for row in rows:
            user, item, rating, ts = row.split("\t")
            f.write(f"{user}\t{item}\t{int(float(rating))}\t{int(float(ts))}\n")

    with open(out / "u.item", "w", encoding="latin-1", newline="\n") as f:
        for row in items.splitlines()[1:]:
            item, title, year, classes = (row.split("\t") + [""] * 4)[:4]
            names = set(classes.split()) if classes else set()
            # RecBole tokenizes "Children's" and "Film-Noir" unchanged, "Sci-Fi" too.
            flags = ["1" if g in names else "0" for g in GENRES]
            if not any(flags[1:]):
                flags[0] = "1"
            release = f"01-Jan-{year}" if year else ""
            f.write("|".join([item, title, release, "", ""] + flags) + "\n")

    print(f"wrote {len(rows)} ratings to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
