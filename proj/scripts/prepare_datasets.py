#!/usr/bin/env python3
"""Regenerate the CSV files under data/ from their public CRAN sources.

The three benchmark datasets ship with well-known CRAN packages as .rda
(RData) files:

  musk1.csv  <- kernlab  (data/musk.rda,  476 x 166 features + Class)
  pima.csv   <- mlbench  (data/PimaIndiansDiabetes.rda, 768 x 8 + diabetes)
  crabs.csv  <- MASS     (data/crabs.rda, 200 rows; we keep the five
                          morphometric columns FL,RW,CL,CW,BD plus sp)

Usage:
    python3 scripts/prepare_datasets.py [--out data/]

Downloads the package tarballs from CRAN, extracts the .rda files and
converts them with a small stdlib-only RData reader (XDR format v2/v3,
data.frame subset). No R installation required.
"""
import argparse
import bz2
import gzip
import io
import lzma
import os
import struct
import sys
import tarfile
import urllib.request

CRAN = "https://cran.r-project.org/src/contrib"
SOURCES = [
    # (package, known-good versions newest first, rda member, object name)
    ("kernlab", ["0.9-33", "0.9-32"], "data/musk.rda", "musk"),
    ("mlbench", ["2.1-8", "2.1-6"], "data/PimaIndiansDiabetes.rda", "PimaIndiansDiabetes"),
    ("MASS", ["7.3-65", "7.3-61", "7.3-60"], "data/crabs.rda", "crabs"),
]

NILVALUE, REF, SYMSXP, LISTSXP, CHARSXP = 254, 255, 1, 2, 9
LGLSXP, INTSXP, REALSXP, CPLXSXP, STRSXP, VECSXP, EXPRSXP, RAWSXP = 10, 13, 14, 15, 16, 19, 20, 24
NA_INT = -0x80000000


class RdaReader:
    def __init__(self, data):
        self.buf, self.pos, self.refs = data, 0, []

    def u4(self):
        v = struct.unpack_from(">i", self.buf, self.pos)[0]
        self.pos += 4
        return v

    def f8(self):
        raw = self.buf[self.pos:self.pos + 8]
        self.pos += 8
        if raw == b"\x7f\xf0\x00\x00\x00\x00\x07\xa2":
            return None
        return struct.unpack(">d", raw)[0]

    def raw(self, n):
        b = self.buf[self.pos:self.pos + n]
        self.pos += n
        return b

    def length(self):
        n = self.u4()
        if n == -1:
            hi, lo = self.u4(), self.u4()
            n = (hi << 32) | (lo & 0xFFFFFFFF)
        return n

    def charsxp(self):
        flags = self.u4()
        assert flags & 0xFF == CHARSXP
        n = self.u4()
        return None if n == -1 else self.raw(n).decode("utf-8", "replace")

    def item(self):
        flags = self.u4()
        t = flags & 0xFF
        if t == REF:
            idx = flags >> 8 or self.u4()
            return self.refs[idx - 1]
        if t == NILVALUE:
            return None
        has_attr = bool(flags & (1 << 9))
        has_tag = bool(flags & (1 << 10))
        if t == SYMSXP:
            sym = ("sym", self.charsxp())
            self.refs.append(sym)
            return sym
        if t == LISTSXP:
            pairs = []
            while True:
                attr = self.item() if has_attr else None
                tag = self.item() if has_tag else None
                pairs.append((tag[1] if tag else None, self.item(), attr))
                flags = self.u4()
                t2 = flags & 0xFF
                if t2 == NILVALUE:
                    break
                assert t2 == LISTSXP
                has_attr = bool(flags & (1 << 9))
                has_tag = bool(flags & (1 << 10))
            return ("pairlist", pairs)
        if t == CHARSXP:
            n = self.u4()
            return None if n == -1 else self.raw(n).decode("utf-8", "replace")
        if t in (LGLSXP, INTSXP):
            vals = [self.u4() for _ in range(self.length())]
            vals = [None if v == NA_INT else v for v in vals]
        elif t == REALSXP:
            vals = [self.f8() for _ in range(self.length())]
        elif t == CPLXSXP:
            vals = [(self.f8(), self.f8()) for _ in range(self.length())]
        elif t == STRSXP:
            vals = [self.charsxp() for _ in range(self.length())]
        elif t in (VECSXP, EXPRSXP):
            vals = [self.item() for _ in range(self.length())]
        elif t == RAWSXP:
            vals = self.raw(self.length())
        else:
            raise ValueError(f"unhandled SEXP type {t}")
        attrs = {}
        if has_attr:
            al = self.item()
            if al and al[0] == "pairlist":
                attrs = {tag: car for tag, car, _ in al[1]}
        return ("vec", t, vals, attrs)


def parse_rda(raw):
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    elif raw[:6] == b"\xfd7zXZ\x00":
        raw = lzma.decompress(raw)
    elif raw[:3] == b"BZh":
        raw = bz2.decompress(raw)
    assert raw[:4] in (b"RDX2", b"RDX3"), "not an XDR RData file"
    r = RdaReader(raw)
    r.pos = 5
    assert r.raw(2) == b"X\n"
    version = r.u4()
    r.u4(), r.u4()
    if version >= 3:
        r.raw(r.u4())
    top = r.item()
    return {tag: car for tag, car, _ in top[1]}


def data_frame(obj):
    assert obj[0] == "vec" and obj[1] == VECSXP
    names = obj[3]["names"][2]
    cols = []
    for col in obj[2]:
        _, _, vals, cattrs = col
        if "levels" in (cattrs or {}):
            levels = cattrs["levels"][2]
            vals = [None if v is None else levels[v - 1] for v in vals]
        cols.append(vals)
    return names, cols


def fetch(pkg, versions):
    last = None
    for v in versions:
        url = f"{CRAN}/{pkg}_{v}.tar.gz"
        try:
            with urllib.request.urlopen(url, timeout=120) as resp:
                return resp.read()
        except Exception as e:  # try the archive for superseded versions
            last = e
            url = f"{CRAN}/Archive/{pkg}/{pkg}_{v}.tar.gz"
            try:
                with urllib.request.urlopen(url, timeout=120) as resp:
                    return resp.read()
            except Exception as e2:
                last = e2
    raise RuntimeError(f"could not download {pkg}: {last}")


def write_csv(path, names, cols):
    with open(path, "w", newline="") as f:
        f.write(",".join(names) + "\n")
        for i in range(len(cols[0])):
            out = []
            for c in cols:
                v = c[i]
                if v is None:
                    out.append("?")
                elif isinstance(v, float):
                    out.append(f"{v:.10g}")
                else:
                    out.append(str(v))
            f.write(",".join(out) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    for pkg, versions, member, objname in SOURCES:
        sys.stderr.write(f"fetching {pkg}...\n")
        tgz = fetch(pkg, versions)
        with tarfile.open(fileobj=io.BytesIO(tgz), mode="r:gz") as tf:
            raw = tf.extractfile(f"{pkg}/{member}").read()
        names, cols = data_frame(parse_rda(raw)[objname])
        if objname == "musk":
            write_csv(os.path.join(args.out, "musk1.csv"), names, cols)
        elif objname == "PimaIndiansDiabetes":
            write_csv(os.path.join(args.out, "pima.csv"), names, cols)
        else:  # crabs: keep the five morphometrics and the species label
            keep = ["FL", "RW", "CL", "CW", "BD", "sp"]
            idx = [names.index(k) for k in keep]
            write_csv(os.path.join(args.out, "crabs.csv"),
                      [names[i] for i in idx], [cols[i] for i in idx])
    sys.stderr.write("done.\n")


if __name__ == "__main__":
    main()
