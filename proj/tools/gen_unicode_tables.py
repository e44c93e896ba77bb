#!/usr/bin/env python3
# Copyright (c) 2026 langpaint contributors
# SPDX-License-Identifier: Apache-2.0
#
# Generates src/unicode_nfc_data.inc from Python's unicodedata module.
# The tables drive the canonical (NFC) normalizer in src/unicode.cpp:
#   - full canonical decompositions (Hangul excluded, handled algorithmically)
#   - canonical combining classes
#   - primary composite pairs (composition exclusions filtered out)
#
# Rerun only when bumping the Unicode version; the output is committed.

import sys
import unicodedata

HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def codepoints():
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue
        yield cp


def main(out_path):
    decomp = {}   # cp -> full canonical decomposition (list of cp)
    ccc = {}      # cp -> nonzero combining class
    pairs = {}    # (first, second) -> composite

    for cp in codepoints():
        ch = chr(cp)
        k = unicodedata.combining(ch)
        if k:
            ccc[cp] = k
        nfd = unicodedata.normalize("NFD", ch)
        if nfd != ch:
            decomp[cp] = [ord(c) for c in nfd]
        raw = unicodedata.decomposition(ch)
        if raw and not raw.startswith("<"):
            parts = [int(p, 16) for p in raw.split()]
            if len(parts) == 2:
                # Primary composite iff NFC round-trips back to the composite.
                if unicodedata.normalize("NFC", nfd) == ch:
                    pairs[(parts[0], parts[1])] = cp

    lines = []
    lines.append("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit."
                 % unicodedata.unidata_version)
    lines.append("")

    seq_pool = []
    entries = []
    for cp in sorted(decomp):
        seq = decomp[cp]
        entries.append((cp, len(seq_pool), len(seq)))
        seq_pool.extend(seq)

    lines.append("static const uint32_t kDecompPool[] = {")
    for i in range(0, len(seq_pool), 12):
        lines.append("  " + ", ".join("0x%X" % v for v in seq_pool[i:i + 12]) + ",")
    lines.append("};")
    lines.append("")
    lines.append("struct DecompEntry { uint32_t cp; uint32_t offset; uint32_t len; };")
    lines.append("static const DecompEntry kDecomp[] = {")
    for cp, off, n in entries:
        lines.append("  {0x%X, %d, %d}," % (cp, off, n))
    lines.append("};")
    lines.append("")

    lines.append("struct CccEntry { uint32_t cp; uint8_t ccc; };")
    lines.append("static const CccEntry kCcc[] = {")
    for cp in sorted(ccc):
        lines.append("  {0x%X, %d}," % (cp, ccc[cp]))
    lines.append("};")
    lines.append("")

    lines.append("struct PairEntry { uint64_t key; uint32_t composite; };")
    lines.append("static const PairEntry kPairs[] = {")
    for (a, b) in sorted(pairs):
        lines.append("  {0x%XULL, 0x%X}," % ((a << 32) | b, pairs[(a, b)]))
    lines.append("};")
    lines.append("")

    with open(out_path, "w") as f:
        f.write("\n".join(lines))
    print("wrote %s: %d decompositions, %d ccc entries, %d pairs"
          % (out_path, len(entries), len(ccc), len(pairs)))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_nfc_data.inc")
