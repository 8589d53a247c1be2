"""Stub compiler for desk-scale campaign testing.

Behaves like a C compiler on the command line: accepts arbitrary flags
and sources, writes an executable to the -o path, and echoes the flag
set to stdout (standing in for a vectorization report). The produced
"binary" is a shell script printing a fixed marker, so manifest output
validators can run anywhere.
"""

from __future__ import annotations

import os
import stat
import sys

MARKER = "fake-app-ok"


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    out = None
    for i, arg in enumerate(args):
        if arg == "-o" and i + 1 < len(args):
            out = args[i + 1]
        elif arg.startswith("-o") and len(arg) > 2:
            out = arg[2:]
    if out is None:
        print("fakecc: no -o output given", file=sys.stderr)
        return 1
    print("fakecc flags: " + " ".join(args))
    with open(out, "w") as fh:
        fh.write(f"#!/bin/sh\necho {MARKER}\n")
    os.chmod(out, os.stat(out).st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    return 0


if __name__ == "__main__":
    sys.exit(main())
