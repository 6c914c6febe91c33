from __future__ import annotations
import subprocess
import sys


def main():
    cmd = [sys.executable, "-m", "grunskykit", *sys.argv[1:]]
    raise SystemExit(subprocess.call(cmd))


if __name__ == "__main__":
    main()
