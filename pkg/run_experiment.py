#!/usr/bin/env python3

import sys

from ade_sieve.cli import run

def main():
    # Same commands as the ade-sieve console script
    sys.exit(run(sys.argv[1:]))

if __name__ == "__main__":
    main()
