#!/usr/bin/env python3
"""Thin launcher for the extraction CLI.

Usage: extract.py --checkpoint <id> --variants <f> --side encoder|decoder
       --out <dir>
"""

from extractor.cli import main

if __name__ == "__main__":
    main()
