#!/usr/bin/env python3
"""
subfn command-line script.

Usage:
    python subfn.py bernstein-eval --alpha 0.5 --lambda 4
    python subfn.py verify --suite fast
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from handlers.cli import main

if __name__ == '__main__':
    sys.exit(main())
