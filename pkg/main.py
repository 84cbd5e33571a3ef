"""
sfcov entry point: `python main.py graph|coverage|prioritize|serve ...`.
"""
import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
