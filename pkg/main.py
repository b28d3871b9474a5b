import sys

from dressed_cavity.cli import main

if __name__ == "__main__":
    sys.exit(main())
