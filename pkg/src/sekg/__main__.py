import sys

from sekg.cli import main

if __name__ == "__main__":
    sys.exit(main())
