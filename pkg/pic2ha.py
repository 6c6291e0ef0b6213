#!/usr/bin/env python

import sys

# Allows running from the project root while keeping the package layout.
from pic2ha.cli.cli import main

if __name__ == "__main__":
    sys.exit(main())
