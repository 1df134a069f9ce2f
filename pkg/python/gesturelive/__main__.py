"""Allow running the command-line interface with `python -m gesturelive`."""

import sys

from gesturelive.entrypoint import main

sys.exit(main())
