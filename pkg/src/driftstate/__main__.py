import sys

from driftstate.cli import main

sys.exit(main())
