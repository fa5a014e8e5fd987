import sys

from repi.cli import main

sys.exit(main())
