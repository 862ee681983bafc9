import sys

from slocc.cli import main

sys.exit(main())
