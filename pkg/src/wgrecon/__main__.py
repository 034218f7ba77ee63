import sys

from wgrecon.cli import main

sys.exit(main())
