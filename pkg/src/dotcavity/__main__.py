import sys

from dotcavity.cli import main

sys.exit(main())
