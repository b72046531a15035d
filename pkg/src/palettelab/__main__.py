import sys

from palettelab.harness.cli import main

sys.exit(main())
