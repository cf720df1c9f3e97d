import sys

from polarfade.cli import main

sys.exit(main())
