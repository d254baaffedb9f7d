import sys

from princetour.cli import main

sys.exit(main())
