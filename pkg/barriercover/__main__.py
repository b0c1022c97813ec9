import sys

from barriercover.cli import main

sys.exit(main())
