import sys

from femtorelay.cli import main

sys.exit(main())
