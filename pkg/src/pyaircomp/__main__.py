import sys

from pyaircomp.cli import main

sys.exit(main())
