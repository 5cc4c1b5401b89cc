import sys

from toricimplicit.cli import main

sys.exit(main())
