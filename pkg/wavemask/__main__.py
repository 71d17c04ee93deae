import sys

from wavemask.cli import main

sys.exit(main())
