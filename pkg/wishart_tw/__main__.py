import sys

from wishart_tw.cli import main

sys.exit(main())
