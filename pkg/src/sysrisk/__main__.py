from sysrisk.cli import main

raise SystemExit(main())
