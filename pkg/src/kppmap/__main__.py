from kppmap.cli import main

raise SystemExit(main())
