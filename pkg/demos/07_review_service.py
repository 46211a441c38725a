"""Stand up the human review loop on a synthetic workspace.

Builds fixtures, sorts them into a workspace, pre-labels by temperature, and
serves the review API (plus the browser UI if frontend/dist is built).
While running, try:

    curl http://127.0.0.1:8476/api/progress
    curl http://127.0.0.1:8476/api/pairs?status=needs_review
    curl -X POST http://127.0.0.1:8476/api/pairs/<id>/label -d '{"label":"fire"}' \
         -H 'content-type: application/json'
"""

import tempfile
from pathlib import Path

from emberkit.cli import main

root = Path(tempfile.mkdtemp(prefix="emberkit_demo_"))
assert main(["fixtures", "--out", str(root), "--image-pairs", "9"]) == 0
assert main(["sort", "--input", str(root / "raw"), "--workspace", str(root / "out")]) == 0
assert main(["label", "--workspace", str(root / "out")]) == 0

print(f"\nworkspace ready at {root / 'out'}; starting the review service...")
main(["serve", "--workspace", str(root / "out")])
