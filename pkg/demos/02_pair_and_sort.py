"""Discover raw media and pair RGB with thermal captures by timestamp.

Generates the synthetic fixture collection, scans it, pairs the assets, and
prints the pairing manifest the sorter would write.
"""

import tempfile
from pathlib import Path

from emberkit.fixtures import generate_fixture_tree
from emberkit.pairing import pair_assets, pairs_csv_text, scan_directory

root = Path(tempfile.mkdtemp(prefix="emberkit_demo_"))
counts = generate_fixture_tree(root, image_pairs=6, video_pairs=1, nadir_frames=4)
print(f"fixtures: {counts.image_pairs} image pairs + {counts.video_pairs} video pair(s)")

result = scan_directory(root / "raw")
print(f"scan found {len(result.assets)} assets, {len(result.skips)} skips")
for asset in result.assets[:4]:
    print(f"  {asset.rel}: {asset.kind.value} {asset.modality.value} at {asset.meta.iso()}")

pairs, unmatched = pair_assets(result.assets, tolerance=2.0)
print(f"\npaired {len(pairs)} RGB+thermal couples, {len(unmatched)} unmatched")
for pair in pairs:
    print(f"  {pair.pair_id}: {pair.rgb.rel} + {pair.thermal.rel} "
          f"(delta {pair.delta_t:+.3f} s)")

print("\npairs.csv:")
print(pairs_csv_text(pairs))
