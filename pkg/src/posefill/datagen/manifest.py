"""Identity-grouped dataset index: records, JSONL serialization, CSV import."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image

from ..errors import IoError
from ..imgio import round_half_up
from .align import LANDMARK_NAMES
from .posemap import PoseAngles

TRAIN_FRACTION = 0.9


@dataclass
class FaceRecord:
    identity_id: str
    image_path: str
    landmarks: dict[str, tuple[float, float]]
    pose: PoseAngles
    split: str

    def to_json(self) -> str:
        payload = {
            "identity_id": self.identity_id,
            "image_path": self.image_path,
            "landmarks": {k: [float(x), float(y)] for k, (x, y) in self.landmarks.items()},
            "pose": {"pitch": self.pose.pitch, "yaw": self.pose.yaw, "roll": self.pose.roll},
            "split": self.split,
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "FaceRecord":
        d = json.loads(line)
        return cls(
            identity_id=d["identity_id"],
            image_path=d["image_path"],
            landmarks={k: (float(v[0]), float(v[1])) for k, v in d["landmarks"].items()},
            pose=PoseAngles(d["pose"]["pitch"], d["pose"]["yaw"], d["pose"]["roll"]),
            split=d["split"],
        )


@dataclass
class DatasetManifest:
    """Index of face records grouped by identity.

    Paths in records are relative to `root`; `identities` maps each
    identity to its record indices.
    """

    records: list[FaceRecord]
    identities: dict[str, list[int]] = field(default_factory=dict)
    image_size: int = 0
    root: Path = field(default_factory=Path)

    def __post_init__(self) -> None:
        if not self.identities:
            self.identities = group_by_identity(self.records)

    def resolve_path(self, index: int) -> Path:
        return self.root / self.records[index].image_path

    def split_indices(self, split: str) -> list[int]:
        return [i for i, r in enumerate(self.records) if r.split == split]

    def save(self, path: str | Path) -> None:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as fh:
                for rec in self.records:
                    fh.write(rec.to_json() + "\n")
        except OSError as exc:
            raise IoError(f"cannot write manifest {path}: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise IoError(f"cannot read manifest {path}: {exc}") from exc
        records = [FaceRecord.from_json(ln) for ln in lines if ln.strip()]
        if not records:
            raise IoError(f"manifest {path} has no records")
        root = path.parent
        with Image.open(root / records[0].image_path) as im:
            image_size = im.size[0]
        return cls(records=records, image_size=image_size, root=root)


def group_by_identity(records: list[FaceRecord]) -> dict[str, list[int]]:
    groups: dict[str, list[int]] = {}
    for i, rec in enumerate(records):
        groups.setdefault(rec.identity_id, []).append(i)
    return groups


def assign_split(n_images: int) -> list[str]:
    """Per-identity 90/10 train/test split by image order.

    Identities with >= 2 images always keep at least one test record so
    evaluation and verification stay possible at any scale.
    """
    n_train = min(max(round_half_up(TRAIN_FRACTION * n_images), 1), n_images)
    if n_images >= 2:
        n_train = min(n_train, n_images - 1)
    return ["train"] * n_train + ["test"] * (n_images - n_train)


def import_landmark_csv(csv_path: str | Path, image_root: str | Path) -> DatasetManifest:
    """Build a manifest from a user-supplied landmark CSV.

    Expected columns: image_path, lx0, ly0, ..., lx4, ly4, pitch, yaw, roll
    with points ordered (left eye, right eye, nose tip, mouth left,
    mouth right).  The identity is the image's parent directory name.
    """
    csv_path = Path(csv_path)
    image_root = Path(image_root)
    expected = ["image_path"]
    for i in range(5):
        expected += [f"lx{i}", f"ly{i}"]
    expected += ["pitch", "yaw", "roll"]

    rows = []
    try:
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or list(reader.fieldnames) != expected:
                raise IoError(
                    f"landmark CSV columns must be {expected}, got {reader.fieldnames}"
                )
            rows = list(reader)
    except OSError as exc:
        raise IoError(f"cannot read landmark CSV {csv_path}: {exc}") from exc
    if not rows:
        raise IoError(f"landmark CSV {csv_path} is empty")

    by_identity: dict[str, list[dict]] = {}
    for row in rows:
        identity = Path(row["image_path"]).parent.name or "unknown"
        by_identity.setdefault(identity, []).append(row)

    records: list[FaceRecord] = []
    for identity in sorted(by_identity):
        group = by_identity[identity]
        splits = assign_split(len(group))
        for row, split in zip(group, splits):
            landmarks = {
                name: (float(row[f"lx{i}"]), float(row[f"ly{i}"]))
                for i, name in enumerate(LANDMARK_NAMES)
            }
            records.append(
                FaceRecord(
                    identity_id=identity,
                    image_path=row["image_path"],
                    landmarks=landmarks,
                    pose=PoseAngles(float(row["pitch"]), float(row["yaw"]), float(row["roll"])),
                    split=split,
                )
            )

    with Image.open(image_root / records[0].image_path) as im:
        image_size = im.size[0]
    return DatasetManifest(records=records, image_size=image_size, root=image_root)
