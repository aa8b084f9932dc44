from .metrics import (
    TransportedPoints,
    BlockMassReport,
    barycentric_map,
    knn1_accuracy,
    block_mass_report,
    class_mass_transfer,
    class_block_mass,
    matched_class_transfer,
    off_association_by_class,
    support_pattern,
)

__all__ = [
    "TransportedPoints",
    "BlockMassReport",
    "barycentric_map",
    "knn1_accuracy",
    "block_mass_report",
    "class_mass_transfer",
    "class_block_mass",
    "matched_class_transfer",
    "off_association_by_class",
    "support_pattern",
]
