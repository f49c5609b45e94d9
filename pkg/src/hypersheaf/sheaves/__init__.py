"""Presheaves and sheaves of cochain complexes on finite spaces."""

from .godement import GodementTower, godement_tower
from .io import sheaf_from_json, sheaf_to_json, table_from_json
from .poset_sheaf import (
    PosetSheaf,
    SheafMap,
    Sections,
    constant_sheaf,
    godement_layer0,
    is_flabby,
    sections,
    skyscraper,
)
from .presheaves import (
    ConstantPresheaf,
    GodementLayer,
    GodementPresheaf,
    PresheafOfComplexes,
    SheafBacked,
    SingularModelPresheaf,
    TableBacked,
    sheafify,
    stalk,
)

__all__ = [
    "GodementTower", "godement_tower", "PosetSheaf", "SheafMap", "Sections",
    "constant_sheaf", "godement_layer0", "is_flabby", "sections", "skyscraper",
    "ConstantPresheaf", "GodementLayer", "GodementPresheaf", "PresheafOfComplexes",
    "SheafBacked", "SingularModelPresheaf", "TableBacked", "sheafify", "stalk",
    "sheaf_from_json", "sheaf_to_json", "table_from_json",
]
