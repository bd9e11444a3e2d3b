from .contacts import ChiStatistics, ContactElement, Contacts, chi_statistics, extract_contacts
from .domain import DomainBox
from .points import place_points
from .tessellation import (
    Kind,
    Tessellation,
    center_nodes,
    generate,
    generate_random,
    generate_voronoi,
    randomize_vertices,
    voronoi_tessellate,
)

__all__ = [
    "ChiStatistics", "ContactElement", "Contacts", "DomainBox", "Kind", "Tessellation",
    "center_nodes", "chi_statistics", "extract_contacts", "generate", "generate_random",
    "generate_voronoi", "place_points", "randomize_vertices", "voronoi_tessellate",
]
