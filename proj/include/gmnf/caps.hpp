#ifndef GMNF_CAPS_HPP
#define GMNF_CAPS_HPP

#include <cstdint>

namespace gmnf {

// Size guards for the enumeration-based oracles. Overridable through the
// GMNF_SIZE_CAPS environment variable ("key=value,key=value", see README).
struct SizeCaps {
    int enum_vertices = 12;          // cycle/path enumeration vertex limit
    std::int64_t enum_objects = 1000000;  // enumerated cycles+paths limit
    int oracle_edges = 16;           // brute-force LP edge limit
    std::int64_t tree_nodes = 100000;     // computation-tree node limit
    std::int64_t pwl_breakpoints = 100000;
    int bruteforce_vertices = 12;    // cycle-enumeration ratio-balance check
};

// Process-wide caps, parsed from the environment on first use.
SizeCaps& caps();

// Parses an override string; throws UsageError on malformed input.
SizeCaps parse_caps(const char* spec, SizeCaps base);

}  // namespace gmnf

#endif
