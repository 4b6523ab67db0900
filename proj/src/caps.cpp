#include "gmnf/caps.hpp"

#include <cstdlib>
#include <string>

#include "gmnf/errors.hpp"

namespace gmnf {

SizeCaps parse_caps(const char* spec, SizeCaps base) {
    std::string s = spec ? spec : "";
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto end = s.find(',', pos);
        if (end == std::string::npos) end = s.size();
        auto item = s.substr(pos, end - pos);
        pos = end + 1;
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("GMNF_SIZE_CAPS entry missing '=': " + item);
        auto key = item.substr(0, eq);
        long long value = 0;
        try {
            value = std::stoll(item.substr(eq + 1));
        } catch (...) {
            throw UsageError("GMNF_SIZE_CAPS value not an integer: " + item);
        }
        if (value <= 0) throw UsageError("GMNF_SIZE_CAPS value must be positive: " + item);
        if (key == "enum_vertices")
            base.enum_vertices = static_cast<int>(value);
        else if (key == "enum_objects")
            base.enum_objects = value;
        else if (key == "oracle_edges")
            base.oracle_edges = static_cast<int>(value);
        else if (key == "tree_nodes")
            base.tree_nodes = value;
        else if (key == "pwl_breakpoints")
            base.pwl_breakpoints = value;
        else if (key == "bruteforce_vertices")
            base.bruteforce_vertices = static_cast<int>(value);
        else
            throw UsageError("GMNF_SIZE_CAPS unknown key: " + key);
    }
    return base;
}

SizeCaps& caps() {
    static SizeCaps instance = parse_caps(std::getenv("GMNF_SIZE_CAPS"), SizeCaps{});
    return instance;
}

}  // namespace gmnf
