#ifndef GMNF_IO_HPP
#define GMNF_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gmnf/instance.hpp"

namespace gmnf {

enum class NumericMode { rational, floating };

// Instance file schema (JSON):
//   { "vertices": n,
//     "edges": [ { "id", "tail", "head", "cost", "capacity",
//                  "a_tail", "a_head" } ... ],
//     "balance": [ f_0 ... f_{n-1} ] }
// Numbers may be JSON numbers or exact rational strings "p/q". Edge ids
// must be a permutation of 0..m-1; the sign convention (a_tail > 0,
// a_head < 0) is enforced on load.
GmnfInstance<Rat> load_instance_rational(const std::string& path);
GmnfInstance<double> load_instance_float(const std::string& path);
GmnfInstance<Rat> parse_instance_rational(const std::string& json_text);

std::string serialize_instance(const GmnfInstance<Rat>& inst);
void save_instance(const GmnfInstance<Rat>& inst, const std::string& path);

// Flow file schema: { "flow": [ x_0 ... x_{m-1} ] }.
std::vector<Rat> load_flow_rational(const std::string& path, int expected_size);

// FNV-1a over the canonical serialization; identifies result reports.
std::uint64_t fingerprint(const std::string& canonical_text);
std::string fingerprint_hex(const GmnfInstance<Rat>& inst);

template <class Num>
GmnfInstance<Num> load_instance(const std::string& path);
template <>
inline GmnfInstance<Rat> load_instance<Rat>(const std::string& path) {
    return load_instance_rational(path);
}
template <>
inline GmnfInstance<double> load_instance<double>(const std::string& path) {
    return load_instance_float(path);
}

}  // namespace gmnf

#endif
