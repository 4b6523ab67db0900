#include "gmnf/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gmnf/errors.hpp"

namespace gmnf {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Numbers arrive either as exact strings ("3/4", "-2") or JSON numbers.
// JSON doubles go through their shortest decimal representation, so a file
// containing 0.1 parses to exactly 1/10 in rational mode.
template <class Num>
Num number_from(const json& j, const std::string& what) {
    if (j.is_string()) return num::parse<Num>(j.get<std::string>());
    if (j.is_number_integer()) return num::from_int<Num>(j.get<long>());
    if (j.is_number_float()) return num::parse<Num>(num::str(j.get<double>()));
    throw UsageError(what + ": expected number or rational string");
}

template <class Num>
GmnfInstance<Num> instance_from_json(const json& doc) {
    if (!doc.is_object()) throw UsageError("instance: top level must be an object");
    if (!doc.contains("vertices") || !doc.contains("edges") || !doc.contains("balance"))
        throw UsageError("instance: requires vertices, edges, balance");
    int n = doc.at("vertices").get<int>();
    if (n < 0) throw UsageError("instance: negative vertex count");
    const auto& edges = doc.at("edges");
    if (!edges.is_array()) throw UsageError("instance: edges must be an array");
    const int m = static_cast<int>(edges.size());

    std::vector<std::pair<int, int>> arcs(static_cast<std::size_t>(m), {-1, -1});
    std::vector<Num> cost(static_cast<std::size_t>(m)), capacity(static_cast<std::size_t>(m));
    std::vector<Num> a_tail(static_cast<std::size_t>(m)), a_head(static_cast<std::size_t>(m));
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (const auto& je : edges) {
        int id = je.at("id").get<int>();
        if (id < 0 || id >= m || seen[static_cast<std::size_t>(id)])
            throw UsageError("instance: edge ids must be a permutation of 0..m-1");
        seen[static_cast<std::size_t>(id)] = 1;
        std::string tag = "edge " + std::to_string(id);
        arcs[static_cast<std::size_t>(id)] = {je.at("tail").get<int>(), je.at("head").get<int>()};
        cost[static_cast<std::size_t>(id)] = number_from<Num>(je.at("cost"), tag + " cost");
        capacity[static_cast<std::size_t>(id)] = number_from<Num>(je.at("capacity"), tag + " capacity");
        a_tail[static_cast<std::size_t>(id)] = number_from<Num>(je.at("a_tail"), tag + " a_tail");
        a_head[static_cast<std::size_t>(id)] = number_from<Num>(je.at("a_head"), tag + " a_head");
        if (num::sign(a_tail[static_cast<std::size_t>(id)]) <= 0)
            throw UsageError(tag + ": a_tail must be > 0");
        if (num::sign(a_head[static_cast<std::size_t>(id)]) >= 0)
            throw UsageError(tag + ": a_head must be < 0");
    }

    GmnfInstance<Num> inst;
    inst.graph = DirectedGraph(n, std::move(arcs));
    inst.cost = std::move(cost);
    inst.capacity = std::move(capacity);
    inst.a_tail = std::move(a_tail);
    inst.a_head = std::move(a_head);
    const auto& balance = doc.at("balance");
    if (!balance.is_array() || static_cast<int>(balance.size()) != n)
        throw UsageError("instance: balance must list one value per vertex");
    for (const auto& jb : balance) inst.balance.push_back(number_from<Num>(jb, "balance"));
    return inst;
}

json rational_out(const Rat& r) {
    if (r.get_den() == 1 && r.get_num().fits_slong_p()) return json(r.get_num().get_si());
    return json(num::str(r));
}

json instance_to_json(const GmnfInstance<Rat>& inst) {
    json doc;
    doc["vertices"] = inst.n();
    doc["edges"] = json::array();
    for (int e = 0; e < inst.m(); ++e) {
        const auto& ed = inst.graph.edges[static_cast<std::size_t>(e)];
        json je;
        je["id"] = e;
        je["tail"] = ed.tail;
        je["head"] = ed.head;
        je["cost"] = rational_out(inst.cost[static_cast<std::size_t>(e)]);
        je["capacity"] = rational_out(inst.capacity[static_cast<std::size_t>(e)]);
        je["a_tail"] = rational_out(inst.a_tail[static_cast<std::size_t>(e)]);
        je["a_head"] = rational_out(inst.a_head[static_cast<std::size_t>(e)]);
        doc["edges"].push_back(std::move(je));
    }
    doc["balance"] = json::array();
    for (const auto& f : inst.balance) doc["balance"].push_back(rational_out(f));
    return doc;
}

}  // namespace

GmnfInstance<Rat> parse_instance_rational(const std::string& json_text) {
    return instance_from_json<Rat>(json::parse(json_text));
}

GmnfInstance<Rat> load_instance_rational(const std::string& path) {
    return instance_from_json<Rat>(json::parse(slurp(path)));
}

GmnfInstance<double> load_instance_float(const std::string& path) {
    return instance_from_json<double>(json::parse(slurp(path)));
}

std::string serialize_instance(const GmnfInstance<Rat>& inst) {
    return instance_to_json(inst).dump(2);
}

void save_instance(const GmnfInstance<Rat>& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write file: " + path);
    out << serialize_instance(inst) << "\n";
}

std::vector<Rat> load_flow_rational(const std::string& path, int expected_size) {
    auto doc = json::parse(slurp(path));
    if (!doc.is_object() || !doc.contains("flow") || !doc.at("flow").is_array())
        throw UsageError("flow file: expected { \"flow\": [...] }");
    std::vector<Rat> flow;
    for (const auto& j : doc.at("flow")) flow.push_back(number_from<Rat>(j, "flow"));
    if (static_cast<int>(flow.size()) != expected_size)
        throw UsageError("flow file: expected " + std::to_string(expected_size) + " entries");
    return flow;
}

std::uint64_t fingerprint(const std::string& canonical_text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fingerprint_hex(const GmnfInstance<Rat>& inst) {
    std::uint64_t h = fingerprint(instance_to_json(inst).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace gmnf
