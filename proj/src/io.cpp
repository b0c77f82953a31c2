#include "otlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace otlab {

namespace {

double weight_from_json(const json& w) {
    if (w.is_number()) return w.get<double>();
    if (w.is_object() && w.contains("num") && w.contains("den")) {
        double den = w["den"].get<double>();
        if (den == 0.0) throw DomainError("weight fraction has zero denominator");
        return w["num"].get<double>() / den;
    }
    throw DomainError("weight must be a number or {num, den}");
}

}  // namespace

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw DomainError("expected a JSON array of coordinates");
    Vec v;
    for (const auto& c : j) {
        if (!c.is_number()) throw DomainError("coordinates must be numbers");
        v.push_back(c.get<double>());
    }
    if (v.empty()) throw DomainError("empty coordinate array");
    return v;
}

json vec_to_json(const Vec& v) {
    json j = json::array();
    for (double c : v) j.push_back(c);
    return j;
}

DiscreteMeasure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("atoms"))
        throw DomainError("measure JSON needs {dimension, atoms}");
    int dim = j["dimension"].get<int>();
    std::vector<Atom> atoms;
    for (const auto& a : j["atoms"]) {
        if (!a.contains("point") || !a.contains("weight"))
            throw DomainError("atom JSON needs {point, weight}");
        atoms.push_back(Atom{vec_from_json(a["point"]), weight_from_json(a["weight"])});
    }
    return make_measure(dim, std::move(atoms), 1e-9);
}

json measure_to_json(const DiscreteMeasure& m) {
    json atoms = json::array();
    for (const Atom& a : m.atoms)
        atoms.push_back(json{{"point", vec_to_json(a.point)}, {"weight", a.weight}});
    return json{{"dimension", m.dim}, {"atoms", atoms}};
}

NormSpec norm_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw DomainError("norm JSON needs a kind");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "euclidean") return NormSpec::euclidean();
    if (kind == "lq") {
        if (!j.contains("q")) throw DomainError("lq norm JSON needs q");
        return NormSpec::lq(j["q"].get<double>());
    }
    if (kind == "linf") return NormSpec::linf();
    if (kind == "l1") return NormSpec::l1();
    throw DomainError("unknown norm kind '" + kind + "'");
}

json norm_to_json(const NormSpec& spec) {
    switch (spec.kind) {
        case NormKind::euclidean: return json{{"kind", "euclidean"}};
        case NormKind::lq: return json{{"kind", "lq"}, {"q", spec.q}};
        case NormKind::linf: return json{{"kind", "linf"}};
        case NormKind::l1: return json{{"kind", "l1"}};
        case NormKind::custom: throw DomainError("custom norms have no JSON form");
    }
    throw DomainError("unknown norm kind");
}

AffineSubspace subspace_from_json(const json& j) {
    if (!j.is_object() || !j.contains("base"))
        throw DomainError("subspace JSON needs {base, directions}");
    Vec base = vec_from_json(j["base"]);
    std::vector<Vec> dirs;
    if (j.contains("directions"))
        for (const auto& d : j["directions"]) dirs.push_back(vec_from_json(d));
    return make_subspace(std::move(base), std::move(dirs));
}

json subspace_to_json(const AffineSubspace& s) {
    json dirs = json::array();
    for (const Vec& d : s.directions) dirs.push_back(vec_to_json(d));
    return json{{"base", vec_to_json(s.base)}, {"directions", dirs}};
}

IsometryCandidate candidate_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw DomainError("candidate JSON needs a kind");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "phi_t" || kind == "phi_star") {
        Vec axis = j.contains("axis") ? vec_from_json(j["axis"]) : Vec{1.0, 0.0};
        Vec origin = j.contains("origin") ? vec_from_json(j["origin"]) : zeros(static_cast<int>(axis.size()));
        if (kind == "phi_t") {
            if (!j.contains("t")) throw DomainError("phi_t candidate needs t");
            return IsometryCandidate::phi_t(j["t"].get<double>(), axis, origin);
        }
        return IsometryCandidate::phi_star(axis, origin);
    }
    if (kind == "rotation") {
        if (!j.contains("angle")) throw DomainError("rotation candidate needs angle");
        return IsometryCandidate::rotation(j["angle"].get<double>());
    }
    throw DomainError("unknown candidate kind '" + kind + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void emit_rec(const json& j, std::ostringstream& out, int indent, int depth) {
    const std::string pad(static_cast<size_t>(indent) * (static_cast<size_t>(depth) + 1), ' ');
    const std::string pad_close(static_cast<size_t>(indent) * static_cast<size_t>(depth), ' ');
    const bool pretty = indent > 0;
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ',';
                first = false;
                if (pretty) out << '\n' << pad;
                out << json(it.key()).dump() << (pretty ? ": " : ":");
                emit_rec(it.value(), out, indent, depth + 1);
            }
            if (pretty) out << '\n' << pad_close;
            out << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out << ',';
                first = false;
                if (pretty) out << '\n' << pad;
                emit_rec(v, out, indent, depth + 1);
            }
            if (pretty) out << '\n' << pad_close;
            out << ']';
            return;
        }
        case json::value_t::number_float:
            out << format_double(j.get<double>());
            return;
        default:
            out << j.dump();
            return;
    }
}

}  // namespace

std::string emit_json(const json& j, int indent) {
    std::ostringstream out;
    emit_rec(j, out, indent, 0);
    out << '\n';
    return out.str();
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw UsageError("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

json parse_json_arg(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') return load_json_file(arg.substr(1));
    try {
        return json::parse(arg);
    } catch (const json::parse_error& e) {
        throw UsageError("invalid inline JSON: " + std::string(e.what()));
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write file '" + path + "'");
    out << text;
}

}  // namespace otlab
