#include "qms/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qms/random.hpp"
#include "qms/zoo.hpp"

namespace qms {

namespace {

template <typename T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw SpecParseError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SpecParseError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? field<T>(j, key) : fallback;
}

int positive_int(const json& j, const char* key, int minimum) {
    const int v = field<int>(j, key);
    if (v < minimum)
        throw SpecParseError(std::string("field '") + key + "' must be at least " +
                             std::to_string(minimum));
    return v;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json matrix_to_json(const cmat& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("matrix_to_json: square matrices only");
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

cmat matrix_from_json(const json& j) {
    if (!j.is_object()) throw SpecParseError("matrix must be a JSON object");
    const int d = positive_int(j, "dim", 1);
    const auto re = field<std::vector<double>>(j, "re");
    const auto im = field_or<std::vector<double>>(j, "im", std::vector<double>(re.size(), 0.0));
    const auto n = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
    if (re.size() != n || im.size() != n)
        throw SpecParseError("matrix entries must number dim * dim");
    cmat m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            const auto k = static_cast<std::size_t>(r) * d + c;
            m(r, c) = cplx(re[k], im[k]);
        }
    return m;
}

json channel_to_json(const QuantumChannel& c) {
    json j{{"kind", "superop"}, {"dim", c.dim()}, {"superop", matrix_to_json(c.map)}};
    if (c.reference) j["reference"] = matrix_to_json(*c.reference);
    return j;
}

QuantumChannel channel_from_json(const json& j, const Tolerances& tol) {
    const auto kind = field<std::string>(j, "kind");
    const int d = positive_int(j, "dim", 1);
    std::optional<cmat> reference;
    if (j.contains("reference")) reference = matrix_from_json(j.at("reference"));

    Superop map;
    if (kind == "kraus") {
        std::vector<cmat> kraus;
        for (const auto& k : field<json>(j, "kraus")) kraus.push_back(matrix_from_json(k));
        if (kraus.empty()) throw SpecParseError("kraus list is empty");
        for (const auto& k : kraus)
            if (k.rows() != d) throw SpecParseError("Kraus operator has the wrong dimension");
        map = from_kraus(kraus, KrausPicture::heisenberg, tol).map;
    } else if (kind == "superop") {
        map = matrix_from_json(field<json>(j, "superop"));
        if (map.rows() != d * d) throw SpecParseError("superop must have dimension dim^2");
    } else {
        throw SpecParseError("channel kind must be 'kraus' or 'superop'");
    }
    if (reference && reference->rows() != d) throw SpecParseError("reference has the wrong dimension");
    return make_channel(std::move(map), std::move(reference), tol);
}

Model model_from_json(const json& j, const Tolerances& tol) {
    if (!j.is_object()) throw SpecParseError("model spec must be a JSON object");
    const auto type = field<std::string>(j, "type");
    auto build = [&]() -> Lindbladian {
        if (type == "depolarizing") {
            const int d = positive_int(j, "d", 2);
            cmat ref;
            if (j.contains("reference"))
                ref = matrix_from_json(j.at("reference"));
            else
                ref = thermal_state(d, field_or<double>(j, "beta", 0.0));
            if (ref.rows() != d) throw SpecParseError("reference has the wrong dimension");
            return depolarizing(d, ref);
        }
        if (type == "cyclic_graph") return cyclic_laplacian(positive_int(j, "d", 3));
        if (type == "graph_walk") {
            const int n = positive_int(j, "n", 2);
            std::vector<WeightedEdge> edges;
            for (const auto& e : field<json>(j, "edges")) {
                if (!e.is_array() || e.size() < 2 || e.size() > 3)
                    throw SpecParseError("edges are [u, v] or [u, v, weight]");
                edges.push_back({e[0].get<int>(), e[1].get<int>(),
                                 e.size() == 3 ? e[2].get<double>() : 1.0});
            }
            return embed_classical(graph_laplacian(n, edges));
        }
        if (type == "nc_birth_death") {
            const int n = positive_int(j, "n", 2);
            std::optional<std::vector<double>> weights;
            if (j.contains("weights")) weights = field<std::vector<double>>(j, "weights");
            return nc_birth_death(n, field_or<double>(j, "beta", 1.0), weights);
        }
        if (type == "su2_transference")
            return su2_transference(field<double>(j, "j"),
                                    field_or<std::string>(j, "generators", "XY"));
        if (type == "custom_gns") {
            std::vector<cmat> jumps;
            for (const auto& m : field<json>(j, "jumps")) jumps.push_back(matrix_from_json(m));
            return Lindbladian(std::move(jumps), field<std::vector<double>>(j, "weights"),
                               matrix_from_json(field<json>(j, "reference")), tol);
        }
        throw SpecParseError("unknown model type '" + type + "'");
    };
    try {
        return {type, j, build()};
    } catch (const SpecParseError&) {
        throw;
    } catch (const DomainError& e) {
        throw SpecParseError(type + ": " + e.what());
    } catch (const DimensionMismatch& e) {
        throw SpecParseError(type + ": " + e.what());
    } catch (const json::exception& e) {
        throw SpecParseError(type + ": " + e.what());
    }
}

json load_json_argument(const std::string& path_or_inline) {
    std::string text;
    if (!path_or_inline.empty() && path_or_inline.front() == '{') {
        text = path_or_inline;
    } else {
        std::ifstream in(path_or_inline);
        if (!in) throw SpecParseError("cannot open '" + path_or_inline + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecParseError(std::string("malformed JSON: ") + e.what());
    }
}

json report_to_json(const BoundReport& r) {
    auto num = [](double x) -> json {
        if (std::isfinite(x)) return x;
        return format_double(x);
    };
    json j{{"model", r.model},
           {"d", r.d},
           {"lambda", num(r.lambda)},
           {"t_cb", num(r.t_cb)},
           {"C_cb", num(r.c_cb)},
           {"bound_tcb", num(r.bound_tcb)},
           {"bound_index", num(r.bound_index)},
           {"best_lower", num(r.best_lower)},
           {"decay_pass", r.decay_pass},
           {"consistency_pass", r.consistency_pass},
           {"monotone", r.monotone},
           {"no_decay", r.no_decay}};
    j["k_cb_snapshot"] = r.k_cb_snapshot ? json(*r.k_cb_snapshot) : json(nullptr);
    json diag = json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = num(v);
    j["diagnostics"] = diag;
    return j;
}

std::string report_csv_header() {
    return "# qms bound report v1\n"
           "model,d,lambda,t_cb,C_cb,bound_tcb,bound_index,best_lower,decay_pass\n";
}

std::string report_csv_row(const BoundReport& r) {
    std::ostringstream os;
    os << r.model << ',' << r.d << ',' << format_double(r.lambda) << ','
       << format_double(r.t_cb) << ',' << format_double(r.c_cb) << ','
       << format_double(r.bound_tcb) << ',' << format_double(r.bound_index) << ','
       << format_double(r.best_lower) << ',' << (r.decay_pass ? "true" : "false") << '\n';
    return os.str();
}

std::string bernstein_csv_header() {
    return "# qms bernstein v1\n"
           "d,n,trials,mean_norm,v,ratio\n";
}

std::string bernstein_csv_row(const BernsteinRecord& r) {
    std::ostringstream os;
    os << r.d << ',' << r.n << ',' << r.trials << ',' << format_double(r.mean_norm) << ','
       << format_double(r.v) << ',' << format_double(r.ratio) << '\n';
    return os.str();
}

}  // namespace qms
