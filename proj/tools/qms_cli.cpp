// qms: analyze, verify and sweep front end.
//
// Exit codes: 0 success, 2 property violation, 3 input error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qms/concentration.hpp"
#include "qms/random.hpp"
#include "qms/serialize.hpp"
#include "qms/zoo.hpp"

using namespace qms;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_violation = 2;
constexpr int exit_input = 3;

struct RunConfig {
    std::string command;
    std::string model;
    double epsilon = 0.1;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    std::string d_range;
    std::string n_range;
    double beta = 1.0;
    double tol_psd = Tolerances{}.psd;
    double tol_bisect = 1e-6;

    json to_json() const {
        return {{"command", command}, {"model", model},     {"epsilon", epsilon},
                {"seed", seed},       {"out", out},         {"format", format},
                {"d_range", d_range}, {"n_range", n_range}, {"beta", beta},
                {"tol_psd", tol_psd}, {"tol_bisect", tol_bisect}};
    }
    Tolerances tolerances() const {
        Tolerances t;
        t.psd = tol_psd;
        return t;
    }
};

struct InputError : Error {
    using Error::Error;
};

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw InputError("cannot write '" + cfg.out + "'");
    f << text;
}

std::vector<int> parse_range(const std::string& text, const char* flag) {
    if (text.empty()) throw InputError(std::string(flag) + " is required for this sweep");
    std::vector<int> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError(std::string(flag) + ": expected lo:hi[:step]");
        }
    }
    if (parts.size() < 2 || parts.size() > 3)
        throw InputError(std::string(flag) + ": expected lo:hi[:step]");
    const int step = parts.size() == 3 ? parts[2] : 1;
    if (step <= 0) throw InputError(std::string(flag) + ": step must be positive");
    std::vector<int> out;
    for (int v = parts[0]; v <= parts[1]; v += step) out.push_back(v);
    if (out.empty()) throw InputError(std::string(flag) + ": empty range");
    return out;
}

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("QMS_THREADS")) {
        const int c = std::atoi(cap);
        if (c >= 1) n = std::min(n, static_cast<unsigned>(c));
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, jobs));
}

// Runs job(i) for i < count on a worker pool; results are stored by index so
// the aggregation order does not depend on scheduling.
template <typename Result>
std::vector<Result> parallel_map(std::size_t count, const std::function<Result(std::size_t)>& job) {
    std::vector<Result> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    const unsigned n = worker_count(count);
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

// ---- analyze ----

bool report_ok(const BoundReport& r) { return r.consistency_pass && r.decay_pass && r.monotone; }

int cmd_analyze(const RunConfig& cfg) {
    if (cfg.model.empty()) throw InputError("analyze requires --model");
    const auto model = model_from_json(load_json_argument(cfg.model), cfg.tolerances());
    json out{{"config", cfg.to_json()}, {"spec", model.spec}};
    int code = exit_ok;
    try {
        const auto rep =
            mlsi_lower_bounds(model.generator, model.type, cfg.epsilon, cfg.seed, cfg.tol_bisect);
        out["report"] = report_to_json(rep);
        if (!report_ok(rep)) code = exit_violation;
        if (cfg.format == "csv") {
            emit(cfg, report_csv_header() + "# config: " + cfg.to_json().dump() + "\n" +
                          report_csv_row(rep));
            return code;
        }
    } catch (const SpecParseError&) {
        throw;
    } catch (const Error& e) {
        out["diagnostic"] = {{"error", e.what()}};
        code = exit_violation;
    }
    out["status"] = code == exit_ok ? "pass" : "fail";
    emit(cfg, out.dump(2) + "\n");
    return code;
}

// ---- verify ----

struct Property {
    std::string name;
    int count = 0;
    int failures = 0;
    double worst_slack = std::numeric_limits<double>::infinity();

    void record(double slack, double allowance = 0.0) {
        ++count;
        worst_slack = std::min(worst_slack, slack);
        if (!(slack >= -allowance)) ++failures;
    }
    void record(bool ok) { record(ok ? 0.0 : -1.0); }
    json to_json() const {
        return {{"name", name},
                {"count", count},
                {"failures", failures},
                {"worst_slack", std::isfinite(worst_slack) ? json(worst_slack) : json(nullptr)},
                {"pass", failures == 0}};
    }
};

std::vector<Property> verify_channel(const QuantumChannel& c) {
    std::vector<Property> props;
    auto flag = [&](const char* name, bool ok) {
        Property p{name};
        p.record(ok);
        props.push_back(p);
    };
    Property cp{"completely_positive"};
    cp.record(min_eigenvalue(choi(c.map)), 1e-10);
    props.push_back(cp);
    flag("unital", c.unital_verified);
    flag("trace_preserving", c.trace_preserving_verified);
    if (c.reference) flag("gns_symmetric", c.gns_verified);
    return props;
}

std::vector<Property> verify_model(const Lindbladian& l, std::uint64_t seed) {
    std::vector<Property> props;
    Rng rng(seed);
    const auto d = l.dim();
    const auto e = fixed_point_expectation(l);
    Property constructed{"generator_invariants"};
    constructed.record(true);
    props.push_back(constructed);

    Property poincare{"poincare"};
    for (int k = 0; k < 10; ++k) {
        const auto c = poincare_check(l, e, random_hermitian(d, rng));
        poincare.record(c.rhs - c.lhs, 1e-9);
    }
    props.push_back(poincare);

    if (spectral_gap(l) > 0.0) {
        const double tcb = t_cb(l, e);
        std::vector<double> times;
        for (int k = 1; k <= 8; ++k) times.push_back(tcb * k / 4.0);
        Property decay{"decay_envelope"};
        for (int k = 0; k < 4; ++k) {
            const auto tr = decay_check(l, e, random_state(d, rng), times, tcb);
            for (std::size_t i = 0; i < tr.times.size(); ++i)
                decay.record(tr.envelope[i] - tr.divergence[i], 1e-9);
        }
        props.push_back(decay);
    }
    return props;
}

std::vector<Property> verify_suite(std::uint64_t seed) {
    std::vector<Property> props;
    Rng rng(seed);

    Property contraction{"entropy_contraction"};
    for (int k = 0; k < 40; ++k) {
        const Eigen::Index d = 2 + k % 2;
        const auto phi = make_channel(random_trace_symmetric_channel(d, rng));
        const auto e = multiplicative_domain(phi);
        const int kcb = k_cb(phi, e);
        const auto c = entropy_contraction_check(phi, e, random_state(d, rng), kcb);
        contraction.record(c.rhs - c.lhs, 1e-9);
    }
    props.push_back(contraction);

    Property chain{"entropy_difference_chain"};
    for (int k = 0; k < 40; ++k) {
        const Eigen::Index d = 2 + k % 3;
        const auto phi = make_channel(random_trace_symmetric_channel(d, rng));
        const auto c = entropy_difference_check(phi, random_state(d, rng), random_state(d, rng));
        chain.record(std::min(c.mid - c.lhs, c.rhs - c.mid), 1e-9);
    }
    props.push_back(chain);

    Property bkm{"bkm_identity"};
    for (int k = 0; k < 20; ++k) {
        const Eigen::Index d = 2 + k % 3;
        const cmat rho = random_state(d, rng), sigma = random_state(d, rng);
        const double a = relative_entropy(rho, sigma);
        const double b = relative_entropy_via_bkm(rho, sigma);
        bkm.record(1e-6 * std::abs(a) - std::abs(a - b));
    }
    props.push_back(bkm);

    Property sandwich{"k_of_c_sandwich"};
    for (int k = 0; k < 20; ++k) {
        const Eigen::Index d = 2 + k % 3;
        const cmat rho = random_state(d, rng), sigma = random_state(d, rng);
        // smallest c with rho <= c sigma
        const cmat s = mat_pow(sigma, -0.5);
        const double c = std::max(1.0 + 1e-6, eig_hermitian(cmat(s * rho * s)).values.maxCoeff());
        const double g = bkm_metric(sigma, cmat(rho - sigma));
        const double dv = relative_entropy(rho, sigma);
        sandwich.record(std::min(dv - k_of_c(c) * g, g - dv), 1e-9);
    }
    props.push_back(sandwich);

    Property decay{"zoo_decay"};
    for (const auto& l : {depolarizing(2, maximally_mixed(2)), cyclic_laplacian(5),
                          nc_birth_death(4, 1.0), su2_transference(0.5, "XY")}) {
        for (const auto& p : verify_model(l, seed))
            if (p.name == "decay_envelope") decay.record(p.worst_slack, 1e-9);
    }
    props.push_back(decay);
    return props;
}

int cmd_verify(const RunConfig& cfg) {
    std::vector<Property> props;
    json subject = "suite";
    try {
        if (cfg.model.empty()) {
            props = verify_suite(cfg.seed);
        } else {
            const json spec = load_json_argument(cfg.model);
            subject = spec;
            if (spec.contains("kind"))
                props = verify_channel(channel_from_json(spec, cfg.tolerances()));
            else
                props = verify_model(model_from_json(spec, cfg.tolerances()).generator, cfg.seed);
        }
    } catch (const SpecParseError&) {
        throw;
    } catch (const Error& e) {
        Property p{std::string("construction: ") + e.what()};
        p.record(false);
        props.push_back(p);
    }
    json list = json::array();
    bool ok = true;
    for (const auto& p : props) {
        list.push_back(p.to_json());
        ok = ok && p.failures == 0;
    }
    const json out{{"config", cfg.to_json()},
                   {"subject", subject},
                   {"properties", list},
                   {"status", ok ? "pass" : "fail"}};
    emit(cfg, out.dump(2) + "\n");
    return ok ? exit_ok : exit_violation;
}

// ---- sweep ----

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.model.empty()) throw InputError("sweep requires --model");
    json base = load_json_argument(cfg.model);
    const auto type = base.value("type", std::string());

    std::string csv;
    json rows = json::array();
    std::vector<double> xs, ys;
    bool ok = true;

    if (type == "bernstein") {
        const auto ds = parse_range(cfg.d_range, "--d-range");
        const int n = base.value("n", 50), trials = base.value("trials", 200);
        const double bound = base.value("bound", 1.0);
        const auto sampler =
            base.value("sampler", std::string("dense")) == "diagonal" ? BernsteinSampler::diagonal
                                                                        : BernsteinSampler::dense;
        const auto recs = parallel_map<BernsteinRecord>(ds.size(), [&](std::size_t i) {
            return matrix_bernstein_mc(ds[i], n, bound, trials, cfg.seed + i, sampler);
        });
        csv = bernstein_csv_header();
        for (const auto& r : recs) {
            csv += bernstein_csv_row(r);
            rows.push_back({{"d", r.d}, {"n", r.n}, {"trials", r.trials}, {"mean_norm", r.mean_norm},
                            {"v", r.v}, {"ratio", r.ratio}});
            xs.push_back(static_cast<double>(r.d));
            ys.push_back(r.ratio);
            ok = ok && r.ratio <= 10.0;
        }
    } else {
        std::vector<int> sizes;
        std::function<BoundReport(int)> point;
        if (type == "cyclic_graph") {
            sizes = parse_range(cfg.d_range, "--d-range");
            point = [&](int d) {
                return matrix_unit_bounds(matrix_unit_structure(cyclic_generator(d)), type,
                                          cfg.epsilon, cfg.seed, cfg.tol_bisect);
            };
        } else if (type == "nc_birth_death") {
            sizes = parse_range(cfg.n_range, "--n-range");
            const double beta = base.value("beta", cfg.beta);
            point = [&, beta](int n) {
                return matrix_unit_bounds(matrix_unit_structure(thermal_path(n, beta)), type,
                                          cfg.epsilon, cfg.seed, cfg.tol_bisect);
            };
        } else if (type == "depolarizing" || type == "su2_transference") {
            sizes = parse_range(cfg.d_range, "--d-range");
            point = [&](int d) {
                json spec = base;
                if (type == "depolarizing")
                    spec["d"] = d;
                else
                    spec["j"] = (d - 1) / 2.0;
                const auto m = model_from_json(spec, cfg.tolerances());
                return mlsi_lower_bounds(m.generator, type, cfg.epsilon, cfg.seed, cfg.tol_bisect);
            };
        } else {
            throw InputError("sweep supports cyclic_graph, nc_birth_death, depolarizing, "
                             "su2_transference and bernstein");
        }
        for (int s : sizes)
            if (s < 2) throw InputError("sweep sizes must be at least 2");
        const auto reps = parallel_map<BoundReport>(
            sizes.size(), [&](std::size_t i) { return point(sizes[i]); });
        csv = report_csv_header();
        for (std::size_t i = 0; i < reps.size(); ++i) {
            csv += report_csv_row(reps[i]);
            rows.push_back(report_to_json(reps[i]));
            xs.push_back(static_cast<double>(sizes[i]));
            ys.push_back(reps[i].t_cb);
            ok = ok && report_ok(reps[i]);
        }
    }

    json fit = nullptr;
    if (xs.size() >= 2) {
        const auto f = loglog_fit(xs, ys);
        fit = {{"quantity", type == "bernstein" ? "ratio" : "t_cb"},
               {"slope", f.slope},
               {"slope_stderr", f.slope_stderr},
               {"intercept", f.intercept}};
    }
    if (cfg.format == "csv") {
        std::string text = csv;
        const auto first_newline = text.find('\n');
        text.insert(first_newline + 1, "# config: " + cfg.to_json().dump() + "\n");
        if (!fit.is_null()) text += "# fit: " + fit.dump() + "\n";
        emit(cfg, text);
    } else {
        emit(cfg, json{{"config", cfg.to_json()}, {"rows", rows}, {"fit", fit},
                       {"status", ok ? "pass" : "fail"}}
                          .dump(2) +
                      "\n");
    }
    return ok ? exit_ok : exit_violation;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Quantum Markov semigroup mixing-time and MLSI bounds"};
    app.require_subcommand(1);
    std::vector<CLI::App*> subs{app.add_subcommand("analyze", "bounds for one model"),
                                app.add_subcommand("verify", "property suites"),
                                app.add_subcommand("sweep", "size sweep with log-log fit")};
    for (auto* sub : subs) {
        sub->add_option("--model", cfg.model, "model spec: file path or inline JSON");
        sub->add_option("--epsilon", cfg.epsilon, "CP-sandwich width")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_option("--format", cfg.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--d-range", cfg.d_range, "lo:hi[:step]");
        sub->add_option("--n-range", cfg.n_range, "lo:hi[:step]");
        sub->add_option("--beta", cfg.beta, "inverse temperature for birth-death sweeps");
        sub->add_option("--tol-psd", cfg.tol_psd, "PSD tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--tol-bisect", cfg.tol_bisect, "relative bisection width")
            ->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }
    if (cfg.epsilon <= 0.0 || cfg.epsilon >= 1.0) {
        std::cerr << "error: --epsilon must lie in (0, 1)\n";
        return exit_input;
    }
    try {
        if (subs[0]->parsed()) {
            cfg.command = "analyze";
            return cmd_analyze(cfg);
        }
        if (subs[1]->parsed()) {
            cfg.command = "verify";
            return cmd_verify(cfg);
        }
        cfg.command = "sweep";
        return cmd_sweep(cfg);
    } catch (const SpecParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_violation;
    }
}
