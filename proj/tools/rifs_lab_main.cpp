// rifs-lab: command-line laboratory for random iterated function systems of
// rational maps on the Riemann sphere. Every subcommand writes its CSV/JSON
// products plus a resolved-config echo, a hypothesis report where a system
// is involved, and a manifest keyed by the config hash.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rifs/csv.hpp"
#include "rifs/engine.hpp"
#include "rifs/lambda_class.hpp"
#include "rifs/stats.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace rifs;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_hypothesis = 3;
constexpr int exit_runtime = 4;

struct HypothesisViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    // system block
    std::string family = "critical";
    double lambda_re = 0.0, lambda_im = 0.5;
    double mu_re = 1.2 * std::cos(1.0), mu_im = 1.2 * std::sin(1.0);
    double p0 = 0.6;
    // run block
    std::uint64_t seed = 1;
    long long n_steps = 1000000;
    int trials = 20;
    double epsilon = 0.1;
    double r_far = 10.0;
    long long burnin = 0;
    long long cap = 100000000;
    double z0_re = 0.3, z0_im = 0.1;
    int samples = 10000;
    double s_inner = 1e-3;
    int k_top = 2200;
    // probe block
    long long qmax = 50;
    double tol = 1e-9;
    int depth = 22;
    int cells = 1000;
    int k_series = 12;
    double r_scale = 5e-3;
    int cycles = 10;
    int curve_samples = 1440;
    int dedup_factor = 4;
    // output block
    std::string directory = "out";
    bool trace = false;

    // cli-only
    int threads = 1;
    bool force = false;
    std::string map_name = "f0";

    Complex lambda() const { return {lambda_re, lambda_im}; }
    Complex mu() const { return {mu_re, mu_im}; }
    Complex z0() const { return {z0_re, z0_im}; }
};

json schema_description() {
    return json{
        {"system", {{"family", "critical|mobius|logistic"},
                    {"lambda", "[re, im]"},
                    {"mu", "[re, im]"},
                    {"p0", "number in [0,1]"}}},
        {"run", {{"seed", "uint64"}, {"n_steps", "int"}, {"trials", "int"},
                 {"epsilon", "number"}, {"r_far", "number"}, {"burnin", "int"},
                 {"cap", "int"}, {"z0", "[re, im]"}, {"samples", "int"},
                 {"s_inner", "number"}, {"k_top", "int"}}},
        {"probe", {{"qmax", "int"}, {"tol", "number"}, {"depth", "int"},
                   {"cells", "int"}, {"k_series", "int"}, {"r_scale", "number"},
                   {"cycles", "int"}, {"curve_samples", "int"},
                   {"dedup_factor", "int"}}},
        {"output", {{"directory", "string"}, {"trace", "bool"}}},
    };
}

void check_known_keys(const json& node, const json& schema, const std::string& where) {
    for (auto it = node.begin(); it != node.end(); ++it) {
        if (!schema.contains(it.key()))
            throw ConfigError("unknown config key '" + where + it.key() + "'");
    }
}

double num_at(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

void load_config(Options& opt, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    const json schema = schema_description();
    check_known_keys(cfg, schema, "");
    if (cfg.contains("system")) {
        const json& s = cfg["system"];
        check_known_keys(s, schema["system"], "system.");
        if (s.contains("family")) opt.family = s["family"].get<std::string>();
        if (s.contains("lambda")) {
            opt.lambda_re = s["lambda"].at(0).get<double>();
            opt.lambda_im = s["lambda"].at(1).get<double>();
        }
        if (s.contains("mu")) {
            opt.mu_re = s["mu"].at(0).get<double>();
            opt.mu_im = s["mu"].at(1).get<double>();
        }
        opt.p0 = num_at(s, "p0", opt.p0);
    }
    if (cfg.contains("run")) {
        const json& r = cfg["run"];
        check_known_keys(r, schema["run"], "run.");
        if (r.contains("seed")) opt.seed = r["seed"].get<std::uint64_t>();
        if (r.contains("n_steps")) opt.n_steps = r["n_steps"].get<long long>();
        if (r.contains("trials")) opt.trials = r["trials"].get<int>();
        opt.epsilon = num_at(r, "epsilon", opt.epsilon);
        opt.r_far = num_at(r, "r_far", opt.r_far);
        if (r.contains("burnin")) opt.burnin = r["burnin"].get<long long>();
        if (r.contains("cap")) opt.cap = r["cap"].get<long long>();
        if (r.contains("z0")) {
            opt.z0_re = r["z0"].at(0).get<double>();
            opt.z0_im = r["z0"].at(1).get<double>();
        }
        if (r.contains("samples")) opt.samples = r["samples"].get<int>();
        opt.s_inner = num_at(r, "s_inner", opt.s_inner);
        if (r.contains("k_top")) opt.k_top = r["k_top"].get<int>();
    }
    if (cfg.contains("probe")) {
        const json& p = cfg["probe"];
        check_known_keys(p, schema["probe"], "probe.");
        if (p.contains("qmax")) opt.qmax = p["qmax"].get<long long>();
        opt.tol = num_at(p, "tol", opt.tol);
        if (p.contains("depth")) opt.depth = p["depth"].get<int>();
        if (p.contains("cells")) opt.cells = p["cells"].get<int>();
        if (p.contains("k_series")) opt.k_series = p["k_series"].get<int>();
        opt.r_scale = num_at(p, "r_scale", opt.r_scale);
        if (p.contains("cycles")) opt.cycles = p["cycles"].get<int>();
        if (p.contains("curve_samples")) opt.curve_samples = p["curve_samples"].get<int>();
        if (p.contains("dedup_factor")) opt.dedup_factor = p["dedup_factor"].get<int>();
    }
    if (cfg.contains("output")) {
        const json& o = cfg["output"];
        check_known_keys(o, schema["output"], "output.");
        if (o.contains("directory")) opt.directory = o["directory"].get<std::string>();
        if (o.contains("trace")) opt.trace = o["trace"].get<bool>();
    }
}

json resolved_config(const Options& o) {
    return json{
        {"system", {{"family", o.family},
                    {"lambda", {o.lambda_re, o.lambda_im}},
                    {"mu", {o.mu_re, o.mu_im}},
                    {"p0", o.p0}}},
        {"run", {{"seed", o.seed}, {"n_steps", o.n_steps}, {"trials", o.trials},
                 {"epsilon", o.epsilon}, {"r_far", o.r_far}, {"burnin", o.burnin},
                 {"cap", o.cap}, {"z0", {o.z0_re, o.z0_im}},
                 {"samples", o.samples}, {"s_inner", o.s_inner}, {"k_top", o.k_top}}},
        {"probe", {{"qmax", o.qmax}, {"tol", o.tol}, {"depth", o.depth},
                   {"cells", o.cells}, {"k_series", o.k_series},
                   {"r_scale", o.r_scale}, {"cycles", o.cycles},
                   {"curve_samples", o.curve_samples},
                   {"dedup_factor", o.dedup_factor}}},
        {"output", {{"directory", o.directory}, {"trace", o.trace}}},
    };
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json hypothesis_json(const HypothesisReport& r) {
    json out{
        {"family", family_name(r.family)},
        {"parameter", complex_json(r.parameter)},
        {"p0", r.p0},
        {"lyapunov", r.lyapunov.multiplier_zero ? json(nullptr) : json(r.lyapunov.value)},
        {"lyapunov_multiplier_zero", r.lyapunov.multiplier_zero},
        {"lyapunov_positive", r.lyapunov_positive},
        {"p0_above_half", r.p0_above_half},
    };
    if (r.family == Family::critical) {
        out["lambda_in_unit_disc"] = r.lambda_in_unit_disc;
        out["lambda_nonreal"] = r.lambda_nonreal;
        out["density_theorem_applies"] = r.density_theorem_applies;
        out["intermittency_theorem_applies"] = r.intermittency_theorem_applies;
    } else if (r.family == Family::mobius) {
        out["mu_outside_unit_circle"] = r.mu_outside_unit_circle;
        out["mu_nonreal"] = r.mu_nonreal;
        out["mobius_theorem_applies"] = r.mobius_theorem_applies;
    }
    return out;
}

/// Collects emitted files and writes the closing manifest.
class Emitter {
public:
    Emitter(const Options& opt, const std::string& command)
        : dir_(opt.directory), command_(command) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        const std::string echo = resolved_config(opt).dump(2) + "\n";
        config_hash_ = fnv1a64(echo);
        write_text("resolved_config.json", echo);
    }

    fs::path path(const std::string& name) const { return fs::path(dir_) / name; }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream out(path(name), std::ios::binary);
        if (!out) fail(ErrorCode::io, "cannot write " + path(name).string());
        out << text;
        out.close();
        files_.push_back(name);
    }

    void write_json(const std::string& name, const json& j) {
        write_text(name, j.dump(2) + "\n");
    }

    CsvWriter csv(const std::string& name) {
        files_.push_back(name);
        return CsvWriter(path(name).string());
    }

    void finish() {
        json manifest{{"command", command_},
                      {"config_hash", config_hash_str()},
                      {"files", json::array()}};
        for (const std::string& name : files_) {
            std::ifstream in(path(name), std::ios::binary);
            std::string data((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            manifest["files"].push_back(json{{"name", name},
                                             {"bytes", data.size()},
                                             {"fnv1a64", hex64(fnv1a64(data))},
                                             {"config_hash", config_hash_str()}});
        }
        write_json("manifest.json", manifest);
    }

private:
    static std::string hex64(std::uint64_t v) {
        char buf[19];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }
    std::string config_hash_str() const { return hex64(config_hash_); }

    std::string dir_;
    std::string command_;
    std::uint64_t config_hash_ = 0;
    std::vector<std::string> files_;
};

IfsSystem build_system(const Options& opt) {
    if (opt.family == "critical") return make_critical(opt.lambda(), opt.p0);
    if (opt.family == "mobius") return make_mobius(opt.mu());
    if (opt.family == "logistic") return make_logistic(opt.p0);
    fail(ErrorCode::invalid_parameter, "unknown family " + opt.family);
}

void gate_hypotheses(const Options& opt, const HypothesisReport& rep,
                     bool need_intermittency, bool need_density) {
    if (opt.force) return;
    std::string missing;
    if (rep.family == Family::critical) {
        if (need_intermittency && !rep.intermittency_theorem_applies)
            missing = "intermittency hypotheses (lambda in B(0,1)\\R, positive exponent, p0 > 1/2)";
        if (need_density && !rep.density_theorem_applies)
            missing = "density hypotheses (lambda in B(0,1)\\R)";
    } else if (rep.family == Family::mobius) {
        if ((need_intermittency || need_density) && !rep.mobius_theorem_applies)
            missing = "mobius hypotheses (|mu| > 1, mu nonreal, p0 = 1/2)";
    }
    if (!missing.empty())
        throw HypothesisViolation("outside " + missing + "; rerun with --force to proceed");
}

void emit_occupation(Emitter& em, const OccupationResult& res) {
    CsvWriter csv = em.csv("occupation.csv");
    csv.header({"trial", "fraction"});
    for (size_t t = 0; t < res.fractions.size(); ++t)
        csv.row({CsvWriter::cell(static_cast<long long>(t)),
                 CsvWriter::cell(res.fractions[t])});
    json collapsed = json::array();
    for (long long c : res.collapsed_at) collapsed.push_back(c);
    em.write_json("occupation_summary.json",
                  json{{"epsilon", res.epsilon},
                       {"n_steps", res.n_steps},
                       {"trials", res.fractions.size()},
                       {"mean", res.mean},
                       {"median", res.median},
                       {"collapsed_at", collapsed}});
}

// -------------------------------------------------------------------------
// subcommand bodies
// -------------------------------------------------------------------------

void cmd_simulate(const Options& opt) {
    Emitter em(opt, "simulate");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));

    SymbolStream stream(opt.seed, 0, sys.p0);
    struct Tracer {
        CsvWriter* csv = nullptr;
        void visit(long long n, int sym, const SpherePoint& z) {
            if (!csv) return;
            const bool inf = z.is_infinity();
            csv->row({CsvWriter::cell(n), CsvWriter::cell(sym),
                      CsvWriter::cell(inf ? 0.0 : z.to_complex().real()),
                      CsvWriter::cell(inf ? 0.0 : z.to_complex().imag()),
                      CsvWriter::cell(z.planar_abs()),
                      CsvWriter::cell(chordal_distance(z, SpherePoint::zero()))});
        }
    } tracer;

    RunResult run;
    if (opt.trace) {
        CsvWriter csv = em.csv("trace.csv");
        csv.header({"step", "symbol", "re", "im", "abs_z", "chordal_to_zero"});
        tracer.csv = &csv;
        run = run_orbit(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}), stream,
                        opt.n_steps, true, tracer);
    } else {
        run = run_orbit(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}), stream,
                        opt.n_steps, true);
    }

    const SpherePoint& z = run.state.point;
    em.write_json(
        "summary.json",
        json{{"n_steps", run.state.n},
             {"final", z.is_infinity() ? json("infinity")
                                       : complex_json(z.to_complex())},
             {"log_tangent", run.state.log_tangent},
             {"finite_time_lyapunov",
              run.state.n ? json(finite_time_lyapunov(run.state)) : json(nullptr)},
             {"collapsed_at", run.collapsed_at}});
    em.finish();
}

void cmd_occupation(const Options& opt) {
    Emitter em(opt, "occupation");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, true, false);
    const OccupationResult res =
        occupation_fraction(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}),
                            opt.epsilon, opt.n_steps, opt.trials, opt.seed,
                            opt.threads);
    emit_occupation(em, res);
    em.finish();
}

void cmd_sojourn(const Options& opt) {
    Emitter em(opt, "sojourn");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, true, false);

    SymbolStream stream(opt.seed, 0, sys.p0);
    const SojournRecord rec =
        sojourn_decomposition(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}),
                              opt.epsilon, opt.r_far, opt.n_steps, stream);

    CsvWriter csv = em.csv("sojourn.csv");
    csv.header({"k", "T2k_minus_1", "T2k", "eta_k", "xi_k"});
    const size_t pairs = std::min(rec.eta.size(), rec.xi.size());
    for (size_t k = 0; k < pairs; ++k)
        csv.row({CsvWriter::cell(static_cast<long long>(k + 1)),
                 CsvWriter::cell(rec.escape_times[2 * k]),
                 CsvWriter::cell(rec.escape_times[2 * k + 1]),
                 CsvWriter::cell(rec.eta[k]), CsvWriter::cell(rec.xi[k])});

    const long long eta_sum = std::accumulate(rec.eta.begin(), rec.eta.end(), 0LL);
    const long long xi_sum = std::accumulate(rec.xi.begin(), rec.xi.end(), 0LL);
    em.write_json(
        "sojourn_summary.json",
        json{{"steps", rec.steps},
             {"starts_in_w", rec.starts_in_w},
             {"single_phase", rec.single_phase},
             {"laminar_phases", rec.eta.size()},
             {"bursts", rec.xi.size()},
             {"mean_eta", rec.eta.empty() ? json(nullptr)
                                          : json(double(eta_sum) / rec.eta.size())},
             {"mean_xi", rec.xi.empty() ? json(nullptr)
                                        : json(double(xi_sum) / rec.xi.size())},
             {"eta_tilde", rec.eta_tilde},
             {"xi_tilde", rec.xi_tilde},
             {"occupation_identity_residual", occupation_identity_residual(rec)},
             {"collapsed_at", rec.collapsed_at}});
    em.finish();
}

void emit_rank_value(Emitter& em, const std::string& name,
                     std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<double>());
    CsvWriter csv = em.csv(name);
    csv.header({"rank", "value"});
    for (size_t i = 0; i < values.size(); ++i)
        csv.row({CsvWriter::cell(static_cast<long long>(i + 1)),
                 CsvWriter::cell(values[i])});
}

void cmd_kac(const Options& opt) {
    Emitter em(opt, "kac");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, true, false);

    const KacResult res = kac_return_times(sys, opt.s_inner, opt.samples,
                                           opt.cap, opt.seed, opt.threads);
    emit_rank_value(em, "tail.csv", res.return_times);

    json means = json::array();
    double acc = 0.0;
    for (size_t i = 0; i < res.return_times.size(); ++i) {
        acc += res.return_times[i];
        const size_t n = i + 1;
        if ((n & (n - 1)) == 0 || n == res.return_times.size())
            means.push_back(json{{"samples", n}, {"mean", acc / n}});
    }
    em.write_json("kac_summary.json",
                  json{{"s", res.s},
                       {"cap", res.cap},
                       {"samples", res.return_times.size()},
                       {"censored", res.censored_count},
                       {"running_means", means}});
    em.finish();
}

void cmd_tail(const Options& opt) {
    Emitter em(opt, "tail");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, true, false);

    // collect laminar durations over as many trials as needed
    std::vector<double> etas;
    int trial = 0;
    while (etas.size() < static_cast<size_t>(opt.samples) && trial < 100 * 1000) {
        SymbolStream stream(opt.seed, static_cast<std::uint64_t>(trial++), sys.p0);
        const SojournRecord rec =
            sojourn_decomposition(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}),
                                  opt.epsilon, opt.r_far,
                                  std::min<long long>(opt.n_steps, 200000), stream);
        for (long long e : rec.eta) etas.push_back(static_cast<double>(e));
    }
    etas.resize(static_cast<size_t>(opt.samples));
    emit_rank_value(em, "tail.csv", etas);

    const TailEstimate est = hill_tail_index(etas, opt.k_top, 200, opt.seed);
    em.write_json("tail_estimate.json",
                  json{{"samples", est.sample_count},
                       {"k", est.k},
                       {"alpha", est.alpha},
                       {"ci90", {est.ci_low, est.ci_high}},
                       {"mechanism_prediction", std::log2(1.0 / sys.p0)},
                       {"trials_used", trial}});
    em.finish();
}

void cmd_measure(const Options& opt) {
    Emitter em(opt, "measure");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, true, false);

    SymbolStream stream(opt.seed, 0, sys.p0);
    const CesaroResult res =
        empirical_cesaro_measure(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}),
                                 opt.n_steps, opt.burnin, opt.cells, 0.2, stream);

    CsvWriter csv = em.csv("histogram.csv");
    csv.header({"bin", "lat_lo", "lat_hi", "lon_lo", "lon_hi", "mass"});
    const EqualAreaScheme& scheme = res.hist.scheme;
    for (int b = 0; b < scheme.bands; ++b)
        for (int l = 0; l < scheme.lons; ++l) {
            const int idx = b * scheme.lons + l;
            csv.row({CsvWriter::cell(static_cast<long long>(idx)),
                     CsvWriter::cell(scheme.height_lo(b)),
                     CsvWriter::cell(scheme.height_hi(b)),
                     CsvWriter::cell(scheme.lon_lo(l)),
                     CsvWriter::cell(scheme.lon_hi(l)),
                     CsvWriter::cell(static_cast<double>(res.hist.counts[idx]) /
                                     static_cast<double>(res.hist.total))});
        }
    em.write_json("measure_summary.json",
                  json{{"n_steps", opt.n_steps},
                       {"burnin", opt.burnin},
                       {"cells", scheme.cells()},
                       {"near_radius_chordal", res.near_radius},
                       {"mass_near_zero", res.mass_near_zero},
                       {"collapsed_at", res.collapsed_at}});
    em.finish();
}

void cmd_coverage(const Options& opt) {
    Emitter em(opt, "coverage");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, false, true);

    const CoverageReport repo =
        coverage_probe(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}), opt.depth,
                       opt.cells, opt.dedup_factor);
    CsvWriter csv = em.csv("coverage.csv");
    csv.header({"depth", "visited", "total", "fraction"});
    for (const auto& [d, v] : repo.visited_by_depth)
        csv.row({CsvWriter::cell(d), CsvWriter::cell(v),
                 CsvWriter::cell(repo.cells_total),
                 CsvWriter::cell(static_cast<double>(v) / repo.cells_total)});
    em.write_json("coverage_summary.json",
                  json{{"cells", repo.cells_total},
                       {"visited", repo.cells_visited},
                       {"fraction", repo.fraction},
                       {"depth", repo.depth_reached},
                       {"points_generated", repo.points_generated},
                       {"partial", repo.partial}});
    em.finish();
}

void cmd_classify(const Options& opt) {
    Emitter em(opt, "classify-lambda");
    const LambdaClassification c =
        classify_lambda(opt.lambda(), opt.qmax, opt.tol);
    json out{{"lambda", {opt.lambda_re, opt.lambda_im}},
             {"class", kind_name(c.kind)}};
    if (c.kind == LambdaClassification::Kind::radial_lines) out["k"] = c.k;
    if (c.kind == LambdaClassification::Kind::concentric_circles)
        out["log_step"] = c.log_step;
    if (c.kind == LambdaClassification::Kind::discrete) {
        out["m"] = c.m;
        out["n"] = c.n;
    }
    out["angle"] =
        c.angle_rational
            ? json{{"rational", {c.angle_rational->p, c.angle_rational->q}}}
            : json{{"rational", nullptr}};
    out["modulus"] = json{{"dependent", c.modulus_dependent}};
    if (c.modulus_rational)
        out["modulus"]["rational"] = {c.modulus_rational->p, c.modulus_rational->q};
    out["qmax"] = opt.qmax;
    out["tol"] = opt.tol;
    em.write_json("classification.json", out);
    em.finish();
}

void cmd_linearize(const Options& opt) {
    Emitter em(opt, "linearize");
    const IfsSystem sys = make_critical(opt.lambda(), opt.p0);
    const RationalMap& map = opt.map_name == "f1" ? sys.map1 : sys.map0;
    const TruncatedSeries target = taylor_at_zero(map, opt.k_series);
    const TruncatedSeries phi = koenigs_linearizer(target);
    const TruncatedSeries other = taylor_at_zero(
        opt.map_name == "f1" ? sys.map0 : sys.map1, opt.k_series);
    const Complex other_mult = other.coeff(1);
    const TruncatedSeries resid = linearization_residual(phi, other, other_mult);

    auto series_json = [](const TruncatedSeries& s) {
        json arr = json::array();
        for (int j = 1; j <= s.order(); ++j) arr.push_back(complex_json(s.coeff(j)));
        return arr;
    };
    em.write_json("linearize.json",
                  json{{"map", opt.map_name},
                       {"K", opt.k_series},
                       {"lambda", {opt.lambda_re, opt.lambda_im}},
                       {"phi", series_json(phi)},
                       {opt.map_name == "f1" ? "residual_f0" : "residual_f1",
                        series_json(resid)}});
    em.finish();
}

void cmd_curve(const Options& opt) {
    Emitter em(opt, "curve");
    const CurveResult res = unit_circle_curve(opt.lambda(), opt.curve_samples);
    CsvWriter csv = em.csv("curve.csv");
    csv.header({"theta", "re", "im", "abs"});
    for (const CurveSample& s : res.samples)
        csv.row({CsvWriter::cell(s.theta), CsvWriter::cell(s.value.real()),
                 CsvWriter::cell(s.value.imag()), CsvWriter::cell(s.abs)});
    em.write_json("curve_summary.json",
                  json{{"lambda", {opt.lambda_re, opt.lambda_im}},
                       {"samples", res.samples.size()},
                       {"circle_crossings_excluding_w1", res.crossings}});
    em.finish();
}

void cmd_invariants(const Options& opt) {
    Emitter em(opt, "invariants-check");
    const auto verdicts = invariant_candidate_check(opt.lambda(), opt.tol);
    json sets = json::array();
    int invariant_count = 0;
    for (const auto& v : verdicts) {
        json elems = json::array(), images = json::array();
        for (const Complex& e : v.elements) elems.push_back(complex_json(e));
        for (const Complex& i : v.images) images.push_back(complex_json(i));
        sets.push_back(json{{"set", v.name},
                            {"elements", elems},
                            {"f1_images", images},
                            {"invariant", v.invariant}});
        invariant_count += v.invariant;
    }
    em.write_json("invariant_sets.json",
                  json{{"lambda", {opt.lambda_re, opt.lambda_im}},
                       {"invariant_sets_found", invariant_count},
                       {"sets", sets}});
    em.finish();
}

void cmd_probe(const Options& opt) {
    Emitter em(opt, "probe-nonnormal");
    const IfsSystem sys = make_critical(opt.lambda(), opt.p0);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, false, true);

    const NonNormalityResult res =
        non_normality_probe(opt.lambda(), opt.r_scale, opt.cycles);
    CsvWriter csv = em.csv("ratios.csv");
    csv.header({"n", "symbol", "ratio"});
    csv.row({CsvWriter::cell(0LL), CsvWriter::cell(std::string("-")),
             CsvWriter::cell(res.ratios[0])});
    for (size_t i = 0; i < res.symbols.size(); ++i)
        csv.row({CsvWriter::cell(static_cast<long long>(i + 1)),
                 CsvWriter::cell(static_cast<int>(res.symbols[i])),
                 CsvWriter::cell(res.ratios[i + 1])});
    em.write_json("probe_summary.json",
                  json{{"lambda", {opt.lambda_re, opt.lambda_im}},
                       {"r", opt.r_scale},
                       {"cycles", res.cycles},
                       {"growth", res.growth},
                       {"increasing_on_g0_blocks", res.increasing_on_g0_blocks},
                       {"max_truncation_disagreement",
                        res.max_truncation_disagreement}});
    em.finish();
}

void cmd_mobius(Options opt) {
    opt.family = "mobius";
    Emitter em(opt, "mobius");
    const IfsSystem sys = build_system(opt);
    const HypothesisReport rep = check_hypotheses(sys);
    em.write_json("hypothesis.json", hypothesis_json(rep));
    gate_hypotheses(opt, rep, true, false);

    const OccupationResult occ =
        occupation_fraction(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}),
                            opt.epsilon, opt.n_steps, opt.trials, opt.seed,
                            opt.threads);
    emit_occupation(em, occ);
    SymbolStream stream(opt.seed, 0, sys.p0);
    const CesaroResult ces =
        empirical_cesaro_measure(sys, SpherePoint(opt.z0(), Complex{1.0, 0.0}),
                                 opt.n_steps, opt.burnin, opt.cells, 0.2, stream);
    em.write_json("measure_summary.json",
                  json{{"mass_near_zero", ces.mass_near_zero},
                       {"collapsed_at", ces.collapsed_at}});
    em.finish();
}

void cmd_logistic(Options opt) {
    opt.family = "logistic";
    Emitter em(opt, "logistic");
    const IfsSystem sys = build_system(opt);
    em.write_json("hypothesis.json", hypothesis_json(check_hypotheses(sys)));

    // run the experiment in both probability orders to document which regime
    // concentrates (and how fast it absorbs at double precision); the
    // interval system lives on the real axis, so only Re z0 is used
    json runs = json::array();
    const SpherePoint start = SpherePoint::from(Complex{opt.z0_re, 0.0});
    for (const double g2_prob : {opt.p0, 1.0 - opt.p0}) {
        const IfsSystem s = make_logistic(g2_prob);
        const OccupationResult res = occupation_fraction(
            s, start, opt.epsilon, opt.n_steps, opt.trials, opt.seed,
            opt.threads);
        std::vector<long long> collapse(res.collapsed_at);
        std::sort(collapse.begin(), collapse.end());
        runs.push_back(json{{"g2_probability", g2_prob},
                            {"median_fraction", res.median},
                            {"median_absorption_step",
                             collapse[collapse.size() / 2]}});
    }
    const double med0 = runs[0]["median_fraction"].get<double>();
    const double med1 = runs[1]["median_fraction"].get<double>();
    const long long abs0 = runs[0]["median_absorption_step"].get<long long>();
    const long long abs1 = runs[1]["median_absorption_step"].get<long long>();
    std::string verdict;
    if (abs0 >= 0 && abs1 >= 0)
        verdict = abs0 <= abs1
                      ? "both regimes absorb at double precision; the higher g2 "
                        "probability absorbs faster"
                      : "both regimes absorb at double precision; the lower g2 "
                        "probability absorbs faster";
    else
        verdict = med0 >= med1 ? "higher g2 probability concentrates more"
                               : "lower g2 probability concentrates more";
    em.write_json("logistic_comparison.json",
                  json{{"epsilon", opt.epsilon},
                       {"n_steps", opt.n_steps},
                       {"runs", runs},
                       {"verdict", verdict}});
    em.finish();
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    std::string config_path;

    if (const char* env_dir = std::getenv("RIFS_LAB_OUT"); env_dir && *env_dir)
        opt.directory = env_dir;

    // pre-pass: pick up --config so the full option set can default from it
    {
        CLI::App pre;
        pre.allow_extras();
        pre.set_help_flag();
        pre.add_option("--config", config_path);
        try {
            pre.parse(argc, argv);
        } catch (const CLI::ParseError&) {
        }
    }
    if (!config_path.empty()) {
        try {
            load_config(opt, config_path);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return exit_config;
        }
    }

    CLI::App app{"rifs-lab: random iterated function systems of rational maps "
                 "on the Riemann sphere"};
    app.require_subcommand(1);
    app.fallthrough(true);
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", opt.directory, "output directory");
    app.add_option("--seed", opt.seed, "master seed");
    app.add_option("--threads", opt.threads, "worker bound (results independent)");
    app.add_flag("--force", opt.force, "run outside theorem hypotheses");
    app.add_option("--family", opt.family, "critical | mobius | logistic");
    app.add_option("--re", opt.lambda_re, "Re lambda");
    app.add_option("--im", opt.lambda_im, "Im lambda");
    app.add_option("--mu-re", opt.mu_re, "Re mu");
    app.add_option("--mu-im", opt.mu_im, "Im mu");
    app.add_option("--p0", opt.p0, "probability of map 0");
    app.add_option("--n", opt.n_steps, "steps per orbit");
    app.add_option("--trials", opt.trials, "trial count");
    app.add_option("--epsilon", opt.epsilon, "radius of the ball around 0");
    app.add_option("--r-far", opt.r_far, "far-field radius");
    app.add_option("--burnin", opt.burnin, "burn-in steps");
    app.add_option("--cap", opt.cap, "return-time cap");
    app.add_option("--z0-re", opt.z0_re, "Re z0");
    app.add_option("--z0-im", opt.z0_im, "Im z0");
    app.add_option("--samples", opt.samples, "sample count");
    app.add_option("--s", opt.s_inner, "inner annulus radius");
    app.add_option("--k-top", opt.k_top, "Hill order statistics count");
    app.add_option("--qmax", opt.qmax, "rational approximation qmax");
    app.add_option("--tol", opt.tol, "rational approximation tolerance");
    app.add_option("--depth", opt.depth, "coverage word depth");
    app.add_option("--cells", opt.cells, "equal-area cell count");
    app.add_option("--order,-K", opt.k_series, "series truncation order");
    app.add_option("--r-scale", opt.r_scale, "non-normality probe scale");
    app.add_option("--cycles", opt.cycles, "cone cycles");
    app.add_option("--curve-samples", opt.curve_samples, "unit-circle samples");
    app.add_option("--dedup", opt.dedup_factor, "coverage dedup refinement");
    app.add_option("--map", opt.map_name, "f0 or f1 (linearize)");

    auto* sim = app.add_subcommand("simulate", "run one orbit");
    sim->add_flag("--trace", opt.trace, "write the orbit trace CSV");
    const char* names[] = {"occupation", "sojourn", "kac", "tail", "measure",
                           "coverage", "classify-lambda", "linearize", "curve",
                           "invariants-check", "probe-nonnormal", "mobius",
                           "logistic"};
    const char* briefs[] = {"occupation fractions of B(0,epsilon)",
                            "laminar/burst decomposition of one orbit",
                            "return times to the annulus section",
                            "Hill tail index of laminar durations",
                            "empirical Cesaro measure histogram",
                            "semigroup-orbit coverage probe",
                            "classify closure{2^m lambda^n}",
                            "Koenigs linearizer coefficients",
                            "image of the unit circle under f1 (w-chart)",
                            "the 11 candidate invariant sets",
                            "tangent-ratio growth along the cone policy",
                            "preset: mobius system experiments",
                            "preset: logistic cross-check, both orders"};
    sim->fallthrough(true);
    for (size_t i = 0; i < std::size(names); ++i)
        app.add_subcommand(names[i], briefs[i])->fallthrough(true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return exit_config;
    }

    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "simulate") cmd_simulate(opt);
        else if (cmd == "occupation") cmd_occupation(opt);
        else if (cmd == "sojourn") cmd_sojourn(opt);
        else if (cmd == "kac") cmd_kac(opt);
        else if (cmd == "tail") cmd_tail(opt);
        else if (cmd == "measure") cmd_measure(opt);
        else if (cmd == "coverage") cmd_coverage(opt);
        else if (cmd == "classify-lambda") cmd_classify(opt);
        else if (cmd == "linearize") cmd_linearize(opt);
        else if (cmd == "curve") cmd_curve(opt);
        else if (cmd == "invariants-check") cmd_invariants(opt);
        else if (cmd == "probe-nonnormal") cmd_probe(opt);
        else if (cmd == "mobius") cmd_mobius(opt);
        else if (cmd == "logistic") cmd_logistic(opt);
        else {
            std::cerr << "unknown subcommand " << cmd << "\n";
            return exit_config;
        }
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return exit_hypothesis;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::invalid_parameter ? exit_config
                                                        : exit_runtime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}
