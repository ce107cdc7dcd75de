#include "commands.hpp"

#include "conemult/besicovitch.hpp"
#include "conemult/jordan.hpp"
#include "conemult/multiplier.hpp"
#include "conemult/rng.hpp"
#include "conemult/szego.hpp"
#include "conemult/validate.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace conemult::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
    return s;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json load_config(const fs::path& p) {
    try {
        json j = json::parse(read_file(p));
        if (!j.is_object()) throw UsageError("config must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw UsageError("config " + p.string() + ": " + e.what());
    }
}

json RunManifest::to_json() const {
    json steps_j = json::array();
    for (const auto& s : steps) steps_j.push_back({{"name", s.name}, {"ms", s.ms}});
    json out_j = json::array();
    for (const auto& [file, digest] : outputs) out_j.push_back({{"file", file}, {"fnv1a64", digest}});
    return {{"tool", "conemult"},
            {"version", kToolVersion},
            {"command", command},
            {"config_hash", config_hash},
            {"steps", steps_j},
            {"outputs", out_j}};
}

namespace {

class Timer {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Schema check: rejects unknown keys up front and converts type errors into usage errors.
class ConfigReader {
public:
    ConfigReader(const json& j, std::set<std::string> allowed) : j_(j) {
        for (const auto& [key, value] : j.items())
            if (!allowed.count(key)) throw UsageError("unknown config key '" + key + "'");
    }

    template <typename T>
    T get(const std::string& key, T fallback) const {
        if (!j_.contains(key)) return fallback;
        return as<T>(key);
    }

    template <typename T>
    T require(const std::string& key) const {
        if (!j_.contains(key)) throw UsageError("config key '" + key + "' is required");
        return as<T>(key);
    }

private:
    template <typename T>
    T as(const std::string& key) const {
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw UsageError("config key '" + key + "': " + e.what());
        }
    }
    const json& j_;
};

void write_output(const fs::path& dir, const std::string& name, const std::string& content, RunManifest& m) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
    out.close();
    m.outputs.emplace_back(name, hex64(fnv1a64(content)));
}

void record_existing(const fs::path& dir, const std::string& name, RunManifest& m) {
    m.outputs.emplace_back(name, hex64(fnv1a64(read_file(dir / name))));
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << m.to_json().dump(2) << '\n';
}

fs::path prepare_dir(const std::string& dir) {
    const fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::string join(const Eigen::VectorXd& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
    return s;
}

} // namespace

RunManifest cmd_besicovitch(int k, const fs::path& out_dir, double h, std::ostream& log) {
    if (k < 0 || k > kMaxLevel) throw UsageError("k must lie in [0, " + std::to_string(kMaxLevel) + "]");
    if (!(h > 0)) throw UsageError("raster step must be positive");
    RunManifest m;
    m.command = "besicovitch";
    m.config_hash = hex64(fnv1a64(json{{"k", k}, {"h", h}}.dump()));
    fs::create_directories(out_dir);

    Timer t_build;
    const RectangleFamily fam = build_perron_rectangles(k);
    const BoxFamily boxes = build_boxes(fam);
    m.steps.push_back({"build", t_build.ms()});

    Timer t_measure;
    const Measure u = union_measure(fam, h);
    double area = 0;
    for (const auto& r : fam.rects) area += r.area();
    const bool rect_disjoint = translates_disjoint(fam);
    const bool box_disjoint = translates_disjoint(boxes);
    auto checks = family_check(fam);
    for (auto& c : box_geometry_check(boxes)) checks.push_back(std::move(c));
    m.steps.push_back({"measure", t_measure.ms()});
    for (const auto& c : checks)
        if (!c.pass) log << "geometry check failed: " << c.name << " " << c.detail << '\n';

    const std::string stem = "family_k" + std::to_string(k);
    const json doc{{"rectangles", to_json(fam)}, {"boxes", to_json(boxes)}};
    write_output(out_dir, stem + ".json", doc.dump(2) + "\n", m);
    write_output(out_dir, stem + ".svg", to_svg(fam), m);
    std::string csv = "k,N,shift,total_area,union_measure,union_error,eps_hat,translates_disjoint,boxes_disjoint,geometry_ok\n";
    csv += std::to_string(k) + "," + std::to_string(fam.N) + "," + format_double(fam.shift) + "," + format_double(area) + "," +
           format_double(u.measure) + "," + format_double(u.error_bound) + "," + format_double(u.upper()) + "," +
           (rect_disjoint ? "1" : "0") + "," + (box_disjoint ? "1" : "0") + "," + (all_pass(checks) ? "1" : "0") + "\n";
    write_output(out_dir, "stats_k" + std::to_string(k) + ".csv", csv, m);
    write_manifest(out_dir, m);
    log << "k=" << k << " N=" << fam.N << " eps_hat=" << format_double(u.upper()) << '\n';
    if (!all_pass(checks)) throw ConstructionFailed("geometry checks failed for k = " + std::to_string(k));
    return m;
}

RunManifest cmd_ratio(const json& config, bool fast, std::ostream& log) {
    const ConfigReader cfg(config, {"seed", "out_dir", "k_list", "p_list", "mc_samples", "union_h", "lhs_tol", "c_p",
                                    "record_wall_ms"});
    RatioConfig rc;
    rc.sf.seed = cfg.require<std::uint64_t>("seed");
    const fs::path dir = prepare_dir(cfg.require<std::string>("out_dir"));
    rc.k_list = cfg.get("k_list", rc.k_list);
    rc.p_list = cfg.get("p_list", rc.p_list);
    rc.sf.mc_samples = cfg.get<std::uint64_t>("mc_samples", rc.sf.mc_samples);
    rc.sf.union_h = cfg.get("union_h", rc.sf.union_h);
    rc.sf.lhs_tol = cfg.get("lhs_tol", rc.sf.lhs_tol);
    rc.c_p = cfg.get("c_p", rc.c_p);
    const bool record_wall = cfg.get("record_wall_ms", false);

    for (int k : rc.k_list)
        if (k < 0 || k > kMaxLevel) throw UsageError("k_list entries must lie in [0, " + std::to_string(kMaxLevel) + "]");
    for (double p : rc.p_list) {
        if (!(p >= 1 && p <= 2)) throw UsageError("p_list entries must lie in [1, 2)");
        if (p == 2) rc.sf.allow_control = true;
    }
    if (!(rc.c_p > 0)) throw UsageError("c_p must be positive");
    if (rc.sf.mc_samples < 10000) throw UsageError("mc_samples must be at least 10^4");
    // the square-function estimator needs 10^4 samples, so fast mode stops halving there
    if (fast) rc.sf.mc_samples = std::max<std::uint64_t>(10000, rc.sf.mc_samples / 2);

    RunManifest m;
    m.command = "ratio";
    m.config_hash = hex64(fnv1a64(config.dump()));

    // rows are flushed as they are computed so a failure leaves the finished ones on disk
    std::ofstream csv(dir / "ratio.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "ratio.csv").string());
    csv << csv_header() << std::flush;
    std::map<double, std::vector<ExperimentReport>> by_p;
    for (int k : rc.k_list) {
        Timer t_k;
        const BoxFamily boxes = build_boxes(build_perron_rectangles(k));
        const double eps = union_measure(boxes, rc.sf.union_h).upper();
        m.steps.push_back({"k=" + std::to_string(k) + " eps_hat", t_k.ms()});
        for (double p : rc.p_list) {
            Timer t_p;
            ExperimentReport r = make_report(square_function_v2(boxes, p, rc.sf, eps), rc.c_p);
            const double ms = t_p.ms();
            if (record_wall) r.wall_ms = ms;
            m.steps.push_back({"k=" + std::to_string(k) + " p=" + format_double(p), ms});
            csv << csv_row(r) << std::flush;
            if (r.sf.mc_flagged) log << "warning: Monte Carlo standard error above 10% at k=" << k << " p=" << p << '\n';
            log << "k=" << k << " p=" << format_double(p) << " ratio_holder=" << format_double(r.ratio_holder) << '\n';
            by_p[p].push_back(r);
        }
    }
    csv.close();
    record_existing(dir, "ratio.csv", m);

    for (const auto& [p, rows] : by_p) {
        std::string dat = "# k ratio_holder ratio p=" + format_double(p) + "\n";
        for (const auto& r : rows)
            dat += std::to_string(r.sf.k) + " " + format_double(r.ratio_holder) + " " + format_double(r.ratio) + "\n";
        write_output(dir, "ratio_holder_p" + format_double(p) + ".dat", dat, m);
    }
    write_manifest(dir, m);
    return m;
}

RunManifest cmd_szego(const json& config, bool fast, std::ostream& log) {
    const ConfigReader cfg(config, {"seed", "out_dir", "n", "kernel_samples", "tol", "budget", "conformal_samples",
                                    "relation_pairs"});
    const auto seed = cfg.require<std::uint64_t>("seed");
    const fs::path dir = prepare_dir(cfg.require<std::string>("out_dir"));
    const int n = cfg.get("n", 3);
    long samples = cfg.get("kernel_samples", 20L);
    long conformal = cfg.get("conformal_samples", 10000L);
    int pairs = cfg.get("relation_pairs", 11);
    KernelOptions opt;
    opt.tol = cfg.get("tol", opt.tol);
    opt.budget = cfg.get("budget", opt.budget);
    if (n < 3) throw UsageError("n must be at least 3");
    if (samples < 2 || conformal < 1 || pairs < 2) throw UsageError("sample counts too small");
    if (!(opt.tol > 0) || opt.budget < 1) throw UsageError("tol and budget must be positive");
    if (fast) {
        samples = std::max(2L, samples / 2);
        conformal = std::max(1L, conformal / 2);
        pairs = std::max(2, pairs / 2);
    }

    RunManifest m;
    m.command = "szego";
    m.config_hash = hex64(fnv1a64(config.dump()));
    const Algebra A = Algebra::spin(n);

    Timer t_kernel;
    RngStream g(seed, 0x5a);
    std::string csv = "sample,method,z_re,z_im,u,value_re,value_im,error,evaluations\n";
    std::vector<cplx> scaled;
    for (long s = 0; s < samples; ++s) {
        Vec<cplx> c(n);
        Eigen::VectorXd yp(n - 1);
        for (int j = 0; j < n - 1; ++j) yp[j] = g.normal();
        c[0] = cplx(g.uniform(-2, 2), yp.norm() + 0.05 + g.uniform());
        for (int j = 1; j < n; ++j) c[j] = cplx(g.uniform(-2, 2), yp[j - 1]);
        const ComplexElement z{A, c};
        RealElement u{A, Vec<double>(n)};
        for (int j = 0; j < n; ++j) u[j] = g.normal();
        for (const auto& k : {szego_kernel_quadrature(z, u, opt), szego_kernel_closed_form(z, u)}) {
            csv += std::to_string(s) + "," + k.method + "," + join(k.z.coords.real()) + "," + join(k.z.coords.imag()) + "," +
                   join(k.u.coords) + "," + format_double(k.value.real()) + "," + format_double(k.value.imag()) + "," +
                   format_double(k.error) + "," + std::to_string(k.evaluations) + "\n";
            if (k.method != "closed_form") scaled.push_back(k.value * tube_power(z - complexify(u), n / 2.0));
        }
    }
    cplx mean = 0;
    for (auto v : scaled) mean += v;
    mean /= static_cast<double>(scaled.size());
    double var = 0;
    for (auto v : scaled) var += std::norm(v - mean);
    const double cv = std::sqrt(var / (scaled.size() - 1)) / std::abs(mean);
    m.steps.push_back({"kernel samples", t_kernel.ms()});

    Timer t_conf;
    const auto conf = conformal_consistency_check(n, conformal, seed);
    m.steps.push_back({"conformal check", t_conf.ms()});

    Timer t_rel;
    const auto rel = kernel_relation_check(n, pairs, seed, opt);
    m.steps.push_back({"kernel relation", t_rel.ms()});

    double worst = 0;
    for (double r : rel.residuals) worst = std::max(worst, r);
    const json summary{{"n", n},
                       {"light_cone_constant", szego_light_cone_constant(n)},
                       {"power_law_constant", {mean.real(), mean.imag()}},
                       {"power_law_cv", cv},
                       {"conformal",
                        {{"forward_samples", conf.forward_samples},
                         {"forward_failures", conf.forward_failures},
                         {"reverse_samples", conf.reverse_samples},
                         {"reverse_failures", conf.reverse_failures},
                         {"min_forward_margin", conf.min_forward_margin}}},
                       {"kernel_relation", {{"c0", rel.c0}, {"residuals", rel.residuals}, {"max_residual", worst}}}};
    write_output(dir, "kernel_samples.csv", csv, m);
    write_output(dir, "szego_summary.json", summary.dump(2) + "\n", m);
    write_manifest(dir, m);
    log << "n=" << n << " power_law_cv=" << format_double(cv) << " conformal_failures="
        << conf.forward_failures + conf.reverse_failures << " relation_max_residual=" << format_double(worst) << '\n';
    return m;
}

int cmd_validate(const std::string& suite, bool fast, std::uint64_t seed, double boundary_value, std::ostream& out) {
    std::vector<std::pair<std::string, std::vector<Check>>> runs;
    if (suite == "jordan" || suite == "all") runs.emplace_back("jordan", validate_jordan(fast, seed));
    if (suite == "engine" || suite == "all") runs.emplace_back("engine", validate_engine(fast, boundary_value, seed));
    if (suite == "szego" || suite == "all") runs.emplace_back("szego", validate_szego(fast, seed));
    if (runs.empty()) throw UsageError("unknown suite '" + suite + "'");

    std::size_t total = 0;
    for (const auto& r : runs) total += r.second.size();
    out << "TAP version 13\n1.." << total << '\n';
    std::size_t i = 0;
    bool ok = true;
    for (const auto& [name, checks] : runs)
        for (const auto& c : checks) {
            out << (c.pass ? "ok " : "not ok ") << ++i << " - " << name << ": " << c.name;
            if (!c.detail.empty()) out << " # " << c.detail;
            out << '\n';
            ok = ok && c.pass;
        }
    return ok ? kOk : kCheckFailure;
}

int cmd_jordan_check(const std::string& algebra, const std::vector<double>& coords, std::ostream& out) {
    const auto colon = algebra.find(':');
    if (colon == std::string::npos) throw UsageError("algebra must be spin:<n> or sym:<r>");
    const std::string kind = algebra.substr(0, colon);
    int size = 0;
    try {
        size = std::stoi(algebra.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("bad algebra size in '" + algebra + "'");
    }
    Algebra a;
    try {
        if (kind == "spin")
            a = Algebra::spin(size);
        else if (kind == "sym")
            a = Algebra::sym(size);
        else
            throw UsageError("algebra must be spin:<n> or sym:<r>");
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (static_cast<int>(coords.size()) != a.dim())
        throw UsageError(a.name() + " needs " + std::to_string(a.dim()) + " coordinates");
    Vec<double> c(a.dim());
    for (int i = 0; i < a.dim(); ++i) c[i] = coords[i];
    const RealElement x{a, c};
    const json doc{{"algebra", a.name()},
                   {"determinant", determinant(x)},
                   {"principal_minors", principal_minors(x, standard_frame(a))},
                   {"in_cone", cone_contains(x)}};
    out << doc.dump(2) << '\n';
    return kOk;
}

} // namespace conemult::cli
