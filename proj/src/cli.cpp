#include "gravwit/cli.hpp"

#include "gravwit/bisep.hpp"
#include "gravwit/csv.hpp"
#include "gravwit/dynamics.hpp"
#include "gravwit/model.hpp"
#include "gravwit/opdsl.hpp"
#include "gravwit/witness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

namespace gravwit::cli {

namespace {

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid number '" + s + "' in " + what);
    }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_double(item, what));
    return out;
}

FockSpace parse_cutoffs(const std::string& text) {
    const auto items = split_list(text);
    if (items.size() != 3) throw UsageError("--cutoffs expects three comma-separated integers, got '" + text + "'");
    std::array<std::size_t, 3> c{};
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = to_double(items[i], "--cutoffs");
        if (v < 1 || v != std::floor(v) || v > 64) throw UsageError("--cutoffs entries must be integers in [1, 64]");
        c[i] = static_cast<std::size_t>(v);
    }
    return make_space(c[0], c[1], c[2]);
}

std::string opt_number(const std::optional<double>& v) { return v ? csv::number(*v) : std::string(); }

// JSON config: every key mirrors a flag name with '_' for '-'. Values are
// injected ahead of the command-line arguments, so explicit flags win.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("invalid JSON in " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config") continue;
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        auto scalar = [](const nlohmann::json& v) -> std::string {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<long long>());
            if (v.is_number()) return csv::number(v.get<double>());
            throw UsageError("unsupported config value " + v.dump());
        };
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
            tokens.push_back(flag);
            tokens.push_back(joined);
        } else {
            tokens.push_back(flag);
            tokens.push_back(scalar(value));
        }
    }
    return tokens;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config requires a file path");
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (!path || args.empty()) return args;
    std::vector<std::string> out{args.front()};
    const auto tokens = config_tokens(*path);
    out.insert(out.end(), tokens.begin(), tokens.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

// ------------------------------------------------------------------ options

struct ConstantsFlags {
    PhysicalConstants k;
    void add(CLI::App* app) {
        app->add_option("--grav-constant", k.G, "Gravitational constant G, m^3 kg^-1 s^-2")->capture_default_str();
        app->add_option("--hbar", k.hbar, "Reduced Planck constant, J s")->capture_default_str();
        app->add_option("--light-speed", k.c, "Speed of light, m/s")->capture_default_str();
    }
};

double unit_factor(const std::string& units) { return units == "hz" ? 2.0 * std::numbers::pi : 1.0; }

struct WitnessFlags {
    ConstantsFlags constants;
    double omega_k = 0, omega_m = 0, t = 1.0, mu = 0, delta_zpf = 0;
    double e1 = 1.0 / std::numbers::sqrt2, e2 = 1.0 / std::numbers::sqrt2;
    double eps1 = 0, eps2 = 0;
    std::string units = "rad", mode = "analytic", cutoffs = "4,4,8", config;
    CLI::Option *o_omega_k{}, *o_omega_m{}, *o_t{}, *o_mu{}, *o_delta{}, *o_eps1{}, *o_eps2{};
};

constexpr const char* witness_columns =
    "mode,omega_k,omega_m,t,mu,delta_zpf,e1,e2,eps1,eps2,lhs_abs,o1,o2,o3,g1,g2,i_g1,i_g2,i_m";

constexpr const char* witness_footer = R"(CSV columns (header row always printed):
  mode         analytic | first-order | exact
  omega_k      graviton-mode angular frequency, rad/s (blank on the --eps path)
  omega_m      oscillator angular frequency, rad/s
  t            evolution time, s
  mu           oscillator mass, kg (blank if not given)
  delta_zpf    zero-point length sqrt(hbar/(2 mu omega_m)), m (blank without mu)
  e1, e2       polarization components e^1_11, e^2_11
  eps1, eps2   dimensionless couplings C'_i t / hbar
  lhs_abs      |<(1+g1)(1+g2)b^2>|
  o1, o2, o3   square-root terms of the biseparability bound
  g1, g2       witnesses lhs - (o1+o2+o3) and lhs - max(o1,o2,o3)
  i_g1, i_g2, i_m  inseparability values for g1|g2m, g2|g1m, m|g1g2)";

void write_witness_row(std::ostream& out, const std::string& mode, const std::optional<SystemParams>& p,
                       const std::optional<double>& delta, double eps1, double eps2, const WitnessReport& r) {
    out << witness_columns << '\n';
    std::optional<double> ok, om, t, mu, e1, e2;
    if (p) {
        ok = p->omega_k;
        om = p->omega_m;
        t = p->t;
        if (p->mu > 0) mu = p->mu;
        e1 = p->e1;
        e2 = p->e2;
    }
    csv::write_row(out, {mode, opt_number(ok), opt_number(om), opt_number(t), opt_number(mu), opt_number(delta),
                         opt_number(e1), opt_number(e2), csv::number(eps1), csv::number(eps2),
                         csv::number(r.lhs_abs), csv::number(r.o1), csv::number(r.o2), csv::number(r.o3),
                         csv::number(r.g1_value), csv::number(r.g2_value),
                         csv::number(r.inseparability(Bipartition::g1_vs_g2m)),
                         csv::number(r.inseparability(Bipartition::g2_vs_g1m)),
                         csv::number(r.inseparability(Bipartition::m_vs_g1g2))});
}

SystemParams physical_params(const WitnessFlags& f) {
    const double scale = unit_factor(f.units);
    if (!f.o_omega_k->count()) throw UsageError("--omega-k is required (or use --eps1/--eps2)");
    SystemParams p;
    p.omega_k = f.omega_k * scale;
    p.t = f.t;
    p.e1 = f.e1;
    p.e2 = f.e2;
    const bool has_om = f.o_omega_m->count() > 0;
    const bool has_delta = f.o_delta->count() > 0;
    const bool has_mu = f.o_mu->count() > 0;
    if (has_om && has_delta) throw UsageError("--omega-m and --delta-zpf are mutually exclusive");
    if (has_delta && !has_mu) throw UsageError("--delta-zpf requires --mu");
    if (!has_om && !has_delta) throw UsageError("one of --omega-m or --mu with --delta-zpf is required");
    if (has_mu) p.mu = f.mu;
    try {
        p.omega_m = has_om ? f.omega_m * scale : omega_m_from_zpf(f.constants.k, f.mu, f.delta_zpf);
        p.validate(has_mu);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

int cmd_witness(const WitnessFlags& f, std::ostream& out) {
    const bool eps_path = f.o_eps1->count() || f.o_eps2->count();
    if (eps_path) {
        if (f.mode == "analytic") throw UsageError("--eps1/--eps2 apply to --mode first-order or exact only");
        for (const CLI::Option* o : {f.o_omega_k, f.o_omega_m, f.o_mu, f.o_delta, f.o_t})
            if (o->count()) throw UsageError("--eps1/--eps2 cannot be combined with " + o->get_name());
        const FockSpace space = parse_cutoffs(f.cutoffs);
        const WitnessReport r = f.mode == "first-order"
                                    ? first_order_report(f.eps1, f.eps2, space)
                                    : report_on_state(evolve_exact(f.eps1, f.eps2, space).state);
        write_witness_row(out, f.mode, std::nullopt, std::nullopt, f.eps1, f.eps2, r);
        return ok;
    }

    const SystemParams p = physical_params(f);
    const PhysicalConstants& k = f.constants.k;
    DimensionlessCouplings d;
    try {
        d = derive_couplings(k, p);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    WitnessReport r;
    if (f.mode == "analytic") {
        const double g = analytic_witness(k, p);
        r.lhs_abs = r.g1_value = r.g2_value = g;
        r.insep.fill(g);
    } else if (f.mode == "first-order") {
        r = first_order_report(k, p, parse_cutoffs(f.cutoffs));
    } else {
        r = report_on_state(evolve_exact(d.eps1, d.eps2, parse_cutoffs(f.cutoffs)).state);
    }
    write_witness_row(out, f.mode, p, d.delta_zpf, d.eps1, d.eps2, r);
    return ok;
}

// -------------------------------------------------------------------- sweep

struct SweepFlags {
    ConstantsFlags constants;
    std::string plan = "fig1", out_path, units = "rad", config;
    unsigned jobs = 1;
    double t = 1.0, e1 = 1.0 / std::numbers::sqrt2, e2 = 1.0 / std::numbers::sqrt2;
    double omega_k_min = 1, omega_k_max = 10, omega_m_min = 1, omega_m_max = 10;
    std::size_t omega_k_points = 50, omega_m_points = 50;
    std::string masses = "1e-17,1e-16,1e-15";
    double omega_k = 10, delta_min = 1e-10, delta_max = 1e-9;
    std::size_t delta_points = 50;
    std::string omega_k_values, omega_m_values;
    double omega_m_ratio = 0;
    CLI::Option *o_m_values{}, *o_ratio{};
};

constexpr const char* sweep_footer = R"(Plans:
  fig1    omega_k x omega_m grid (linear), rows ordered omega_k-major
  fig2    delta_zpf grid (log-spaced) for each mass, at fixed omega_k
  custom  --omega-k-values with either --omega-m-values (outer product)
          or --omega-m-ratio r (the line omega_m = r * omega_k)
CSV columns (header row always printed; witness = Omega * t):
  fig1/custom: omega_k,omega_m,t,e1,e2,witness   (frequencies in rad/s)
  fig2:        mu,delta_zpf,omega_m,omega_k,t,witness   (kg, m, rad/s, rad/s, s))";

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return v;
}

// Evaluates every row on a pool of workers; output order is the row order.
std::vector<std::vector<std::string>> compute_rows(std::size_t n_rows, unsigned jobs,
                                                   const std::function<std::vector<std::string>(std::size_t)>& row) {
    std::vector<std::vector<std::string>> rows(n_rows);
    std::vector<std::exception_ptr> errors(n_rows);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_rows; i = next++) {
            try {
                rows[i] = row(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n_rows)));
        for (unsigned j = 1; j < n; ++j) pool.emplace_back(worker);
        worker();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
    const PhysicalConstants& k = f.constants.k;
    const double scale = unit_factor(f.units);
    auto witness_at = [&](double omega_k, double omega_m) {
        SystemParams p;
        p.omega_k = omega_k;
        p.omega_m = omega_m;
        p.t = f.t;
        p.e1 = f.e1;
        p.e2 = f.e2;
        return analytic_witness(k, p);
    };

    // Validate shared inputs once so workers only see valid parameters.
    try {
        k.validate();
        SystemParams probe;
        probe.omega_k = probe.omega_m = 1.0;
        probe.t = f.t;
        probe.e1 = f.e1;
        probe.e2 = f.e2;
        probe.validate(false);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::vector<std::string> header;
    std::size_t n_rows = 0;
    std::function<std::vector<std::string>(std::size_t)> row;
    std::vector<std::pair<double, double>> freq_points;
    std::vector<std::pair<double, double>> mass_points;

    if (f.plan == "fig1" || f.plan == "custom") {
        std::vector<double> wk, wm;
        if (f.plan == "fig1") {
            wk = linspace(f.omega_k_min, f.omega_k_max, f.omega_k_points);
            wm = linspace(f.omega_m_min, f.omega_m_max, f.omega_m_points);
            for (double a : wk)
                for (double b : wm) freq_points.emplace_back(a * scale, b * scale);
        } else {
            wk = parse_double_list(f.omega_k_values, "--omega-k-values");
            const bool has_values = f.o_m_values->count() > 0;
            const bool has_ratio = f.o_ratio->count() > 0;
            if (has_values == has_ratio)
                throw UsageError("custom plan needs exactly one of --omega-m-values or --omega-m-ratio");
            if (has_values) {
                wm = parse_double_list(f.omega_m_values, "--omega-m-values");
                for (double a : wk)
                    for (double b : wm) freq_points.emplace_back(a * scale, b * scale);
            } else {
                for (double a : wk) freq_points.emplace_back(a * scale, f.omega_m_ratio * a * scale);
            }
        }
        for (const auto& [a, b] : freq_points)
            if (!(a > 0) || !(b > 0)) throw UsageError("grid frequencies must be positive");
        header = {"omega_k", "omega_m", "t", "e1", "e2", "witness"};
        n_rows = freq_points.size();
        row = [&](std::size_t i) -> std::vector<std::string> {
            const auto [a, b] = freq_points[i];
            return {csv::number(a), csv::number(b), csv::number(f.t), csv::number(f.e1), csv::number(f.e2),
                    csv::number(witness_at(a, b))};
        };
    } else if (f.plan == "fig2") {
        const auto masses = parse_double_list(f.masses, "--mu");
        if (!(f.delta_min > 0) || !(f.delta_max > 0)) throw UsageError("delta_zpf bounds must be positive");
        for (double mu : masses) {
            if (!(mu > 0)) throw UsageError("masses must be positive");
            for (double d : logspace(f.delta_min, f.delta_max, f.delta_points)) mass_points.emplace_back(mu, d);
        }
        header = {"mu", "delta_zpf", "omega_m", "omega_k", "t", "witness"};
        n_rows = mass_points.size();
        const double wk = f.omega_k * scale;
        if (!(wk > 0)) throw UsageError("--omega-k must be positive");
        row = [&, wk](std::size_t i) -> std::vector<std::string> {
            const auto [mu, d] = mass_points[i];
            const double wm = omega_m_from_zpf(k, mu, d);
            return {csv::number(mu), csv::number(d), csv::number(wm), csv::number(wk), csv::number(f.t),
                    csv::number(witness_at(wk, wm))};
        };
    } else {
        throw UsageError("unknown plan " + f.plan);
    }
    if (n_rows == 0) throw UsageError("empty grid");

    const auto rows = compute_rows(n_rows, f.jobs, row);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!f.out_path.empty()) {
        file.open(f.out_path);
        if (!file) throw IoError("cannot write output file " + f.out_path);
        sink = &file;
    }
    csv::write_row(*sink, header);
    for (const auto& r : rows) csv::write_row(*sink, r);
    sink->flush();
    if (!*sink) throw IoError("write failed for " + (f.out_path.empty() ? std::string("stdout") : f.out_path));
    return ok;
}

// ------------------------------------------------------------------- evolve

struct EvolveFlags {
    double eps1 = 0, eps2 = 0;
    std::string mode = "exact", cutoffs = "4,4,8", config;
    bool all = false;
};

constexpr const char* evolve_footer = R"(CSV columns (header row always printed):
  index        flat basis index (row-major over g1, g2, m)
  n_g1, n_g2, n_m  occupations
  re, im       amplitude
Only nonzero amplitudes are listed unless --all is given. The top-level
leakage diagnostic is written to standard error.)";

int cmd_evolve(const EvolveFlags& f, std::ostream& out, std::ostream& err) {
    const FockSpace space = parse_cutoffs(f.cutoffs);
    StateVector psi = [&] {
        if (f.mode == "first-order") {
            try {
                return evolve_first_order(f.eps1, f.eps2, space);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
        return evolve_exact(f.eps1, f.eps2, space).state;
    }();
    const Leakage leak = leakage(psi);
    err << "leakage total=" << csv::number(leak.total) << " g1=" << csv::number(leak.of(Mode::g1))
        << " g2=" << csv::number(leak.of(Mode::g2)) << " m=" << csv::number(leak.of(Mode::m)) << '\n';
    csv::write_header(out, {"index", "n_g1", "n_g2", "n_m", "re", "im"});
    for (std::size_t i = 0; i < space.dim(); ++i) {
        const cplx a = psi[i];
        if (!f.all && a == cplx{0.0, 0.0}) continue;
        const auto occ = space.occupations(i);
        csv::write_row(out, {std::to_string(i), std::to_string(occ[0]), std::to_string(occ[1]),
                             std::to_string(occ[2]), csv::number(a.real()), csv::number(a.imag())});
    }
    return ok;
}

// ------------------------------------------------------------------ falsify

struct FalsifyFlags {
    std::uint64_t seed = 1;
    std::size_t n_products = 1000, n_ensembles = 500, per_class = 2;
    std::string cutoffs = "4,4,8", csv_path, config;
};

int cmd_falsify(const FalsifyFlags& f, std::ostream& out) {
    FalsificationConfig cfg;
    cfg.seed = f.seed;
    cfg.n_products = f.n_products;
    cfg.n_ensembles = f.n_ensembles;
    cfg.per_class = f.per_class;
    const FalsificationSummary s = falsification_run(parse_cutoffs(f.cutoffs), cfg);
    write_summary_text(out, s);
    if (!f.csv_path.empty()) {
        std::ofstream file(f.csv_path);
        if (!file) throw IoError("cannot write output file " + f.csv_path);
        write_summary_csv(file, s);
    }
    return s.passed() ? ok : falsification_failed;
}

// ----------------------------------------------------------------- selftest

int cmd_selftest(std::ostream& out) {
    int failures = 0;
    auto check = [&](const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool passed = false;
        try {
            passed = body(detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        out << (passed ? "PASS " : "FAIL ") << name;
        if (!detail.empty()) out << ": " << detail;
        out << '\n';
        if (!passed) ++failures;
    };
    const PhysicalConstants k;
    SystemParams p;
    p.omega_k = 10.0;
    p.omega_m = 2.0 * std::numbers::pi;
    p.t = 1.0;
    std::tie(p.e1, p.e2) = default_polarization();

    check("polarization constraint at n = u3 equals 1", [](std::string& d) {
        const double v = polarization_constraint(axis_u3);
        d = csv::number(v);
        return v == 1.0;
    });
    check("default polarization satisfies e1^2 + e2^2 = 1", [](std::string& d) {
        const auto [e1, e2] = default_polarization();
        d = csv::number(e1 * e1 + e2 * e2);
        return std::abs(e1 * e1 + e2 * e2 - 1.0) < 1e-15;
    });
    check("Omega == 2|C'1 + C'2|/hbar", [&](std::string& d) {
        const auto [c1, c2] = coupling(k, p);
        const double a = rate_omega(k, p), b = 2.0 * std::abs(c1 + c2) / k.hbar;
        d = csv::number(a) + " vs " + csv::number(b);
        return std::abs(a - b) <= 1e-12 * a;
    });
    check("closed-form witness is of order 1e-42", [&](std::string& d) {
        const double g = analytic_witness(k, p);
        d = csv::number(g);
        return g > 1e-43 && g < 1e-41;
    });
    check("first-order report equals Omega * t", [&](std::string& d) {
        const WitnessReport r = first_order_report(k, p);
        const double g = analytic_witness(k, p);
        d = csv::number(r.g1_value) + " vs " + csv::number(g);
        return std::abs(r.g1_value - g) <= 1e-12 * g && r.g1_value == r.g2_value;
    });
    check("DSL H1, H2 match programmatic construction", [](std::string& d) {
        const FockSpace space = default_space();
        const auto [h1, h2] = build_h1_h2(space);
        const double e1 = (dsl::evaluate("(g1 + g1')*(b + b')^2", space).matrix() - h1.matrix()).cwiseAbs().maxCoeff();
        const double e2 = (dsl::evaluate("(g2 + g2')*(b + b')^2", space).matrix() - h2.matrix()).cwiseAbs().maxCoeff();
        d = "max deviation " + csv::number(std::max(e1, e2));
        return e1 <= 1e-12 && e2 <= 1e-12;
    });
    check("H_int is Hermitian", [&](std::string&) {
        const auto [c1, c2] = coupling(k, p);
        const Operator h = build_hamiltonian(default_space(), c1, c2);
        return h.is_hermitian(1e-12 * h.matrix().cwiseAbs().maxCoeff());
    });
    check("exact evolution is unitary and close to first order", [](std::string& d) {
        const FockSpace space = default_space();
        const auto ev = evolve_exact(1e-3, 1e-3, space);
        const StateVector pert = evolve_first_order(1e-3, 1e-3, space);
        const double diff = (ev.state.amplitudes() - pert.amplitudes()).norm();
        d = "norm " + csv::number(ev.state.norm()) + ", |exact - first order| " + csv::number(diff);
        return std::abs(ev.state.norm() - 1.0) < 1e-10 && diff < 1e-4;
    });
    check("small falsification run", [](std::string& d) {
        FalsificationConfig cfg;
        cfg.n_products = 100;
        cfg.n_ensembles = 50;
        const auto s = falsification_run(default_space(), cfg);
        d = std::to_string(s.violation_count) + " violation(s)";
        return s.passed();
    });
    out << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? ok : falsification_failed;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graviton-oscillator tripartite entanglement witness toolkit", "gravwit"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    WitnessFlags wf;
    auto* witness = app.add_subcommand("witness", "Evaluate the witness at one parameter point (one CSV row)");
    witness->footer(witness_footer);
    wf.o_omega_k = witness->add_option("--omega-k", wf.omega_k, "Graviton-mode frequency");
    wf.o_omega_m = witness->add_option("--omega-m", wf.omega_m, "Oscillator frequency");
    witness->add_option("--units", wf.units, "Frequency units of the inputs")->check(CLI::IsMember({"rad", "hz"}))->capture_default_str();
    wf.o_t = witness->add_option("--t", wf.t, "Evolution time, s")->capture_default_str();
    wf.o_mu = witness->add_option("--mu", wf.mu, "Oscillator mass, kg");
    wf.o_delta = witness->add_option("--delta-zpf", wf.delta_zpf, "Zero-point length, m (with --mu, replaces --omega-m)");
    witness->add_option("--e1", wf.e1, "Polarization component e^1_11")->capture_default_str();
    witness->add_option("--e2", wf.e2, "Polarization component e^2_11")->capture_default_str();
    witness->add_option("--mode", wf.mode, "Evaluation route")->check(CLI::IsMember({"analytic", "first-order", "exact"}))->capture_default_str();
    wf.o_eps1 = witness->add_option("--eps1", wf.eps1, "Dimensionless coupling eps1 (overrides physical inputs)");
    wf.o_eps2 = witness->add_option("--eps2", wf.eps2, "Dimensionless coupling eps2 (overrides physical inputs)");
    witness->add_option("--cutoffs", wf.cutoffs, "Fock cutoffs g1,g2,m")->capture_default_str();
    witness->add_option("--config", wf.config, "JSON file supplying any flag (flags override)");
    wf.constants.add(witness);

    SweepFlags sf;
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep of the closed-form witness to CSV");
    sweep->footer(sweep_footer);
    sweep->add_option("--plan", sf.plan, "fig1 | fig2 | custom")->check(CLI::IsMember({"fig1", "fig2", "custom"}))->capture_default_str();
    sweep->add_option("--out", sf.out_path, "Output CSV path (default: standard output)");
    sweep->add_option("--jobs", sf.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--units", sf.units, "Frequency units of the inputs")->check(CLI::IsMember({"rad", "hz"}))->capture_default_str();
    sweep->add_option("--t", sf.t, "Evolution time, s")->capture_default_str();
    sweep->add_option("--e1", sf.e1, "Polarization component e^1_11")->capture_default_str();
    sweep->add_option("--e2", sf.e2, "Polarization component e^2_11")->capture_default_str();
    sweep->add_option("--omega-k-min", sf.omega_k_min)->capture_default_str();
    sweep->add_option("--omega-k-max", sf.omega_k_max)->capture_default_str();
    sweep->add_option("--omega-k-points", sf.omega_k_points)->capture_default_str();
    sweep->add_option("--omega-m-min", sf.omega_m_min)->capture_default_str();
    sweep->add_option("--omega-m-max", sf.omega_m_max)->capture_default_str();
    sweep->add_option("--omega-m-points", sf.omega_m_points)->capture_default_str();
    sweep->add_option("--mu", sf.masses, "fig2 masses, comma-separated, kg")->capture_default_str();
    sweep->add_option("--omega-k", sf.omega_k, "fig2 graviton-mode frequency")->capture_default_str();
    sweep->add_option("--delta-zpf-min", sf.delta_min)->capture_default_str();
    sweep->add_option("--delta-zpf-max", sf.delta_max)->capture_default_str();
    sweep->add_option("--delta-zpf-points", sf.delta_points)->capture_default_str();
    sweep->add_option("--omega-k-values", sf.omega_k_values, "custom: omega_k list");
    sf.o_m_values = sweep->add_option("--omega-m-values", sf.omega_m_values, "custom: omega_m list");
    sf.o_ratio = sweep->add_option("--omega-m-ratio", sf.omega_m_ratio, "custom: omega_m = ratio * omega_k");
    sweep->add_option("--config", sf.config, "JSON file supplying any flag (flags override)");
    sf.constants.add(sweep);

    EvolveFlags ef;
    auto* evolve = app.add_subcommand("evolve", "Dump the evolved state amplitudes as CSV");
    evolve->footer(evolve_footer);
    evolve->add_option("--eps1", ef.eps1)->capture_default_str();
    evolve->add_option("--eps2", ef.eps2)->capture_default_str();
    evolve->add_option("--mode", ef.mode)->check(CLI::IsMember({"exact", "first-order"}))->capture_default_str();
    evolve->add_option("--cutoffs", ef.cutoffs, "Fock cutoffs g1,g2,m")->capture_default_str();
    evolve->add_flag("--all", ef.all, "List zero amplitudes too");
    evolve->add_option("--config", ef.config, "JSON file supplying any flag (flags override)");

    FalsifyFlags ff;
    auto* falsify = app.add_subcommand("falsify", "Check the witnesses never fire on random biseparable states");
    falsify->footer("Summary CSV columns (--csv): seed,n_products,n_ensembles,per_class,max_i_g1,max_i_g2,max_i_m,\n"
                    "max_g2_pure,max_g1_ensemble,max_g2_ensemble,violations");
    falsify->add_option("--seed", ff.seed)->capture_default_str();
    falsify->add_option("--n-products", ff.n_products, "Product states per bipartition")->check(CLI::PositiveNumber)->capture_default_str();
    falsify->add_option("--n-ensembles", ff.n_ensembles)->check(CLI::PositiveNumber)->capture_default_str();
    falsify->add_option("--per-class", ff.per_class, "Ensemble components per class")->check(CLI::PositiveNumber)->capture_default_str();
    falsify->add_option("--cutoffs", ff.cutoffs, "Fock cutoffs g1,g2,m")->capture_default_str();
    falsify->add_option("--csv", ff.csv_path, "Also write the summary as CSV");
    falsify->add_option("--config", ff.config, "JSON file supplying any flag (flags override)");

    auto* selftest = app.add_subcommand("selftest", "Run built-in invariant checks");

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    }

    try {
        if (witness->parsed()) return cmd_witness(wf, out);
        if (sweep->parsed()) return cmd_sweep(sf, out);
        if (evolve->parsed()) return cmd_evolve(ef, out, err);
        if (falsify->parsed()) return cmd_falsify(ff, out);
        if (selftest->parsed()) return cmd_selftest(out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const CutoffTooSmall& e) {
        err << "error: " << e.what() << '\n';
        return numerical;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}

}  // namespace gravwit::cli
