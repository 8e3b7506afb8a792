#include "bergman/cli.hpp"

#include "bergman/density.hpp"
#include "bergman/hypersurface.hpp"
#include "bergman/parallel.hpp"
#include "bergman/potential.hpp"
#include "bergman/report.hpp"
#include "bergman/selftest.hpp"
#include "bergman/spaces.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace bergman::cli {

namespace {

using nlohmann::json;

const std::vector<std::pair<Command, std::string>> kCommands = {
    {Command::selftest, "selftest"},
    {Command::density_map, "density-map"},
    {Command::potential_check, "potential-check"},
    {Command::flatness, "flatness"},
    {Command::seip_sweep, "seip-sweep"},
    {Command::restriction_check, "restriction-check"},
};

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

void reject_unknown(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown config key '" + key + "' in " + where);
}

DefiningPolynomial make_T(const RunConfig& c) {
    if (c.polynomial.is_null()) return DefiningPolynomial(Polynomial::constant(c.dimension, 1.0));
    return DefiningPolynomial::from_json(c.polynomial, c.dimension);
}

Weight make_weight(const RunConfig& c) {
    Weight w = Weight::log_family(c.weight.beta);
    w.scale = c.weight.scale;
    w.quartic = c.weight.quartic;
    if (c.weight.kind == "polynomial_perturbation") {
        w.kind = Weight::Kind::polynomial_perturbation;
        if (!c.weight.perturbation.is_null())
            w.perturbation = DefiningPolynomial::from_json(c.weight.perturbation, c.dimension).expanded();
    }
    return w;
}

BallPoint random_point(int n, std::mt19937_64& rng, double radius) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CVec z(n);
    for (int i = 0; i < n; ++i) z[i] = cd(g(rng), g(rng));
    z *= radius * std::pow(u(rng), 1.0 / (2 * n)) / z.norm();
    return BallPoint(z);
}

std::string coord_header(int n, const std::string& prefix = "z") {
    std::string h;
    for (int i = 1; i <= n; ++i)
        h += prefix + std::to_string(i) + "_re," + prefix + std::to_string(i) + "_im,";
    return h;
}

std::string coord_cells(const CVec& z) {
    std::string s;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        s += format_double(z[i].real()) + "," + format_double(z[i].imag()) + ",";
    return s;
}

struct Output {
    std::string csv;
    json result;
    bool ok = true;
};

Output run_selftest(const RunConfig& c) {
    Output out;
    json checks = json::array();
    for (const SelfCheck& ch : geometry_selftest(c.seed)) {
        out.ok = out.ok && ch.pass;
        checks.push_back({{"check", ch.name}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"pass", ch.pass}});
    }
    std::ostringstream csv;
    csv << "check,value,tolerance,pass\n";
    for (const auto& ch : checks)
        csv << ch["check"].get<std::string>() << "," << format_double(ch["value"].get<double>()) << ","
            << format_double(ch["tolerance"].get<double>()) << "," << (ch["pass"].get<bool>() ? 1 : 0) << "\n";
    out.csv = csv.str();
    out.result = {{"checks", checks}, {"pass", out.ok}};
    return out;
}

Output run_density_map(const RunConfig& c) {
    const DefiningPolynomial T = make_T(c);
    const Weight w = make_weight(c);
    const auto grid = density_grid(c.dimension, c.grid.per_axis, c.grid.radius);
    const DensityReport rep = density_sweep(T, w, grid, c.r_ladder);
    std::ostringstream csv;
    rep.write_csv(csv);
    return {csv.str(), rep.summary(), true};
}

Output run_potential_check(const RunConfig& c) {
    const DefiningPolynomial T = make_T(c);
    std::mt19937_64 rng(c.seed);
    std::vector<BallPoint> pts;
    for (int i = 0; i < c.points; ++i) pts.push_back(random_point(c.dimension, rng, c.grid.radius));
    std::vector<double> a(pts.size()), b(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        a[i] = s_r_potential(T, pts[i], c.r);
        b[i] = s_r_green(T, pts[i], c.r);
    });
    std::ostringstream csv;
    csv << coord_header(c.dimension) << "s_potential,s_green,abs_diff\n";
    double max_diff = 0.0, max_rel = 0.0, max_value = -1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::isinf(a[i]) && std::isinf(b[i]) ? 0.0 : std::abs(a[i] - b[i]);
        max_diff = std::max(max_diff, d);
        const double m = std::max(std::abs(a[i]), std::abs(b[i]));
        max_rel = std::max(max_rel, m < 1e-6 ? d : d / m);
        max_value = std::max({max_value, a[i], b[i]});
        csv << coord_cells(pts[i].coords()) << format_double(a[i]) << "," << format_double(b[i]) << ","
            << format_double(d) << "\n";
    }
    return {csv.str(), {{"max_abs_diff", max_diff}, {"max_rel_diff", max_rel}, {"max_value", max_value}, {"points", c.points}}, true};
}

Output run_flatness(const RunConfig& c) {
    if (c.dimension < 2) throw ConfigError("flatness needs dimension 2 or 3");
    const DefiningPolynomial T = make_T(c);
    if (T.is_constant()) throw ConfigError("flatness needs a non-constant polynomial");
    const HypersurfaceSample S = sample_W(T, c.grid.radius, c.points, c.seed);
    std::vector<FlatnessReport> reps(S.size());
    parallel_for(S.size(), [&](std::size_t i) { reps[i] = flatness_profile(T, S.points[i], c.eps.front()); });
    std::ostringstream csv;
    csv << coord_header(c.dimension, "w") << "C,violation\n";
    double Cmax = 0.0;
    int violations = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        Cmax = std::max(Cmax, reps[i].C);
        violations += reps[i].violation ? 1 : 0;
        csv << coord_cells(S.points[i].coords()) << format_double(reps[i].C) << "," << (reps[i].violation ? 1 : 0)
            << "\n";
    }
    return {csv.str(), {{"sup_C", Cmax}, {"violations", violations}, {"samples", S.size()}, {"eps0", c.eps.front()}}, true};
}

Output run_seip_sweep(const RunConfig& c) {
    if (c.dimension != 1) throw ConfigError("seip-sweep is defined for dimension 1");
    std::vector<double> seps = c.separations;
    if (seps.empty())
        for (double d : c.densities) seps.push_back(separation_for_density(c.weight.beta, d));
    std::vector<SeipRow> rows(seps.size());
    std::vector<std::vector<double>> lmax(seps.size(), std::vector<double>(c.degrees.size()));
    parallel_for(seps.size(), [&](std::size_t i) {
        rows[i] = seip_row(seps[i], c.weight.beta, c.degree, c.seed);
        for (std::size_t k = 0; k < c.degrees.size(); ++k)
            lmax[i][k] = seip_row(seps[i], c.weight.beta, c.degrees[k], c.seed).lambda_max;
    });
    std::ostringstream csv;
    csv << "separation,density_estimate,lambda_min,lambda_max,extension_norm_ratio,points";
    for (int d : c.degrees) csv << ",lambda_max_d" << d;
    csv << "\n";
    json jr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SeipRow& r = rows[i];
        csv << format_double(r.separation) << "," << format_double(r.density) << "," << format_double(r.lambda_min)
            << "," << format_double(r.lambda_max) << "," << format_double(r.extension_ratio) << "," << r.points;
        for (double v : lmax[i]) csv << "," << format_double(v);
        csv << "\n";
        jr.push_back({{"separation", r.separation}, {"density", r.density}, {"lambda_min", r.lambda_min},
                      {"lambda_max", r.lambda_max}, {"extension_norm_ratio", r.extension_ratio}});
    }
    return {csv.str(), {{"rows", jr}, {"threshold", 1.0}}, true};
}

Output run_restriction_check(const RunConfig& c) {
    const DefiningPolynomial T = make_T(c);
    const TruncatedSpace S = build_space(c.dimension, c.degree, make_weight(c));
    std::ostringstream csv;
    csv << "eps,C,C_space,M_upper,tested\n";
    double lo = 1e300, hi = 0.0;
    json jr = json::array();
    for (double e : c.eps) {
        const TubeRatio r = restriction_inequality_check(S, T, e);
        lo = std::min(lo, r.C);
        hi = std::max(hi, r.C);
        csv << format_double(e) << "," << format_double(r.C) << "," << format_double(r.C_space) << ","
            << format_double(r.M_upper) << "," << r.tested << "\n";
        jr.push_back({{"eps", e}, {"C", r.C}, {"C_space", r.C_space}, {"M_upper", r.M_upper}});
    }
    return {csv.str(), {{"rows", jr}, {"C_spread", hi / lo}}, true};
}

}  // namespace

std::string command_name(Command c) {
    for (const auto& [k, v] : kCommands)
        if (k == c) return v;
    return "?";
}

std::optional<Command> command_from_name(const std::string& s) {
    for (const auto& [k, v] : kCommands)
        if (v == s) return k;
    return std::nullopt;
}

json RunConfig::to_json() const {
    return {{"command", command_name(command)},
            {"dimension", dimension},
            {"polynomial", polynomial},
            {"weight",
             {{"kind", weight.kind}, {"beta", weight.beta}, {"scale", weight.scale}, {"quartic", weight.quartic},
              {"perturbation", weight.perturbation}}},
            {"r_ladder", r_ladder},
            {"grid", {{"per_axis", grid.per_axis}, {"radius", grid.radius}}},
            {"eps", eps},
            {"degree", degree},
            {"degrees", degrees},
            {"separations", separations},
            {"densities", densities},
            {"points", points},
            {"r", r},
            {"seed", seed},
            {"output", output}};
}

RunConfig config_from_json(const json& j, RunConfig c) {
    reject_unknown(j,
                   {"command", "dimension", "polynomial", "weight", "r_ladder", "grid", "eps", "degree", "degrees",
                    "separations", "densities", "points", "r", "seed", "output"},
                   "config");
    if (j.contains("command")) {
        const auto cmd = command_from_name(get_as<std::string>(j["command"], "command"));
        if (!cmd) throw ConfigError("unknown command in config");
        c.command = *cmd;
    }
    if (j.contains("dimension")) c.dimension = get_as<int>(j["dimension"], "dimension");
    if (j.contains("polynomial")) c.polynomial = j["polynomial"];
    if (j.contains("weight")) {
        const json& w = j["weight"];
        reject_unknown(w, {"kind", "beta", "scale", "quartic", "perturbation"}, "weight");
        if (w.contains("kind")) c.weight.kind = get_as<std::string>(w["kind"], "weight.kind");
        if (w.contains("beta")) c.weight.beta = get_as<double>(w["beta"], "weight.beta");
        if (w.contains("scale")) c.weight.scale = get_as<double>(w["scale"], "weight.scale");
        if (w.contains("quartic")) c.weight.quartic = get_as<double>(w["quartic"], "weight.quartic");
        if (w.contains("perturbation")) c.weight.perturbation = w["perturbation"];
    }
    if (j.contains("r_ladder")) c.r_ladder = get_as<std::vector<double>>(j["r_ladder"], "r_ladder");
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, {"per_axis", "radius"}, "grid");
        if (g.contains("per_axis")) c.grid.per_axis = get_as<int>(g["per_axis"], "grid.per_axis");
        if (g.contains("radius")) c.grid.radius = get_as<double>(g["radius"], "grid.radius");
    }
    if (j.contains("eps")) c.eps = get_as<std::vector<double>>(j["eps"], "eps");
    if (j.contains("degree")) c.degree = get_as<int>(j["degree"], "degree");
    if (j.contains("degrees")) c.degrees = get_as<std::vector<int>>(j["degrees"], "degrees");
    if (j.contains("separations")) c.separations = get_as<std::vector<double>>(j["separations"], "separations");
    if (j.contains("densities")) c.densities = get_as<std::vector<double>>(j["densities"], "densities");
    if (j.contains("points")) c.points = get_as<int>(j["points"], "points");
    if (j.contains("r")) c.r = get_as<double>(j["r"], "r");
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
    if (j.contains("output")) c.output = get_as<std::string>(j["output"], "output");
    return c;
}

void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    need(c.dimension >= 1 && c.dimension <= 3, "dimension must be 1, 2 or 3");
    need(c.weight.kind == "log_family" || c.weight.kind == "polynomial_perturbation",
         "weight.kind must be log_family or polynomial_perturbation");
    need(c.weight.beta > 0.0 && c.weight.scale > 0.0, "weight.beta and weight.scale must be positive");
    need(c.weight.quartic >= 0.0, "weight.quartic must be non-negative");
    need(!c.r_ladder.empty(), "r_ladder must not be empty");
    for (std::size_t i = 0; i < c.r_ladder.size(); ++i) {
        need(c.r_ladder[i] > 0.0 && c.r_ladder[i] <= 0.95, "r_ladder values must lie in (0, 0.95]");
        need(i == 0 || c.r_ladder[i] > c.r_ladder[i - 1], "r_ladder must be increasing");
    }
    need(c.grid.per_axis >= 1 && c.grid.per_axis <= 64, "grid.per_axis must lie in [1, 64]");
    need(c.grid.radius > 0.0 && c.grid.radius < 1.0, "grid.radius must lie in (0, 1)");
    need(!c.eps.empty(), "eps must not be empty");
    for (double e : c.eps) need(e > 0.0 && e <= 0.2, "eps values must lie in (0, 0.2]");
    need(c.degree >= 0 && c.degree <= 40, "degree must lie in [0, 40]");
    for (int d : c.degrees) need(d >= 0 && d <= 40, "degrees must lie in [0, 40]");
    for (double s : c.separations) need(s > 0.0 && s < 1.0, "separations must lie in (0, 1)");
    for (double d : c.densities) need(d > 0.0, "densities must be positive");
    need(c.points >= 1 && c.points <= 1000000, "points must lie in [1, 1e6]");
    need(c.r > 0.0 && c.r < 1.0, "r must lie in (0, 1)");
    need(!c.output.empty(), "output must not be empty");
    if (!c.polynomial.is_null()) {
        try {
            (void)DefiningPolynomial::from_json(c.polynomial, c.dimension);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("polynomial: ") + e.what());
        }
    }
    if (!c.weight.perturbation.is_null()) {
        try {
            (void)DefiningPolynomial::from_json(c.weight.perturbation, c.dimension);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("weight.perturbation: ") + e.what());
        }
    }
}

json conventions(int n) {
    return {{"volume_form", "omega_E^n = (dd^c|z|^2)^n = 2^n n! Lebesgue"},
            {"dc", "d^c = (i/2)(dbar - d)"},
            {"bergman_metric", "omega_B = (n+1)[(1-|z|^2) delta_ij + conj(z_i) z_j]/(1-|z|^2)^2"},
            {"volume_density", volume_density(n, 0.0)},
            {"V_n", "((n+1) 2 pi r^2/(1-r^2))^n"},
            {"green_constant", green_constant(n)},
            {"green_sign", "G_B <= 0, Gamma_r <= 0"},
            {"kappa", "scale*(-beta log(1-|z|^2) + 2 Re p + quartic |z|^4)"},
            {"density_threshold", 1.0}};
}

int run(const RunConfig& config, std::ostream& log) {
    try {
        validate(config);
        Output out;
        switch (config.command) {
            case Command::selftest: out = run_selftest(config); break;
            case Command::density_map: out = run_density_map(config); break;
            case Command::potential_check: out = run_potential_check(config); break;
            case Command::flatness: out = run_flatness(config); break;
            case Command::seip_sweep: out = run_seip_sweep(config); break;
            case Command::restriction_check: out = run_restriction_check(config); break;
        }
        namespace fs = std::filesystem;
        fs::create_directories(config.output);
        const std::string stem = (fs::path(config.output) / command_name(config.command)).string();
        {
            std::ofstream csv(stem + ".csv", std::ios::binary);
            csv << out.csv;
        }
        {
            json rep = {{"config", config.to_json()},
                        {"conventions", conventions(config.dimension)},
                        {"result", out.result}};
            std::ofstream js(stem + ".json", std::ios::binary);
            js << rep.dump(2) << "\n";
        }
        log << command_name(config.command) << ": " << out.result.dump() << "\n";
        log << "wrote " << stem << ".csv and " << stem << ".json\n";
        if (!out.ok) {
            log << "error: " << command_name(config.command) << " checks failed\n";
            return 3;
        }
        return 0;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        log << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        log << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

int main(int argc, char** argv) {
    CLI::App app{"Bergman-ball density, potential and sampling experiments"};
    app.require_subcommand(1);
    std::string config_path, polynomial, weight_kind, output;
    std::optional<int> dimension, degree, points, per_axis;
    std::optional<double> beta, grid_radius, r;
    std::optional<std::uint64_t> seed;
    std::vector<double> separations, eps, r_ladder;
    std::vector<int> degrees;

    for (const auto& [cmd, name] : kCommands) {
        CLI::App* sub = app.add_subcommand(name, "run " + name);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--dimension,-n", dimension, "ball dimension");
        sub->add_option("--polynomial", polynomial, "defining polynomial as JSON");
        sub->add_option("--weight-kind", weight_kind, "log_family or polynomial_perturbation");
        sub->add_option("--beta", beta, "weight exponent");
        sub->add_option("--degree", degree, "truncation degree");
        sub->add_option("--degrees", degrees, "degrees for the stability check")->delimiter(',');
        sub->add_option("--separations", separations, "lattice separations")->delimiter(',');
        sub->add_option("--eps", eps, "tube or smoothing radii")->delimiter(',');
        sub->add_option("--r-ladder", r_ladder, "radii for density maps")->delimiter(',');
        sub->add_option("--per-axis", per_axis, "grid points per axis");
        sub->add_option("--grid-radius", grid_radius, "grid radius");
        sub->add_option("--points", points, "number of sample points");
        sub->add_option("--r", r, "radius for potential checks");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--output,-o", output, "output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunConfig c;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config file " + config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            c = config_from_json(j, c);
        }
        c.command = *command_from_name(app.get_subcommands().front()->get_name());
        if (dimension) c.dimension = *dimension;
        if (!polynomial.empty()) {
            try {
                c.polynomial = json::parse(polynomial);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("--polynomial is not valid JSON: ") + e.what());
            }
        }
        if (!weight_kind.empty()) c.weight.kind = weight_kind;
        if (beta) c.weight.beta = *beta;
        if (degree) c.degree = *degree;
        if (!degrees.empty()) c.degrees = degrees;
        if (!separations.empty()) c.separations = separations;
        if (!eps.empty()) c.eps = eps;
        if (!r_ladder.empty()) c.r_ladder = r_ladder;
        if (per_axis) c.grid.per_axis = *per_axis;
        if (grid_radius) c.grid.radius = *grid_radius;
        if (points) c.points = *points;
        if (r) c.r = *r;
        if (seed) c.seed = *seed;
        if (!output.empty()) c.output = output;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return run(c, std::cerr);
}

}  // namespace bergman::cli
