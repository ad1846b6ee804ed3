// Command-line front end: ball-spectrum tables, domain solves, theorem
// verification, and parameter sweeps with CSV/JSON/SVG output.
//
// Exit codes: 0 success (verification passed), 1 verification failure,
// 2 configuration or I/O error.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "steklov/ball_spectrum.hpp"
#include "steklov/hyperbolic_domain.hpp"
#include "steklov/steklov_solver.hpp"
#include "steklov/symmetric_space.hpp"
#include "steklov/test_functions.hpp"
#include "svg_plot.hpp"

namespace {

using namespace steklov;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitConfigError = 2;

std::string fmt(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw std::runtime_error("cannot open output file: " + output_path);
    out << text;
}

// "a:b:steps" -> `steps` inclusive samples of [a, b]; steps may be 0.
std::vector<double> parse_range(const std::string& spec) {
    double a = 0.0, b = 0.0;
    int steps = 0;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(spec);
    if (!(in >> a >> colon1 >> b >> colon2 >> steps) || colon1 != ':' || colon2 != ':' ||
        steps < 0 || !(in >> std::ws).eof())
        throw CLI::ValidationError("range", "expected a:b:steps with steps >= 0: " + spec);
    std::vector<double> values;
    values.reserve(steps);
    for (int i = 0; i < steps; ++i)
        values.push_back(steps == 1 ? a : a + (b - a) * i / (steps - 1));
    return values;
}

Space parse_space(const std::string& spec) {
    int k = 0, n = 0;
    char comma = 0;
    std::istringstream in(spec);
    if (!(in >> k >> comma >> n) || comma != ',' || !(in >> std::ws).eof())
        throw CLI::ValidationError("space", "expected k,n: " + spec);
    return Space(k, n);
}

MetricMode parse_mode(const std::string& mode) {
    if (mode == "euclidean") return MetricMode::euclidean;
    if (mode == "hyperbolic") return MetricMode::hyperbolic;
    throw CLI::ValidationError("mode", "expected euclidean or hyperbolic: " + mode);
}

// --- ball ------------------------------------------------------------------

int cmd_ball(const std::string& space_spec, const std::vector<double>& radii,
             const std::string& format, const std::string& output,
             const std::string& plot_path) {
    Space space = parse_space(space_spec);
    const int l = theorem_l(space);

    struct Row {
        double R, g, gp, mu1, hsum;
    };
    std::vector<Row> rows;
    for (double R : radii) {
        if (!(R > 0.0)) throw std::invalid_argument("ball: radius must be positive");
        double g = radial_g(space, R);
        double gp = radial_g_prime(space, R);
        rows.push_back(Row{R, g, gp, gp / g, harmonic_sum_ball(space, R, l)});
    }

    std::ostringstream out;
    if (format == "csv") {
        out << "k,n,R,g,g_prime,mu1,l,harmonic_sum\n";
        for (const Row& r : rows)
            out << space.k() << ',' << space.n() << ',' << fmt(r.R) << ',' << fmt(r.g) << ','
                << fmt(r.gp) << ',' << fmt(r.mu1) << ',' << l << ',' << fmt(r.hsum) << '\n';
    } else {
        json j;
        j["space"] = {{"k", space.k()}, {"n", space.n()}};
        j["l"] = l;
        j["rows"] = json::array();
        for (const Row& r : rows)
            j["rows"].push_back({{"R", r.R},
                                 {"g", r.g},
                                 {"g_prime", r.gp},
                                 {"mu1", r.mu1},
                                 {"harmonic_sum", r.hsum}});
        out << j.dump(2) << '\n';
    }
    emit(out.str(), output);

    if (!plot_path.empty() && !rows.empty()) {
        std::vector<RadialSample> curve = tabulate_radial(
            [&](double R) { return mu1_ball_boundary(space, R); }, radii);
        plot::SvgPlot figure("first Steklov eigenvalue of geodesic balls, " + space.name(),
                             "R", "mu_1(B(R))");
        plot::Series series;
        series.label = space.name();
        for (const RadialSample& sample : curve) {
            series.x.push_back(sample.r);
            series.y.push_back(sample.value);
        }
        figure.add_series(std::move(series));
        figure.write(plot_path);
    }
    return kExitPass;
}

// --- solve -----------------------------------------------------------------

int cmd_solve(const std::string& domain_path, const std::string& mode_name, int degree,
              const std::string& format, const std::string& output, bool strict) {
    StarDomain domain = load_domain_file(domain_path);
    MetricMode mode = parse_mode(mode_name);
    SteklovSpectrum spectrum = solve_spectrum(domain, mode, degree);

    // Cauchy check against a lower degree; raises the convergence flag.
    ConvergenceStudy study =
        convergence_study(domain, mode, {std::max(4, degree / 2), degree});
    bool converged = study.converged;

    std::ostringstream out;
    if (format == "csv") {
        out << "# mode=" << mode_name << " degree=" << degree
            << " nodes=" << spectrum.node_weights.size()
            << " residual=" << fmt(spectrum.residual_estimate)
            << " mass_condition=" << fmt(spectrum.mass_condition)
            << " converged=" << (converged ? "true" : "false") << '\n';
        out << "index,mu\n";
        for (int i = 0; i < spectrum.count(); ++i) out << i << ',' << fmt(spectrum.mu(i)) << '\n';
    } else {
        json j;
        j["mode"] = mode_name;
        j["degree"] = degree;
        j["node_count"] = spectrum.node_weights.size();
        j["residual_estimate"] = spectrum.residual_estimate;
        j["mass_condition"] = spectrum.mass_condition;
        j["converged"] = converged;
        j["eigenvalues"] = spectrum.eigenvalues;
        out << j.dump(2) << '\n';
    }
    emit(out.str(), output);

    if (strict && !converged) {
        std::cerr << "solve: convergence flag raised (successive change "
                  << study.rows.back().max_rel_change << " > 1e-06)\n";
        return kExitVerificationFailure;
    }
    return kExitPass;
}

// --- verify ----------------------------------------------------------------

std::string verify_csv_header() {
    return "domain,degree,mode,area,ball_radius,mu1_domain,mu1_ball,lhs,rhs,gap,min_slack,"
           "pass\n";
}

std::string verify_csv_row(const TheoremReport& report, const std::string& mode_name) {
    double min_slack = 0.0;
    for (const ChainStep& step : report.chain)
        min_slack = std::min(min_slack == 0.0 ? step.slack : min_slack, step.slack);
    std::ostringstream out;
    out << report.domain_id << ',' << report.degree << ',' << mode_name << ','
        << fmt(report.area) << ',' << fmt(report.ball_radius) << ','
        << fmt(report.mu1_domain) << ',' << fmt(report.mu1_ball) << ',' << fmt(report.lhs)
        << ',' << fmt(report.rhs) << ',' << fmt(report.gap) << ',' << fmt(min_slack) << ','
        << (report.pass ? "true" : "false") << '\n';
    return out.str();
}

int cmd_verify(const std::string& domain_path, int degree, const std::string& mode_name,
               std::optional<double> ball_radius, unsigned seed, const std::string& format,
               const std::string& output) {
    StarDomain domain = load_domain_file(domain_path);
    MetricMode mode = parse_mode(mode_name);

    if (mode == MetricMode::euclidean) {
        BrockCheck check = brock_check_euclidean(domain, degree);
        std::ostringstream out;
        if (format == "csv") {
            out << "domain,degree,mu1,mu2,reciprocal_sum,ball_radius,rhs,slack,pass\n"
                << domain_path << ',' << degree << ',' << fmt(check.mu1) << ','
                << fmt(check.mu2) << ',' << fmt(check.reciprocal_sum) << ','
                << fmt(check.ball_radius) << ',' << fmt(check.rhs) << ',' << fmt(check.slack)
                << ',' << (check.holds ? "true" : "false") << '\n';
        } else {
            json j = {{"domain", domain_path},
                      {"degree", degree},
                      {"mu1", check.mu1},
                      {"mu2", check.mu2},
                      {"reciprocal_sum", check.reciprocal_sum},
                      {"ball_radius", check.ball_radius},
                      {"rhs", check.rhs},
                      {"slack", check.slack},
                      {"pass", check.holds}};
            out << j.dump(2) << '\n';
        }
        emit(out.str(), output);
        return check.holds ? kExitPass : kExitVerificationFailure;
    }

    if (ball_radius) {
        double expected = ball_volume(hyperbolic_plane(), *ball_radius);
        double actual = area(domain);
        if (std::abs(expected - actual) > 1e-6 * std::max(expected, actual))
            throw std::invalid_argument(
                "verify: the volume constraint vol(Omega) = vol(B(R)) fails for the "
                "requested ball radius: vol(B(" +
                fmt(*ball_radius) + ")) = " + fmt(expected) + " but vol(Omega) = " +
                fmt(actual));
    }

    VerifyOptions opts;
    opts.seed = seed;
    opts.domain_id = domain_path;
    TheoremReport report = verify_theorem(domain, degree, opts);

    std::ostringstream out;
    if (format == "csv") {
        out << verify_csv_header() << verify_csv_row(report, mode_name);
    } else {
        out << to_json(report).dump(2) << '\n';
    }
    emit(out.str(), output);
    if (!report.pass)
        std::cerr << "verify: FAIL (" << report.failure_reason << ")\n";
    return report.pass ? kExitPass : kExitVerificationFailure;
}

// --- sweep -----------------------------------------------------------------

int cmd_sweep(const std::vector<double>& radii, const std::vector<double>& eps_values,
              int harmonic, int degree, int jobs, unsigned seed, const std::string& format,
              const std::string& output, const std::string& plot_path) {
    struct Instance {
        double R0, eps;
        TheoremReport report;
        std::string status = "ok";
    };
    std::vector<Instance> instances;
    for (double R0 : radii)
        for (double eps : eps_values) instances.push_back(Instance{R0, eps, {}, "pending"});

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t index = next.fetch_add(1);
            if (index >= instances.size()) return;
            Instance& inst = instances[index];
            try {
                FourierSeries series;
                series.c0 = inst.R0;
                series.cos_coeffs.assign(harmonic, 0.0);
                series.cos_coeffs[harmonic - 1] = inst.R0 * inst.eps;
                StarDomain domain(0.0, series);
                VerifyOptions opts;
                opts.seed = seed;
                opts.domain_id = "R0=" + fmt(inst.R0) + ";eps=" + fmt(inst.eps);
                inst.report = verify_theorem(domain, degree, opts);
                inst.status = "ok";
            } catch (const std::exception& err) {
                inst.status = err.what();
                inst.report.pass = false;
            }
        }
    };
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    std::ostringstream out;
    if (format == "csv") {
        out << "R0,eps,area,ball_radius,mu1_domain,mu1_ball,lhs,rhs,gap,pass,status\n";
        for (const Instance& inst : instances) {
            const TheoremReport& r = inst.report;
            out << fmt(inst.R0) << ',' << fmt(inst.eps) << ',' << fmt(r.area) << ','
                << fmt(r.ball_radius) << ',' << fmt(r.mu1_domain) << ',' << fmt(r.mu1_ball)
                << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.gap) << ','
                << (r.pass ? "true" : "false") << ',' << inst.status << '\n';
        }
    } else {
        json j = json::array();
        for (const Instance& inst : instances) {
            json entry = to_json(inst.report);
            entry["R0"] = inst.R0;
            entry["eps"] = inst.eps;
            entry["status"] = inst.status;
            j.push_back(entry);
        }
        out << j.dump(2) << '\n';
    }
    emit(out.str(), output);

    if (!plot_path.empty() && !instances.empty()) {
        plot::SvgPlot figure("reciprocal-sum gap vs boundary perturbation", "eps",
                             "lhs - rhs");
        for (double R0 : radii) {
            plot::Series series;
            series.label = "R0=" + fmt(R0);
            for (const Instance& inst : instances)
                if (inst.R0 == R0 && inst.status == "ok") {
                    series.x.push_back(inst.eps);
                    series.y.push_back(inst.report.gap);
                }
            figure.add_series(std::move(series));
        }
        figure.write(plot_path);
    }

    for (const Instance& inst : instances)
        if (!inst.report.pass) return kExitVerificationFailure;
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steklov spectra of balls and star-shaped domains in rank-1 hyperbolic "
                 "geometries"};
    app.require_subcommand(1);

    std::string format = "csv";
    std::string output;
    unsigned seed = 12345;
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--output", output, "write results to a file instead of stdout");
    app.add_option("--seed", seed, "seed for randomized diagnostics")->capture_default_str();

    // ball
    auto* ball = app.add_subcommand(
        "ball", "radial profile and exact first eigenvalue of geodesic balls");
    std::string space_spec = "1,2";
    std::string radius_range;
    double radius = 0.0;
    std::string plot_path;
    ball->add_option("--space", space_spec, "space parameters k,n")->capture_default_str();
    auto* ball_r = ball->add_option("--radius", radius, "single ball radius");
    auto* ball_rr =
        ball->add_option("--radius-range", radius_range, "radius grid a:b:steps");
    ball_r->excludes(ball_rr);
    ball->add_option("--plot", plot_path, "write an SVG plot of mu_1 vs R");

    // solve
    auto* solve = app.add_subcommand("solve", "Steklov spectrum of a star-shaped domain");
    std::string domain_path;
    std::string mode_name = "hyperbolic";
    int degree = 32;
    bool strict = false;
    solve->add_option("--domain", domain_path, "domain spec JSON file")->required();
    solve->add_option("--mode", mode_name, "euclidean or hyperbolic")->capture_default_str();
    solve->add_option("--degree", degree, "harmonic basis degree")->capture_default_str();
    solve->add_flag("--strict", strict, "exit nonzero when the convergence flag is raised");

    // verify
    auto* verify = app.add_subcommand(
        "verify", "reciprocal-sum comparison against the equal-volume ball");
    std::string v_domain, v_mode = "hyperbolic";
    int v_degree = 32;
    double v_ball_radius = 0.0;
    verify->add_option("--domain", v_domain, "domain spec JSON file")->required();
    verify->add_option("--degree", v_degree, "harmonic basis degree")->capture_default_str();
    verify->add_option("--mode", v_mode, "hyperbolic (full chain) or euclidean (Brock check)")
        ->capture_default_str();
    auto* v_br = verify->add_option("--ball-radius", v_ball_radius,
                                    "cross-check the volume constraint against this radius");

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "batch verification over a perturbed-ball parameter grid");
    std::string s_radius_range, s_eps_range, s_plot;
    double s_radius = 0.0;
    int s_harmonic = 2, s_degree = 24, s_jobs = 1;
    auto* sweep_r = sweep->add_option("--radius", s_radius, "single base radius R0");
    auto* sweep_rr =
        sweep->add_option("--radius-range", s_radius_range, "base radius grid a:b:steps");
    sweep_r->excludes(sweep_rr);
    sweep->add_option("--eps-range", s_eps_range, "perturbation grid a:b:steps")->required();
    sweep->add_option("--harmonic", s_harmonic, "perturbation harmonic m in cos(m theta)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--degree", s_degree, "harmonic basis degree")->capture_default_str();
    sweep->add_option("--jobs", s_jobs, "concurrent verification jobs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--plot", s_plot, "write an SVG plot of gap vs eps");

    ball->footer("CSV columns: k,n,R,g,g_prime,mu1,l,harmonic_sum\n"
                 "Floats carry 17 significant digits; see FORMATS.md.");
    solve->footer("CSV: one '# mode degree nodes residual mass_condition converged'\n"
                  "comment line, then index,mu rows; see FORMATS.md.");
    verify->footer("CSV columns (hyperbolic): domain,degree,mode,area,ball_radius,\n"
                   "mu1_domain,mu1_ball,lhs,rhs,gap,min_slack,pass; euclidean mode emits\n"
                   "domain,degree,mu1,mu2,reciprocal_sum,ball_radius,rhs,slack,pass.\n"
                   "JSON emits the full verification report; see FORMATS.md.");
    sweep->footer("CSV columns: R0,eps,area,ball_radius,mu1_domain,mu1_ball,lhs,rhs,gap,\n"
                  "pass,status; rows sorted by (R0, eps); see FORMATS.md.");

    // let the global --format/--output/--seed appear after the subcommand
    for (CLI::App* sub : {ball, solve, verify, sweep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (ball->parsed()) {
            std::vector<double> radii;
            if (ball_r->count()) radii.push_back(radius);
            else if (ball_rr->count()) radii = parse_range(radius_range);
            else throw std::invalid_argument("ball: provide --radius or --radius-range");
            return cmd_ball(space_spec, radii, format, output, plot_path);
        }
        if (solve->parsed())
            return cmd_solve(domain_path, mode_name, degree, format, output, strict);
        if (verify->parsed()) {
            std::optional<double> cross_check;
            if (v_br->count()) cross_check = v_ball_radius;
            return cmd_verify(v_domain, v_degree, v_mode, cross_check, seed, format, output);
        }
        if (sweep->parsed()) {
            std::vector<double> radii;
            if (sweep_r->count()) radii.push_back(s_radius);
            else if (sweep_rr->count()) radii = parse_range(s_radius_range);
            else throw std::invalid_argument("sweep: provide --radius or --radius-range");
            std::vector<double> eps_values = parse_range(s_eps_range);
            return cmd_sweep(radii, eps_values, s_harmonic, s_degree, s_jobs, seed, format,
                             output, s_plot);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}
