#pragma once
// Command-line front end: argument parsing into a RunSpec and execution of one
// run into a comment-prefixed, comma-delimited table.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "diffusion.hpp"
#include "errors.hpp"
#include "freepath.hpp"
#include "montecarlo.hpp"
#include "transform.hpp"

namespace glbe::cli {

inline constexpr std::string_view version = "1.0.0";

enum class Command { profile, moments, spectrum, mc, invert, audit };

inline std::string_view command_name(Command c) {
    switch (c) {
        case Command::profile: return "profile";
        case Command::moments: return "moments";
        case Command::spectrum: return "spectrum";
        case Command::mc: return "mc";
        case Command::invert: return "invert";
        case Command::audit: return "audit";
    }
    return "?";
}

enum ExitCode : int { ok = 0, bad_arguments = 2, unavailable = 3, numeric_failure = 4, breakdown = 5 };

struct RunSpec {
    Command command = Command::profile;
    std::string model = "exp";
    double d = 3.0;
    double c = 0.5;
    Quantity quantity = Quantity::collision;
    std::optional<int> order;  // empty: total over all orders
    std::vector<double> r_grid;
    std::vector<Flavor> flavors = {Flavor::p1, Flavor::grosjean, Flavor::rigorous};
    std::vector<int> moments = {0, 2, 4};
    bool with_mc = false;
    std::uint64_t histories = 100000;
    int n_max = 10;
    double tail_epsilon = 1e-9;
    unsigned workers = 1;
    int shells = 64;
    std::uint64_t seed = 1;
    std::string output;  // empty: the caller's stream
    bool exact_only = false;
    bool require_rigorous = false;

    TransportProblem problem() const { return TransportProblem(FreePathModel::parse(model), d, c); }
    SolutionKey key() const { return {quantity, order}; }
    bool wants(Flavor f) const { return std::find(flavors.begin(), flavors.end(), f) != flavors.end(); }

    McConfig mc_config(std::vector<double> edges) const {
        McConfig cfg{problem(), histories, std::move(edges)};
        cfg.n_max = n_max;
        cfg.tail_epsilon = tail_epsilon;
        cfg.master_seed = seed;
        cfg.workers = workers;
        return cfg;
    }
};

struct ParseOutcome {
    std::optional<RunSpec> spec;
    int exit_code = ExitCode::ok;  // meaningful when spec is empty
};

// Parses argv (argv[0] is the program name). Usage and diagnostics go to `out`
// and `err`; on failure the outcome carries no spec and the exit code to use.
inline ParseOutcome parse(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunSpec spec;
    CLI::App app{"Generalized linear Boltzmann equation: point-source solutions, diffusion approximations "
                 "and Monte Carlo checks",
                 "glbe"};
    app.set_version_flag("--version", std::string(version));
    app.set_config("--config", "", "flat key = value file; flags given on the command line take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    const std::map<std::string, Command> commands = {
        {"profile", Command::profile}, {"moments", Command::moments}, {"spectrum", Command::spectrum},
        {"mc", Command::mc},           {"invert", Command::invert},   {"audit", Command::audit}};
    const std::map<std::string, Quantity> quantities = {{"collision", Quantity::collision},
                                                        {"flux", Quantity::flux}};
    const std::map<std::string, Flavor> flavors = {
        {"p1", Flavor::p1}, {"grosjean", Flavor::grosjean}, {"rigorous", Flavor::rigorous}};

    app.add_option("command", spec.command, "profile | moments | spectrum | mc | invert | audit")
        ->required()
        ->transform(CLI::CheckedTransformer(commands, CLI::ignore_case));
    app.add_option("--model", spec.model, "exp, pearson, gamma:k=<v>, chi:k=<v>, betaprime:k=<v>, besselk:m=<v>")
        ->capture_default_str();
    app.add_option("--d", spec.d, "dimension (real, >= 1)")->capture_default_str();
    app.add_option("--c", spec.c, "single-scattering albedo in (0, 1)")->capture_default_str();
    app.add_option("--quantity", spec.quantity, "collision | flux")
        ->transform(CLI::CheckedTransformer(quantities, CLI::ignore_case));
    int order = -1;
    app.add_option("--order", order, "collision order n (default: total over all orders)");
    app.add_option("--r", spec.r_grid, "comma-separated radii")->delimiter(',');
    double r_min = 0.25, r_max = 5.0;
    int points = 20;
    app.add_option("--r-min", r_min, "first radius of a uniform grid")->capture_default_str();
    app.add_option("--r-max", r_max, "last radius of a uniform grid")->capture_default_str();
    app.add_option("--points", points, "number of radii in the uniform grid")->capture_default_str()->check(
        CLI::PositiveNumber);
    std::vector<std::string> flavor_names;
    app.add_option("--flavors", flavor_names, "comma-separated subset of p1,grosjean,rigorous")
        ->delimiter(',')
        ->check(CLI::IsMember(flavors));
    app.add_option("--m", spec.moments, "comma-separated even moment orders")->delimiter(',');
    app.add_flag("--mc", spec.with_mc, "add a Monte Carlo column (profile, audit)");
    app.add_option("--histories", spec.histories, "Monte Carlo histories")->capture_default_str();
    app.add_option("--n-max", spec.n_max, "highest separately tallied collision order")->capture_default_str();
    app.add_option("--tail-epsilon", spec.tail_epsilon, "weight below which a history is terminated")
        ->capture_default_str();
    app.add_option("--shells", spec.shells, "Monte Carlo radial shells")->capture_default_str()->check(
        CLI::PositiveNumber);
    app.add_option("--seed", spec.seed, "Monte Carlo master seed")->capture_default_str();
    app.add_option("--workers", spec.workers, "Monte Carlo worker threads")
        ->envname("GLBE_WORKERS")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--out", spec.output, "output file (default: standard output)");
    app.add_flag("--exact-only", spec.exact_only, "fail with status 3 instead of inverting numerically");
    app.add_flag("--require-rigorous", spec.require_rigorous,
                 "fail with status 5 when the rigorous diffusion approximation breaks down");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return {std::nullopt, code == 0 ? ExitCode::ok : ExitCode::bad_arguments};
    }

    try {
        if (order >= 0) spec.order = order;
        if (!flavor_names.empty()) {
            spec.flavors.clear();
            for (const auto& f : flavor_names) spec.flavors.push_back(flavors.at(f));
        }
        if (spec.r_grid.empty()) {
            if (!(r_min > 0.0 && r_max >= r_min)) throw DomainError("need 0 < r-min <= r-max");
            for (int i = 0; i < points; ++i) {
                spec.r_grid.push_back(points == 1 ? r_min : r_min + (r_max - r_min) * i / (points - 1));
            }
        }
        for (double r : spec.r_grid) {
            if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radii must be positive and finite");
        }
        for (int m : spec.moments) {
            if (m < 0 || m % 2 != 0) throw DomainError("moment orders must be non-negative even integers");
        }
        if (spec.order) {
            const int lowest = spec.quantity == Quantity::collision ? 1 : 0;
            if (*spec.order < lowest) throw DomainError("collision orders start at 1, flux orders at 0");
        }
        (void)spec.problem();
        if (spec.with_mc || spec.command == Command::mc) (void)spec.mc_config({}).validate();
    } catch (const DomainError& e) {
        err << "glbe: " << e.what() << "\n" << app.help();
        return {std::nullopt, ExitCode::bad_arguments};
    }
    return {std::move(spec), ExitCode::ok};
}

namespace cli_detail {

inline std::string cell(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string cell(std::optional<double> v) { return v ? cell(*v) : "NA"; }

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline double rel_err(double approx, double exact) {
    if (!std::isfinite(approx) || !std::isfinite(exact) || exact == 0.0) return nan();
    return (approx - exact) / exact;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) : width_(header.size()) { row(header); }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw std::logic_error("table row has the wrong width");
        for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
        body_ << "\n";
    }
    std::string str() const { return body_.str(); }

private:
    std::size_t width_;
    std::ostringstream body_;
};

// Raised when --exact-only meets a case without a closed form.
class Unavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised after the table is complete when --require-rigorous meets a breakdown.
struct Breakdown {
    std::string message;
};

struct Run {
    const RunSpec& spec;
    TransportProblem problem;
    std::vector<std::string> notes;
    bool broke_down = false;

    std::string preamble() const {
        std::ostringstream os;
        os << "# glbe " << version << "\n";
        os << "# command: " << command_name(spec.command) << "\n";
        os << "# model: " << problem.model().spec() << "\n";
        os << "# d: " << cell(spec.d) << "\n";
        os << "# c: " << cell(spec.c) << "\n";
        os << "# quantity: " << quantity_name(spec.quantity) << "\n";
        os << "# order: " << (spec.order ? std::to_string(*spec.order) : std::string("total")) << "\n";
        if (spec.with_mc) {
            os << "# mc: histories=" << spec.histories << " seed=" << spec.seed << " n_max=" << spec.n_max
               << " tail_epsilon=" << cell(spec.tail_epsilon) << "\n";
        }
        for (const auto& n : notes) os << "# note: " << n << "\n";
        return os.str();
    }

    // No mode at all, or only modes of zero weight sitting on the abscissa.
    static bool degenerate(const DiffusionApproximation& a) {
        if (a.breakdown()) return true;
        return a.flavor() == Flavor::rigorous &&
               std::all_of(a.modes().begin(), a.modes().end(), [](const DiffusionMode& m) { return m.weight == 0.0; });
    }

    void note_warnings(const DiffusionApproximation& a) {
        for (const auto& w : a.warnings()) notes.push_back(std::string(flavor_name(a.flavor())) + ": " + w);
        if (degenerate(a)) broke_down = true;
    }

    std::optional<DiffusionApproximation> approximation(Flavor f) {
        if (!spec.wants(f) || spec.order) return std::nullopt;
        try {
            DiffusionApproximation a = f == Flavor::p1         ? p1_approximation(problem, spec.quantity)
                                       : f == Flavor::grosjean ? grosjean_approximation(problem, spec.quantity)
                                                               : rigorous_approximation(problem, spec.quantity);
            note_warnings(a);
            return a;
        } catch (const DomainError& e) {
            notes.push_back(std::string(flavor_name(f)) + " unavailable: " + e.what());
            return std::nullopt;
        }
    }

    // Pointwise value; a delta-shaped uncollided term is left out away from its support.
    static double value_at(const std::optional<DiffusionApproximation>& a, double r) {
        if (!a || degenerate(*a)) return nan();
        try {
            return a->evaluate(r);
        } catch (const UnsupportedQuery&) {
            return r == 1.0 ? nan() : a->diffusive_part(r);
        }
    }

    static double moment_of(const std::optional<DiffusionApproximation>& a, int m) {
        if (!a || degenerate(*a)) return nan();
        try {
            return a->moment(m);
        } catch (const UnsupportedQuery&) {
            return nan();
        }
    }

    double exact_at(double r) {
        try {
            if (auto v = exact_density(problem, spec.key(), r)) return *v;
        } catch (const UnsupportedQuery&) {
            return nan();
        }
        if (spec.exact_only) throw Unavailable("no closed form for this density; drop --exact-only to invert numerically");
        return numerical_density(problem, spec.key(), r).value;
    }

    double exact_moment_of(int m) {
        if (auto v = exact_moment(problem, spec.key(), m)) return *v;
        if (spec.exact_only) throw Unavailable("no closed form for this moment; drop --exact-only to evaluate numerically");
        return numeric_moment(m);
    }

    double numeric_moment(int m) const {
        return even_moment([&](double z) { return solution_transform(problem, spec.key(), z); }, problem.d(), m);
    }

    void check_breakdown() const {
        if (broke_down && spec.require_rigorous) {
            throw Breakdown{"rigorous diffusion approximation broke down for " + problem.model().spec() +
                            " (no discrete eigenvalue with non-zero weight)"};
        }
    }

    std::string profile() {
        const auto p1 = approximation(Flavor::p1);
        const auto grosjean = approximation(Flavor::grosjean);
        const auto rigorous = approximation(Flavor::rigorous);
        std::optional<TallySet> tallies;
        if (spec.with_mc) {
            const double r_max = *std::max_element(spec.r_grid.begin(), spec.r_grid.end());
            tallies = run(spec.mc_config(uniform_shells(1.05 * r_max, spec.shells)));
        }
        Table t({"r", "exact", "p1", "grosjean", "rigorous", "mc", "mc_err", "rel_err_p1", "rel_err_grosjean",
                 "rel_err_rigorous"});
        for (double r : spec.r_grid) {
            const double exact = exact_at(r);
            const double v1 = value_at(p1, r), vg = value_at(grosjean, r), vr = value_at(rigorous, r);
            double mc = nan(), mc_err = nan();
            if (tallies) {
                if (auto est = density_estimate(*tallies, spec.key(), r)) {
                    mc = est->value;
                    mc_err = est->std_error;
                }
            }
            t.row({cell(r), cell(exact), cell(v1), cell(vg), cell(vr), cell(mc), cell(mc_err), cell(rel_err(v1, exact)),
                   cell(rel_err(vg, exact)), cell(rel_err(vr, exact))});
        }
        return t.str();
    }

    std::string spectrum() {
        const Spectrum s = discrete_spectrum(problem);
        auto weight = [&](Quantity q, double chi) {
            try {
                return residue_weight(problem, q, chi);
            } catch (const NumericError& e) {
                notes.push_back(std::string("residue for ") + std::string(quantity_name(q)) + ": " + e.what());
                return nan();
            }
        };
        Table t({"index", "nu0", "chi", "residual", "weight_collision", "weight_flux", "breakdown"});
        if (s.breakdown()) {
            broke_down = true;
            notes.push_back("no discrete eigenvalue: the rigorous diffusion approximation breaks down");
            t.row({"0", "NA", "NA", "NA", "NA", "NA", "1"});
        }
        for (std::size_t i = 0; i < s.eigen_lengths.size(); ++i) {
            const double nu = s.eigen_lengths[i], chi = 1.0 / nu;
            const double wc = weight(Quantity::collision, chi), wf = weight(Quantity::flux, chi);
            const bool dead = wc == 0.0;
            if (i == 0 && dead) broke_down = true;
            t.row({std::to_string(i), cell(nu), cell(chi), cell(s.search_report.residuals[i]), cell(wc), cell(wf),
                   dead ? "1" : "0"});
        }
        return t.str();
    }

    std::string audit() {
        const auto p1 = approximation(Flavor::p1);
        const auto grosjean = approximation(Flavor::grosjean);
        std::optional<TallySet> tallies;
        if (spec.with_mc) tallies = run(spec.mc_config({}));
        Table t({"m", "exact", "approx_p1", "approx_grosjean", "mc", "mc_err"});
        for (int m : spec.moments) {
            double mc = nan(), mc_err = nan();
            if (tallies && std::find(mc_moment_orders.begin(), mc_moment_orders.end(), m) != mc_moment_orders.end()) {
                const Estimate e = moment_estimate(*tallies, spec.key(), m);
                mc = e.value;
                mc_err = e.std_error;
            }
            t.row({std::to_string(m), cell(exact_moment_of(m)), cell(moment_of(p1, m)), cell(moment_of(grosjean, m)),
                   cell(mc), cell(mc_err)});
        }
        return t.str();
    }

    std::string moments() {
        Table t({"m", "exact", "numeric", "rel_diff"});
        for (int m : spec.moments) {
            const std::optional<double> exact = exact_moment(problem, spec.key(), m);
            if (!exact && spec.exact_only) throw Unavailable("no closed form for moment m = " + std::to_string(m));
            const double numeric = numeric_moment(m);
            t.row({std::to_string(m), cell(exact), cell(numeric), cell(exact ? rel_err(numeric, *exact) : nan())});
        }
        return t.str();
    }

    std::string invert() {
        Table t({"r", "value", "est_error"});
        for (double r : spec.r_grid) {
            const QuadratureReport q = numerical_density(problem, spec.key(), r);
            t.row({cell(r), cell(q.value), cell(q.est_error)});
        }
        return t.str();
    }

    std::string tallies() {
        const double r_max = *std::max_element(spec.r_grid.begin(), spec.r_grid.end());
        const McConfig cfg = spec.mc_config(uniform_shells(r_max, spec.shells));
        std::ostringstream os;
        write_tallies(os, run(cfg), &cfg);
        return os.str();
    }
};

}  // namespace cli_detail

// Runs one command. The table goes to spec.output, or to `out` when no path is
// given; diagnostics go to `err`. Returns the process exit status.
inline int execute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    using namespace cli_detail;
    std::string text;
    int status = ExitCode::ok;
    try {
        Run run{spec, spec.problem(), {}};
        std::string body;
        switch (spec.command) {
            case Command::profile: body = run.profile(); break;
            case Command::spectrum: body = run.spectrum(); break;
            case Command::audit: body = run.audit(); break;
            case Command::moments: body = run.moments(); break;
            case Command::invert: body = run.invert(); break;
            case Command::mc: body = run.tallies(); break;
        }
        text = spec.command == Command::mc ? body : run.preamble() + body;
        try {
            run.check_breakdown();
        } catch (const Breakdown& b) {
            err << "glbe: " << b.message << "\n";
            status = ExitCode::breakdown;
        }
    } catch (const Unavailable& e) {
        err << "glbe: " << e.what() << "\n";
        return ExitCode::unavailable;
    } catch (const DomainError& e) {
        err << "glbe: " << e.what() << "\n";
        return ExitCode::bad_arguments;
    } catch (const DivergenceError& e) {
        err << "glbe: numeric failure: " << e.what() << "\n";
        return ExitCode::numeric_failure;
    } catch (const NumericError& e) {
        err << "glbe: numeric failure: " << e.what() << "\n";
        return ExitCode::numeric_failure;
    } catch (const ConvergenceError& e) {
        err << "glbe: numeric failure: " << e.what() << "\n";
        return ExitCode::numeric_failure;
    } catch (const UnsupportedQuery& e) {
        err << "glbe: " << e.what() << "\n";
        return ExitCode::bad_arguments;
    }

    if (spec.output.empty()) {
        out << text;
    } else {
        std::ofstream file(spec.output, std::ios::binary);
        if (!file || !(file << text)) {
            err << "glbe: cannot write " << spec.output << "\n";
            return ExitCode::bad_arguments;
        }
    }
    return status;
}

}  // namespace glbe::cli
