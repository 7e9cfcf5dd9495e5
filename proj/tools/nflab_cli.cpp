// Batch front door: parses one experiment configuration, runs the requested
// command, and emits a CSV or JSON report whose body is byte-identical across
// reruns of the same configuration and seed.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 a resource
// cap would be exceeded, 4 I/O failure, 1 anything unexpected.

#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nflab/config.hpp"
#include "nflab/diophantine.hpp"
#include "nflab/directional.hpp"
#include "nflab/errors.hpp"
#include "nflab/geometry.hpp"
#include "nflab/lattice.hpp"
#include "nflab/moments.hpp"
#include "nflab/presets.hpp"
#include "nflab/report.hpp"
#include "nflab/rng.hpp"
#include "nflab/version.hpp"

namespace {

using namespace nflab;

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string piece = text.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw ValidationError(what + ": '" + piece + "' is not a number");
        }
        pos = comma + 1;
    }
    return values;
}

WeightScheme build_weights(const FieldHandle& field, const ExperimentConfig& cfg) {
    if (cfg.weights == "equal") return equal_weights(field, cfg.m, cfg.n);
    std::vector<double> flat = parse_number_list(cfg.weights, "weights");
    const int places = field.num_places();
    const std::size_t need = static_cast<std::size_t>((cfg.m + cfg.n) * places);
    if (flat.size() != need)
        throw ValidationError("weights: expected " + std::to_string(need) +
                              " entries (x rows then y rows, one value per place), got " +
                              std::to_string(flat.size()));
    WeightScheme w;
    w.a.resize(cfg.m, places);
    w.b.resize(cfg.n, places);
    std::size_t k = 0;
    for (int i = 0; i < cfg.m; ++i)
        for (int v = 0; v < places; ++v) w.a(i, v) = flat[k++];
    for (int j = 0; j < cfg.n; ++j)
        for (int v = 0; v < places; ++v) w.b(j, v) = flat[k++];
    validate_weights(field, w);
    return w;
}

LatticeSpec build_lattice(const FieldHandle& field, const ExperimentConfig& cfg) {
    if (!cfg.theta.empty()) {
        const std::size_t need = static_cast<std::size_t>(cfg.m) * cfg.n;
        if (cfg.theta.size() != need)
            throw ValidationError("theta: expected " + std::to_string(need) +
                                  " row-major entries, got " + std::to_string(cfg.theta.size()));
        std::vector<Eigen::MatrixXcd> theta(
            static_cast<std::size_t>(field.num_places()),
            Eigen::MatrixXcd::Zero(cfg.m, cfg.n));
        for (int i = 0; i < cfg.m; ++i)
            for (int j = 0; j < cfg.n; ++j)
                for (int v = 0; v < field.num_places(); ++v)
                    theta[static_cast<std::size_t>(v)](i, j) =
                        cfg.theta[static_cast<std::size_t>(i) * cfg.n + j];
        return make_lattice(field, cfg.m, cfg.n, std::move(theta));
    }
    RngStream rng(cfg.theta_seed, 0);
    return random_theta_lattice(field, cfg.m, cfg.n, rng);
}

CapSpec parse_cap(const std::string& text) {
    if (text == "full") return CapSpec::full_sphere();
    if (text.rfind("hemisphere:", 0) == 0) {
        const std::string rest = text.substr(11);
        if (rest.size() < 2 || (rest[0] != '+' && rest[0] != '-'))
            throw ValidationError("cap: hemisphere wants '+i' or '-i', got '" + text + "'");
        int index = 0;
        try {
            index = std::stoi(rest.substr(1));
        } catch (const std::exception&) {
            throw ValidationError("cap: bad hemisphere index in '" + text + "'");
        }
        return CapSpec::hemisphere(index, rest[0] == '+' ? +1 : -1);
    }
    if (text.rfind("cap:", 0) == 0) {
        const std::size_t split = text.rfind(':');
        if (split == 3)
            throw ValidationError("cap: expected 'cap:coords:radius', got '" + text + "'");
        std::vector<double> coords =
            parse_number_list(text.substr(4, split - 4), "cap center");
        double radius = 0.0;
        try {
            radius = std::stod(text.substr(split + 1));
        } catch (const std::exception&) {
            throw ValidationError("cap: bad radius in '" + text + "'");
        }
        Eigen::VectorXd center(static_cast<Eigen::Index>(coords.size()));
        for (std::size_t i = 0; i < coords.size(); ++i)
            center[static_cast<Eigen::Index>(i)] = coords[i];
        if (center.norm() <= 0.0)
            throw ValidationError("cap: center must be a nonzero vector");
        return CapSpec::cap(center / center.norm(), radius);
    }
    throw ValidationError("cap: unknown descriptor '" + text +
                          "' (use full, hemisphere:+i, or cap:coords:radius)");
}

RegionSpec e_region(double c, double T) { return RegionSpec{RegionSpec::Kind::E, c, T, {}, {}}; }

void require_grid(const ExperimentConfig& cfg) {
    if (cfg.t_grid.empty())
        throw ValidationError("T grid: empty; give --T or --T-grid");
}

ReportTable run_count(const ExperimentConfig& cfg) {
    require_grid(cfg);
    FieldHandle field = field_from_preset(cfg.field);
    WeightScheme w = build_weights(field, cfg);
    LatticeSpec lattice = build_lattice(field, cfg);
    std::vector<SeriesPoint> series = error_series(lattice, w, cfg.c, cfg.t_grid);
    ReportTable table;
    table.columns = {"T", "count", "volume", "error"};
    for (const SeriesPoint& p : series)
        table.rows.push_back({format_number(p.T), std::to_string(p.count),
                              format_number(p.volume), format_number(p.error)});
    return table;
}

ReportTable run_volume(const ExperimentConfig& cfg) {
    require_grid(cfg);
    FieldHandle field = field_from_preset(cfg.field);
    WeightScheme w = build_weights(field, cfg);
    ReportTable table;
    table.columns = {"T", "analytic", "mc_estimate", "mc_stderr"};
    for (double T : cfg.t_grid) {
        const double analytic = analytic_volume_E(field, w, cfg.c, T);
        McResult mc = mc_volume(field, w, e_region(cfg.c, T), cfg.samples, cfg.seed);
        table.rows.push_back({format_number(T), format_number(analytic),
                              format_number(mc.estimate), format_number(mc.standard_error)});
    }
    return table;
}

ReportTable run_spiral(const ExperimentConfig& cfg) {
    require_grid(cfg);
    FieldHandle field = field_from_preset(cfg.field);
    WeightScheme w = build_weights(field, cfg);
    LatticeSpec lattice = build_lattice(field, cfg);
    CapSpec cap_x = parse_cap(cfg.cap_x);
    CapSpec cap_y = parse_cap(cfg.cap_y);
    ReportTable table;
    table.columns = {"T", "count_AB", "volume_AB", "count", "volume"};
    for (double T : cfg.t_grid) {
        const std::int64_t in_caps = count_directional(lattice, w, cfg.c, T, cap_x, cap_y);
        const double vol_caps =
            analytic_volume_AB(field, w, cfg.c, T, cap_x, cap_y, cfg.samples, cfg.seed);
        const std::int64_t all = count_approximates(lattice, w, e_region(cfg.c, T));
        table.rows.push_back({format_number(T), std::to_string(in_caps),
                              format_number(vol_caps), std::to_string(all),
                              format_number(analytic_volume_E(field, w, cfg.c, T))});
    }
    return table;
}

ReportTable run_verify(const ExperimentConfig& cfg) {
    FieldHandle field = field_from_preset(cfg.field);
    WeightScheme w = equal_weights(field, 1, 1);
    const double T = cfg.t_grid.empty() ? 3.0 : cfg.t_grid.front();
    RegionSpec region = e_region(cfg.c, T);
    validate_region(region);

    ReportTable table;
    table.columns = {"check_name", "lhs", "rhs", "margin", "pass"};
    auto add = [&table](const std::string& name, double lhs, double rhs, double margin,
                        bool pass) {
        table.rows.push_back({name, format_number(lhs), format_number(rhs),
                              format_number(margin), pass ? "true" : "false"});
    };

    // translate mean against the exact volume
    MomentReport siegel = siegel_translate_stats(field, w, region, 300, cfg.seed);
    add("translate_mean_matches_volume", siegel.empirical_mean, siegel.reference_value,
        3.0 * siegel.standard_error,
        std::abs(siegel.empirical_mean - siegel.reference_value) <=
            3.0 * siegel.standard_error);

    // spread of the translate counts stays a bounded multiple of the volume
    MomentReport spread = second_moment_stats(field, w, region, 300, cfg.seed + 1);
    const double ratio = spread.reference_value > 0.0
                             ? spread.empirical_variance / spread.reference_value
                             : 0.0;
    add("second_moment_ratio_bounded", ratio, 10.0, 10.0 - ratio, ratio < 10.0);

    // self-overlap reproduces the region volume
    KElem one{one_elem(field), one_elem(field)};
    McResult self = overlap_volume(field, w, region, one, cfg.samples, cfg.seed);
    add("overlap_self_consistency", self.estimate, siegel.reference_value,
        3.0 * self.standard_error,
        std::abs(self.estimate - siegel.reference_value) <= 3.0 * self.standard_error);

    // overlap with gamma = 2 under the placewise inclusion bound
    std::vector<std::int64_t> two_coords(static_cast<std::size_t>(field.degree), 0);
    two_coords[0] = 2;
    KElem two{make_elem(field, two_coords), one_elem(field)};
    KElem half{one_elem(field), make_elem(field, two_coords)};
    McResult twice = overlap_volume(field, w, region, two, cfg.samples, cfg.seed);
    const double bound =
        overlap_scale_factors(field, half).prod() * siegel.reference_value +
        3.0 * twice.standard_error;
    add("overlap_doubling_bound", twice.estimate, bound, bound - twice.estimate,
        twice.estimate <= bound);

    // coprime-pair tail sums tighten under cap doubling
    const double r500 = rogers_tail_sum(field, 3, 500.0);
    const double r1000 = rogers_tail_sum(field, 3, 1000.0);
    const double r2000 = rogers_tail_sum(field, 3, 2000.0);
    add("rogers_tail_cauchy", r2000 - r1000, r1000 - r500,
        (r1000 - r500) - (r2000 - r1000), r2000 - r1000 < r1000 - r500);

    // zeta bookkeeping chain is finite and above one
    const double chain = zeta_bound_value(field, 3, 2000.0);
    add("zeta_chain_exceeds_one", chain, 1.0, chain - 1.0, chain > 1.0);

    // unit-cube window sum truncation is sharp
    UnitCubeSum cube = unit_cube_sum(field, std::exp(1.0), 40);
    add("unit_cube_tail_small", cube.tail_bound, 1e-6, 1e-6 - cube.tail_bound,
        cube.tail_bound < 1e-6);

    // counting-function summation bound on the integers
    ThunderReport thunder =
        thunder_check(1.0, 1.0, 1.0, make_integer_oracle(),
                      [](double x) { return 1.0 / (x * x); }, 1e4);
    add("thunder_integer_bound", thunder.lhs, thunder.rhs, thunder.rhs - thunder.lhs,
        thunder.holds);

    // flow time-average sandwich on the configured lattice
    LatticeSpec lattice = build_lattice(field, cfg);
    SandwichReport sandwich = time_average_sandwich(lattice, w, cfg.c, 2.0, 10.0, 0.05);
    add("sandwich_lower", static_cast<double>(sandwich.lower),
        sandwich.middle + sandwich.slack,
        sandwich.middle + sandwich.slack - static_cast<double>(sandwich.lower),
        static_cast<double>(sandwich.lower) <= sandwich.middle + sandwich.slack);
    add("sandwich_upper", sandwich.middle,
        static_cast<double>(sandwich.upper) + sandwich.slack,
        static_cast<double>(sandwich.upper) + sandwich.slack - sandwich.middle,
        sandwich.middle <= static_cast<double>(sandwich.upper) + sandwich.slack);

    // partition asymptotic ratio
    const double kk = knessl_keller_ratio(3, 200);
    add("partition_ratio_near_one", kk, 1.0, 0.25 - std::abs(kk - 1.0),
        std::abs(kk - 1.0) <= 0.25);

    // signed-vector decomposition tiles the cube
    std::int64_t tiled = 0;
    for (std::int64_t M = 0; M <= 12; ++M)
        for (std::int64_t N = 0; N <= 12; ++N) tiled += z_count_in_box(3, M, N, 4);
    add("z_partition_identity", static_cast<double>(tiled), 729.0,
        static_cast<double>(tiled) - 729.0, tiled == 729);

    return table;
}

ReportTable run_scaling(const ExperimentConfig& cfg, std::vector<std::string>& extra_header) {
    require_grid(cfg);
    FieldHandle field = field_from_preset(cfg.field);
    WeightScheme w = build_weights(field, cfg);
    LatticeSpec lattice = build_lattice(field, cfg);
    std::vector<SeriesPoint> series = error_series(lattice, w, cfg.c, cfg.t_grid);
    ReportTable table;
    table.columns = {"T", "count", "volume", "error", "target_rate"};
    const double ee = std::exp(std::exp(1.0));
    for (const SeriesPoint& p : series) {
        const std::string rate =
            p.T > ee ? format_number(target_rate(p.T, 0.01)) : std::string("nan");
        table.rows.push_back({format_number(p.T), std::to_string(p.count),
                              format_number(p.volume), format_number(p.error), rate});
    }
    try {
        ScalingFit fit = fit_scaling_exponent(series, 0.0);
        extra_header.push_back("fit_slope: " + format_number(fit.slope));
        extra_header.push_back("fit_r_squared: " + format_number(fit.r_squared));
        extra_header.push_back("fit_points: " + std::to_string(fit.points_used));
    } catch (const ValidationError& e) {
        extra_header.push_back(std::string("fit: unavailable (") + e.what() + ")");
    }
    return table;
}

ReportTable run_ideals(const ExperimentConfig& cfg, std::vector<std::string>& extra_header) {
    require_grid(cfg);
    FieldHandle field = field_from_preset(cfg.field);
    ReportTable table;
    table.columns = {"s", "count", "count_over_s"};
    double sum_s = 0.0, sum_c = 0.0, sum_ss = 0.0, sum_sc = 0.0;
    for (double s : cfg.t_grid) {
        const std::int64_t count = count_principal_ideals(field, s);
        table.rows.push_back({format_number(s), std::to_string(count),
                              format_number(static_cast<double>(count) / s)});
        sum_s += s;
        sum_c += static_cast<double>(count);
        sum_ss += s * s;
        sum_sc += s * static_cast<double>(count);
    }
    const double k = static_cast<double>(cfg.t_grid.size());
    const double denom = k * sum_ss - sum_s * sum_s;
    if (cfg.t_grid.size() >= 2 && denom > 0.0)
        extra_header.push_back("chi_fit_slope: " +
                               format_number((k * sum_sc - sum_s * sum_c) / denom));
    return table;
}

ReportTable run_presets() {
    ReportTable table;
    table.columns = {"name", "degree", "real_places", "complex_places", "unit_rank"};
    for (const std::string& name : list_presets()) {
        FieldHandle field = field_from_preset(name);
        table.rows.push_back({name, std::to_string(field.degree),
                              std::to_string(field.num_real),
                              std::to_string(field.num_complex),
                              std::to_string(field.unit_rank)});
    }
    return table;
}

void add_common_options(CLI::App* sub, ExperimentConfig& cfg, double* t_single,
                        std::vector<std::string>* caps) {
    sub->add_option("--field", cfg.field, "field preset name or JSON path");
    sub->add_option("--m", cfg.m, "x-block rows")->check(CLI::PositiveNumber);
    sub->add_option("--n", cfg.n, "y-block rows")->check(CLI::PositiveNumber);
    sub->add_option("--weights", cfg.weights,
                    "'equal' or flat comma list (x rows then y rows, per place)");
    auto* theta = sub->add_option("--theta", cfg.theta,
                                  "explicit row-major theta entries, broadcast to places")
                      ->delimiter(',');
    auto* theta_seed =
        sub->add_option("--theta-seed", cfg.theta_seed, "draw theta from this seed");
    theta->excludes(theta_seed);
    sub->add_option("--c", cfg.c, "product bound of the region");
    auto* t_one = sub->add_option("--T", *t_single, "single window size");
    auto* t_many =
        sub->add_option("--T-grid", cfg.t_grid, "comma list of window sizes")->delimiter(',');
    t_one->excludes(t_many);
    sub->add_option("--caps", *caps,
                    "direction caps (one for both blocks, or x y): full, "
                    "hemisphere:+i, or cap:coords:radius")
        ->expected(1, 2);
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample budget")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "master seed for randomized estimates");
    sub->add_option("--workers", cfg.workers,
                    "worker count (orchestration only; results never depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output path, '-' for standard output");
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"number-field weighted Diophantine approximation laboratory"};
    app.set_version_flag("--version", std::string("nflab ") + nflab::kVersion);
    app.require_subcommand(1);

    nflab::ExperimentConfig cfg;
    double t_single = std::nan("");
    std::vector<std::string> caps;
    for (const char* name : {"count", "volume", "spiral", "verify", "scaling", "ideals"})
        add_common_options(app.add_subcommand(name, ""), cfg, &t_single, &caps);
    app.add_subcommand("presets", "list the built-in field presets");

    app.get_subcommand("count")->description("lattice counts against exact volumes");
    app.get_subcommand("volume")->description("analytic and Monte Carlo region volumes");
    app.get_subcommand("spiral")->description("directional counts under sphere caps");
    app.get_subcommand("verify")->description("verification battery over one field");
    app.get_subcommand("scaling")->description("count-volume error growth along a T grid");
    app.get_subcommand("ideals")->description("principal ideal counts by norm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (!std::isnan(t_single)) cfg.t_grid = {t_single};
    cfg.theta_from_seed = cfg.theta.empty();
    if (caps.size() == 1) {
        cfg.cap_x = caps[0];
        cfg.cap_y = caps[0];
    } else if (caps.size() == 2) {
        cfg.cap_x = caps[0];
        cfg.cap_y = caps[1];
    }

    try {
        std::vector<std::string> extra_header;
        nflab::ReportTable table;
        if (cfg.command == "count") table = run_count(cfg);
        else if (cfg.command == "volume") table = run_volume(cfg);
        else if (cfg.command == "spiral") table = run_spiral(cfg);
        else if (cfg.command == "verify") table = run_verify(cfg);
        else if (cfg.command == "scaling") table = run_scaling(cfg, extra_header);
        else if (cfg.command == "ideals") table = run_ideals(cfg, extra_header);
        else table = run_presets();

        nflab::ReportMeta meta{cfg.command, nflab::config_hash(cfg),
                               std::to_string(cfg.seed), nflab::utc_timestamp()};
        std::string content = cfg.format == "json" ? nflab::render_json(meta, table)
                                                   : nflab::render_csv(meta, table);
        if (cfg.format == "csv" && !extra_header.empty()) {
            // fit summaries ride along as comments so the body schema stays fixed
            std::string lines;
            for (const std::string& item : extra_header) lines += "# " + item + "\n";
            const std::size_t header_end = content.find("\n# created");
            const std::size_t insert_at = content.find('\n', header_end + 1) + 1;
            content.insert(insert_at, lines);
        }
        nflab::write_report(cfg.out, content);
        return 0;
    } catch (const nflab::ValidationError& e) {
        std::cerr << "error (validation): " << e.what() << "\n";
        return 2;
    } catch (const nflab::ResourceError& e) {
        std::cerr << "error (resource cap): " << e.what() << "\n";
        return 3;
    } catch (const nflab::IoError& e) {
        std::cerr << "error (io): " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
