// qirlab command line: simulation lab, Monte Carlo tables, empirical
// estimation with bootstrap bands, and figure generation.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qirlab/ingest.hpp"
#include "qirlab/lp.hpp"
#include "qirlab/parallel.hpp"
#include "qirlab/rng.hpp"
#include "qirlab/surface_io.hpp"
#include "qirlab/svar.hpp"
#include "qirlab/svg.hpp"
#include "qirlab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qirlab;

namespace {

const std::vector<std::string> kPalette = {"#1f6fb2", "#d1495b", "#2e8b57",
                                           "#8d6cab", "#c88a2d", "#4a4a4a"};

std::vector<double> parse_taus(const std::string& list) {
    std::vector<double> taus;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        taus.push_back(std::stod(item));
    }
    if (taus.empty()) throw CLI::ValidationError("--taus", "no quantiles parsed from '" + list + "'");
    for (const double t : taus)
        if (!(t > 0.0 && t < 1.0))
            throw CLI::ValidationError("--taus", "quantiles must lie in (0,1)");
    return taus;
}

std::uint64_t env_seed_default() {
    if (const char* env = std::getenv("QIRLAB_SEED")) return std::strtoull(env, nullptr, 10);
    return 42;
}

std::string tau_tag(double tau) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", tau);
    return buf;
}

OutputStamp make_stamp(const json& config, std::uint64_t seed) {
    OutputStamp stamp;
    stamp.config_hash = config_hash(config.dump());
    stamp.seed = seed;
    stamp.version = std::string("qirlab ") + kVersion;
    for (const auto& [k, v] : config.items())
        stamp.extra[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return stamp;
}

std::vector<std::string> stamp_lines(const OutputStamp& stamp) {
    std::vector<std::string> lines;
    lines.push_back("config-hash: " + stamp.config_hash);
    lines.push_back("seed: " + std::to_string(stamp.seed));
    lines.push_back("version: " + stamp.version);
    lines.push_back(std::string("generator: ") + kGeneratorName);
    return lines;
}

void write_table_csv(const fs::path& path, const OutputStamp& stamp, const std::string& header,
                     const std::vector<std::string>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# config-hash: " << stamp.config_hash << "\n";
    out << "# seed: " << stamp.seed << "\n";
    out << "# version: " << stamp.version << "\n";
    out << "# generator: " << kGeneratorName << "\n";
    for (const auto& [k, v] : stamp.extra) out << "# " << k << ": " << v << "\n";
    out << header << "\n";
    for (const auto& row : rows) out << row << "\n";
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// figures
// ---------------------------------------------------------------------------

void write_qir_figures(const fs::path& dir, const QirSurface& surface, const OutputStamp& stamp) {
    const auto meta = stamp_lines(stamp);
    std::vector<double> horizons;
    for (int h = 0; h <= surface.max_horizon; ++h) horizons.push_back(h);

    // All quantile paths on one axis.
    SvgChart all;
    all.title = "Quantile impulse responses (" + to_string(surface.estimator) + ")";
    all.x_label = "horizon (months)";
    all.y_label = "response";
    all.metadata = meta;
    for (Eigen::Index r = 0; r < surface.n_rows(); ++r) {
        SvgSeries s;
        s.x = horizons;
        for (int h = 0; h <= surface.max_horizon; ++h) s.y.push_back(surface.estimates(r, h));
        s.color = kPalette[static_cast<std::size_t>(r) % kPalette.size()];
        s.label = surface.quantiles.empty()
                      ? "mean"
                      : "tau=" + tau_tag(surface.quantiles[static_cast<std::size_t>(r)]);
        all.series.push_back(std::move(s));
    }
    write_svg_chart(dir / "qir_paths.svg", all);

    // One figure per quantile with its confidence band.
    for (Eigen::Index r = 0; r < surface.n_rows(); ++r) {
        const double tau = surface.quantiles.empty() ? 0.5 : surface.quantiles[static_cast<std::size_t>(r)];
        SvgChart chart;
        chart.title = surface.quantiles.empty() ? "Mean impulse response"
                                                : "QIR at tau=" + tau_tag(tau);
        chart.x_label = "horizon (months)";
        chart.y_label = "response";
        chart.metadata = meta;
        if (surface.has_bands()) {
            SvgBand band;
            band.x = horizons;
            for (int h = 0; h <= surface.max_horizon; ++h) {
                band.lo.push_back(surface.lower(r, h));
                band.hi.push_back(surface.upper(r, h));
            }
            chart.bands.push_back(std::move(band));
        }
        SvgSeries s;
        s.x = horizons;
        for (int h = 0; h <= surface.max_horizon; ++h) s.y.push_back(surface.estimates(r, h));
        s.dashed = true;
        chart.series.push_back(std::move(s));
        const std::string name = surface.quantiles.empty()
                                     ? std::string("qir_path_mean.svg")
                                     : "qir_path_tau_" + tau_tag(tau) + ".svg";
        write_svg_chart(dir / name, chart);
    }

    // Quantile sweeps at selected horizons.
    if (!surface.quantiles.empty() && surface.quantiles.size() >= 4) {
        for (const int h : {6, 12, 18, 24}) {
            if (h > surface.max_horizon) continue;
            SvgChart chart;
            chart.title = "Response by quantile, h=" + std::to_string(h);
            chart.x_label = "quantile (x100)";
            chart.y_label = "response";
            chart.metadata = meta;
            std::vector<double> xs;
            for (const double tau : surface.quantiles) xs.push_back(100.0 * tau);
            if (surface.has_bands()) {
                SvgBand band;
                band.x = xs;
                for (Eigen::Index r = 0; r < surface.n_rows(); ++r) {
                    band.lo.push_back(surface.lower(r, h));
                    band.hi.push_back(surface.upper(r, h));
                }
                chart.bands.push_back(std::move(band));
            }
            SvgSeries s;
            s.x = xs;
            for (Eigen::Index r = 0; r < surface.n_rows(); ++r) s.y.push_back(surface.estimates(r, h));
            s.markers = true;
            chart.series.push_back(std::move(s));
            write_svg_chart(dir / ("qir_sweep_h" + std::to_string(h) + ".svg"), chart);
        }
    }
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_simulate(const DgpParams& params, Eigen::Index t, int burn_in, std::uint64_t seed,
                 const std::vector<double>& taus, const std::vector<int>& horizons, int bins,
                 const fs::path& out_dir) {
    json config = {{"command", "simulate"}, {"T", t},           {"burn_in", burn_in},
                   {"phi", params.phi},     {"rho_y", params.rho_y}, {"rho_d", params.rho_d},
                   {"delta_dy", params.delta_dy}, {"delta_yd", params.delta_yd},
                   {"gamma", params.gamma}, {"bins", bins}};
    const OutputStamp stamp = make_stamp(config, seed);

    SimConfig sim_config;
    sim_config.sample_length = t;
    sim_config.burn_in = burn_in;
    sim_config.seed = seed;
    const SimPath path = simulate(params, sim_config);

    std::vector<std::string> rows;
    for (Eigen::Index i = 0; i < path.y.size(); ++i)
        rows.push_back(std::to_string(i) + "," + num(path.y[i]) + "," + num(path.d[i]) + "," +
                       num(path.z_y[i]) + "," + num(path.z_d[i]));
    write_table_csv(out_dir / "simpath.csv", stamp, "t,Y,D,ZY,ZD", rows);

    std::vector<std::string> sqf_rows;
    for (const int h : horizons) {
        const BinnedSqf sqf = sqf_by_binning(path, h, taus, bins);
        for (const auto& w : sqf.warnings) std::cerr << "warning: " << w << "\n";
        for (std::size_t q = 0; q < taus.size(); ++q)
            for (int b = 0; b < bins; ++b)
                sqf_rows.push_back(num(taus[q]) + "," + std::to_string(h) + "," +
                                   std::to_string(b) + "," + num(sqf.bin_mid[b]) + "," +
                                   num(sqf.quantiles(static_cast<Eigen::Index>(q), b)));

        SvgChart chart;
        chart.title = "Structural quantile function by binning, h=" + std::to_string(h);
        chart.x_label = "structural shock Z^D";
        chart.y_label = "cumulative outcome quantile";
        chart.metadata = stamp_lines(stamp);
        for (std::size_t q = 0; q < taus.size(); ++q) {
            SvgSeries s;
            for (int b = 0; b < bins; ++b) {
                s.x.push_back(sqf.bin_mid[b]);
                s.y.push_back(sqf.quantiles(static_cast<Eigen::Index>(q), b));
            }
            s.markers = true;
            s.color = kPalette[q % kPalette.size()];
            s.label = "tau=" + tau_tag(taus[q]);
            chart.series.push_back(std::move(s));
        }
        write_svg_chart(out_dir / ("sqf_h" + std::to_string(h) + ".svg"), chart);
    }
    write_table_csv(out_dir / "sqf_bins.csv", stamp, "tau,h,bin,z_mid,quantile", sqf_rows);
    return 0;
}

int cmd_mc_table(const DgpParams& params, const SimConfig& sim_config, int max_horizon,
                 const std::vector<double>& taus, const LpConfig& lp_config,
                 const fs::path& out_dir) {
    json config = {{"command", "mc-table"},       {"T", sim_config.sample_length},
                   {"burn_in", sim_config.burn_in}, {"mc_reps", sim_config.mc_reps},
                   {"phi", params.phi},           {"H", max_horizon}};
    const OutputStamp stamp = make_stamp(config, sim_config.seed);

    const McTable table = monte_carlo(
        params, sim_config,
        {EstimatorKind::QlpNoControls, EstimatorKind::QlpWithControls, EstimatorKind::GqrLp},
        max_horizon, taus, lp_config);

    std::vector<std::string> rows;
    for (const auto& row : table.rows)
        rows.push_back(num(row.tau) + "," + std::to_string(row.horizon) + "," +
                       to_string(row.estimator) + "," + num(row.mean_bias) + "," + num(row.rmse) +
                       "," + num(row.truth) + "," + std::to_string(row.reps_used) + "," +
                       std::to_string(row.failures));
    write_table_csv(out_dir / "mc_table.csv", stamp,
                    "quantile,horizon,estimator,mean_bias,rmse,truth,reps_used,failures", rows);
    return 0;
}

int cmd_estimate(const fs::path& manifest_path, const std::string& treatment, int max_horizon,
                 const std::vector<double>& taus, const LpConfig& lp_config,
                 const std::optional<BootConfig>& boot, std::uint64_t seed,
                 const fs::path& out_dir) {
    json config = {{"command", "estimate"},
                   {"manifest", manifest_path.string()},
                   {"treatment", treatment},
                   {"H", max_horizon},
                   {"spec", to_string(lp_config.spec)},
                   {"boot_reps", boot ? boot->replications : 0},
                   {"block_length", boot ? boot->block_length : 0},
                   {"level", boot ? boot->level : 0.0}};
    const OutputStamp stamp = make_stamp(config, seed);

    const DatasetManifest manifest = load_manifest(manifest_path);
    const EmpiricalData data = prepare_empirical(manifest, treatment);
    std::cerr << "panel: T=" << data.panel.rows() << " window " << data.sample_window << "\n";

    QirSurface surface = run_lp(data.panel, data.design, max_horizon, taus,
                                EstimatorKind::GqrLp, lp_config, boot);
    surface.seed = seed;
    surface.sample_window = data.sample_window;
    for (const auto& w : surface.warnings) std::cerr << "warning: " << w << "\n";

    write_surface_csv(out_dir / "surface.csv", surface, stamp);
    write_surface_json(out_dir / "surface.json", surface, stamp);
    write_qir_figures(out_dir, surface, stamp);
    return 0;
}

int cmd_bootstrap(const fs::path& manifest_path, const std::string& treatment,
                  const fs::path& surface_path, const BootConfig& boot, const LpConfig& lp_config,
                  const fs::path& out_dir) {
    json config = {{"command", "bootstrap"},
                   {"manifest", manifest_path.string()},
                   {"surface", surface_path.string()},
                   {"boot_reps", boot.replications},
                   {"block_length", boot.block_length},
                   {"level", boot.level}};
    const OutputStamp stamp = make_stamp(config, boot.seed);

    QirSurface surface = read_surface_json(surface_path);
    const DatasetManifest manifest = load_manifest(manifest_path);
    const EmpiricalData data = prepare_empirical(manifest, treatment);

    LpConfig config_with_spec = lp_config;
    config_with_spec.spec = surface.spec;
    QirSurface rebuilt = run_lp(data.panel, data.design, surface.max_horizon, surface.quantiles,
                                surface.estimator, config_with_spec, boot);
    rebuilt.seed = boot.seed;
    rebuilt.sample_window = data.sample_window;
    write_surface_csv(out_dir / "surface.csv", rebuilt, stamp);
    write_surface_json(out_dir / "surface.json", rebuilt, stamp);
    write_qir_figures(out_dir, rebuilt, stamp);
    return 0;
}

int cmd_report(const fs::path& surface_path, const fs::path& out_dir) {
    QirSurface surface = read_surface_json(surface_path);
    json config = {{"command", "report"}, {"surface", surface_path.string()}};
    const OutputStamp stamp = make_stamp(config, surface.seed);
    write_qir_figures(out_dir, surface, stamp);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural quantile impulse responses via generalized quantile regression"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = env_seed_default();
    unsigned threads = default_thread_count();
    std::string out_dir = ".";
    std::string taus_list = "0.1,0.5,0.9";
    std::string spec_name = "linear";
    app.add_option("--seed", seed, "master RNG seed (env QIRLAB_SEED)")->capture_default_str();
    app.add_option("--threads", threads, "worker thread hint")->capture_default_str();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    // simulate ---------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "simulate the stochastic-volatility SVAR lab");
    DgpParams params;
    long long sim_t = 1000000;
    int burn_in = 1000;
    int bins = 25;
    std::vector<int> sqf_horizons = {1};
    sim->add_option("--phi", params.phi, "volatility feedback")->capture_default_str();
    sim->add_option("--rho-y", params.rho_y)->capture_default_str();
    sim->add_option("--rho-d", params.rho_d)->capture_default_str();
    sim->add_option("--delta-dy", params.delta_dy)->capture_default_str();
    sim->add_option("--delta-yd", params.delta_yd)->capture_default_str();
    sim->add_option("--gamma", params.gamma)->capture_default_str();
    sim->add_option("--T", sim_t, "sample length after burn-in")->capture_default_str();
    sim->add_option("--burn-in", burn_in)->capture_default_str();
    sim->add_option("--bins", bins, "equal-probability bins for the SQF curves")
        ->capture_default_str();
    sim->add_option("--horizons", sqf_horizons, "horizons for the SQF curves")
        ->capture_default_str();
    sim->add_option("--taus", taus_list, "comma-separated quantiles")->capture_default_str();

    // mc-table ---------------------------------------------------------------
    auto* mc = app.add_subcommand("mc-table", "Monte Carlo estimator race over the lab DGP");
    int mc_reps = 100;
    int mc_horizon = 10;
    long long mc_t = 1000;
    int mc_burn = 1000;
    double mc_phi = 9.0;
    mc->add_option("--mc-reps", mc_reps)->capture_default_str();
    mc->add_option("--horizons", mc_horizon, "maximum horizon")->capture_default_str();
    mc->add_option("--T", mc_t)->capture_default_str();
    mc->add_option("--burn-in", mc_burn)->capture_default_str();
    mc->add_option("--phi", mc_phi)->capture_default_str();
    mc->add_option("--taus", taus_list, "comma-separated quantiles")->capture_default_str();

    // estimate ---------------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "estimate empirical QIR surfaces from a manifest");
    std::string manifest_path;
    std::string treatment = kCreditRiskTreatment;
    int horizon = 24;
    int block_length = 7;
    int boot_reps = 1000;
    double level = 0.90;
    est->add_option("--manifest", manifest_path, "dataset manifest (JSON)")->required();
    est->add_option("--treatment", treatment, "credit-risk | volatility-risk | column name")
        ->capture_default_str();
    est->add_option("--horizons", horizon, "maximum horizon")->capture_default_str();
    est->add_option("--taus", taus_list, "comma-separated quantiles")->capture_default_str();
    est->add_option("--spec", spec_name, "linear | quadratic")->capture_default_str();
    est->add_option("--block-length", block_length)->capture_default_str();
    est->add_option("--boot-reps", boot_reps, "bootstrap replications (0 disables bands)")
        ->capture_default_str();
    est->add_option("--level", level, "confidence level")->capture_default_str();

    // bootstrap ---------------------------------------------------------------
    auto* boot_cmd = app.add_subcommand("bootstrap", "recompute bands for an existing surface");
    std::string surface_path;
    boot_cmd->add_option("--manifest", manifest_path, "dataset manifest (JSON)")->required();
    boot_cmd->add_option("--treatment", treatment)->capture_default_str();
    boot_cmd->add_option("--surface", surface_path, "existing surface.json")->required();
    boot_cmd->add_option("--block-length", block_length)->capture_default_str();
    boot_cmd->add_option("--boot-reps", boot_reps)->capture_default_str();
    boot_cmd->add_option("--level", level)->capture_default_str();

    // report ---------------------------------------------------------------
    auto* rep = app.add_subcommand("report", "rebuild figures from an existing surface");
    rep->add_option("--surface", surface_path, "existing surface.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out_dir);
        const std::vector<double> taus = parse_taus(taus_list);
        LpConfig lp_config;
        lp_config.threads = threads;
        lp_config.spec = spec_name == "quadratic" ? SqfSpec::Quadratic : SqfSpec::Linear;

        if (sim->parsed()) {
            SimConfig c;
            c.sample_length = sim_t;
            c.burn_in = burn_in;
            c.seed = seed;
            return cmd_simulate(params, sim_t, burn_in, seed, taus, sqf_horizons, bins, out_dir);
        }
        if (mc->parsed()) {
            DgpParams mc_params;
            mc_params.phi = mc_phi;
            SimConfig c;
            c.sample_length = mc_t;
            c.burn_in = mc_burn;
            c.seed = seed;
            c.mc_reps = mc_reps;
            return cmd_mc_table(mc_params, c, mc_horizon, taus, lp_config, out_dir);
        }
        if (est->parsed()) {
            std::optional<BootConfig> boot;
            if (boot_reps > 0) {
                boot = BootConfig{block_length, boot_reps, level, seed};
            }
            return cmd_estimate(manifest_path, treatment, horizon, taus, lp_config, boot, seed,
                                out_dir);
        }
        if (boot_cmd->parsed()) {
            const BootConfig boot{block_length, boot_reps, level, seed};
            return cmd_bootstrap(manifest_path, treatment, surface_path, boot, lp_config, out_dir);
        }
        if (rep->parsed()) return cmd_report(surface_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
