// chemolab: simulate, bound and audit the four-field tumor invasion model.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chemolab/experiment.hpp"

namespace fs = std::filesystem;
using namespace chemolab;

namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open '" + p.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const Report& r, const std::string& json_path) {
    std::cout << r.text();
    if (!json_path.empty()) write_file(json_path, r.json_text());
}

std::vector<double> parse_scales(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    for (std::string tok; std::getline(in, tok, ',');) out.push_back(parse_real(tok, 0));
    if (out.empty()) throw Error(ErrorKind::ConfigError, "--scales needs at least one value");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chemotaxis tumor invasion: simulation, explicit decay bounds, audits"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run one configured experiment and audit it");
    std::string sim_config, sim_out_dir;
    sim->add_option("config", sim_config, "Config file")->required();
    sim->add_option("--out-dir", sim_out_dir, "Overrides output.dir");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Print decay rates, constants A-D and envelopes m1-m4");
    EnvelopeInputs bin;
    bin.vbar0 = 1.0;
    bin.w0_inf = 1.0;
    bin.wbar0 = 1.0;
    bin.measure = 3.141592653589793;
    std::string bnd_json;
    bnd->add_option("--lambda1", bin.lambda1, "First nonzero Neumann eigenvalue")->required();
    bnd->add_option("--ubar0", bin.ubar0, "Mean of u0")->required();
    bnd->add_option("--k1", bin.k[0], "Smoothing constant k1")->capture_default_str();
    bnd->add_option("--k2", bin.k[1], "Smoothing constant k2")->capture_default_str();
    bnd->add_option("--k3", bin.k[2], "Smoothing constant k3")->capture_default_str();
    bnd->add_option("--k4", bin.k[3], "Smoothing constant k4")->capture_default_str();
    bnd->add_option("--vbar0", bin.vbar0, "Mean of v0")->capture_default_str();
    bnd->add_option("--wbar0", bin.wbar0, "Mean of w0")->capture_default_str();
    bnd->add_option("--w0-inf", bin.w0_inf, "Sup norm of w0")->capture_default_str();
    bnd->add_option("--grad-v", bin.grad_v_t0, "L^p norm of grad v at t0")->capture_default_str();
    bnd->add_option("--measure", bin.measure, "|Omega|")->capture_default_str();
    bnd->add_option("--p", bin.p, "Gradient exponent p, 2 < p < inf")->capture_default_str();
    bnd->add_option("--t0", bin.t0, "Reference time")->capture_default_str();
    bnd->add_option("--json", bnd_json, "Also write the machine-readable mirror here");

    // sweep
    auto* swp = app.add_subcommand("sweep", "Smallness sweep over data amplitude scales");
    std::string swp_config, swp_scales, swp_out_dir;
    swp->add_option("config", swp_config, "Config file")->required();
    swp->add_option("--scales", swp_scales, "Comma-separated nonnegative scales")->required();
    swp->add_option("--out-dir", swp_out_dir, "Overrides output.dir");

    // rates
    auto* rat = app.add_subcommand("rates", "Re-audit the decay rates of an existing CSV");
    std::string rat_csv, rat_json;
    double rat_lambda1 = 1.0, rat_ubar0 = 1.0;
    AuditConfig rat_audit;
    rat->add_option("csv", rat_csv, "Time-series CSV written by simulate")->required();
    rat->add_option("--lambda1", rat_lambda1, "First nonzero Neumann eigenvalue")->required();
    rat->add_option("--ubar0", rat_ubar0, "Mean of u0")->required();
    rat->add_option("--slack", rat_audit.slack, "Allowed relative shortfall")->capture_default_str();
    rat->add_option("--floor", rat_audit.floor, "Fit floor relative to the series peak")->capture_default_str();
    rat->add_option("--window", rat_audit.window, "Tail fraction used in the fit")->capture_default_str();
    rat->add_option("--json", rat_json, "Also write the machine-readable mirror here");

    // semigroup-check
    auto* sg = app.add_subcommand("semigroup-check", "Estimate heat-semigroup smoothing constants");
    int sg_dims = 1;
    std::string sg_lx = "pi", sg_ly = "pi/2", sg_kinds = "i,ii,iii,iv", sg_json;
    std::size_t sg_nx = 64, sg_ny = 32, sg_samples = 200;
    double sg_p = 0.0, sg_q = 0.0;
    std::uint64_t sg_seed = 0;
    sg->add_option("--dims", sg_dims, "1 or 2")->capture_default_str();
    sg->add_option("--lx", sg_lx, "Length along x (accepts pi forms)")->capture_default_str();
    sg->add_option("--ly", sg_ly, "Length along y")->capture_default_str();
    sg->add_option("--nx", sg_nx, "Cells along x")->capture_default_str();
    sg->add_option("--ny", sg_ny, "Cells along y")->capture_default_str();
    sg->add_option("--kinds", sg_kinds, "Comma-separated subset of i,ii,iii,iv")->capture_default_str();
    sg->add_option("--p", sg_p, "Target exponent p for every kind (0: per-kind default)");
    sg->add_option("--q", sg_q, "Source exponent q for every kind (0: per-kind default)");
    sg->add_option("--samples", sg_samples, "Test fields per kind")->capture_default_str();
    sg->add_option("--seed", sg_seed, "64-bit seed")->capture_default_str();
    sg->add_option("--json", sg_json, "Also write the machine-readable mirror here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            ExperimentConfig cfg = load_config(sim_config);
            if (!sim_out_dir.empty()) cfg.output.dir = sim_out_dir;
            const SimulationOutcome out = cmd_simulate(cfg);
            const fs::path base = fs::path(cfg.output.dir) / cfg.output.stem;
            write_file(base.string() + ".csv", series_csv(out.series));
            write_file(base.string() + ".report", out.report.text());
            write_file(base.string() + ".json", out.report.json_text());
            std::cout << out.report.text();
            return out.exit_code;
        }
        if (bnd->parsed()) {
            emit(cmd_bounds(bin), bnd_json);
            return exit_success;
        }
        if (swp->parsed()) {
            ExperimentConfig cfg = load_config(swp_config);
            if (!swp_out_dir.empty()) cfg.output.dir = swp_out_dir;
            const auto rows = cmd_sweep(cfg, parse_scales(swp_scales));
            const Report rep = sweep_report(cfg, rows);
            const fs::path base = fs::path(cfg.output.dir) / (cfg.output.stem + "_sweep");
            write_file(base.string() + ".csv", sweep_csv(rows));
            write_file(base.string() + ".report", rep.text());
            write_file(base.string() + ".json", rep.json_text());
            std::cout << rep.text();
            return exit_success;
        }
        if (rat->parsed()) {
            const RatesOutcome out = cmd_rates(parse_series_csv(read_text(rat_csv)), rat_lambda1, rat_ubar0, rat_audit);
            emit(out.report, rat_json);
            return out.exit_code;
        }
        if (sg->parsed()) {
            const double lx = parse_real(sg_lx, 0), ly = parse_real(sg_ly, 0);
            const Domain d = sg_dims == 1 ? Domain(lx, sg_nx) : Domain(2, {lx, ly}, {sg_nx, sg_ny});
            const auto defaults = envelope_probe_kinds(d.dims());
            std::vector<SmoothingEstimateKind> kinds;
            std::stringstream in(sg_kinds);
            for (std::string tok; std::getline(in, tok, ',');) {
                SmoothingEstimateKind k = defaults[static_cast<std::size_t>(parse_smoothing_kind(tok))];
                if (sg_p > 0.0) k.p = sg_p;
                if (sg_q > 0.0) k.q = sg_q;
                kinds.push_back(k);
            }
            const SemigroupOutcome out = cmd_semigroup_check(d, kinds, sg_samples, sg_seed);
            emit(out.report, sg_json);
            return out.exit_code;
        }
    } catch (const Error& e) {
        std::cerr << "chemolab: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "chemolab: " << e.what() << "\n";
        return 1;
    }
    return exit_success;
}
