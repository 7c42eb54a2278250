// Command-line driver: graph generation, chain analysis, seeded sweeps, fits.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "cyclemix/chain.hpp"
#include "cyclemix/conductance.hpp"
#include "cyclemix/error.hpp"
#include "cyclemix/graph.hpp"
#include "cyclemix/io.hpp"
#include "cyclemix/lab.hpp"
#include "cyclemix/mixing.hpp"

namespace {

using namespace cyclemix;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct ChainOptions {
    std::string graph_path;
    double q_c = 0.2;
    double q_l = 0.1;
    double r = 0.0;
    uint64_t d = 0;  // 0 = degree_cap(alpha)
    bool require_lazy = false;
};

void add_chain_options(CLI::App* cmd, ChainOptions& opts) {
    cmd->add_option("--graph", opts.graph_path, "graph file (see generate)")->required();
    cmd->add_option("--q-c", opts.q_c, "cycle step probability q_c");
    cmd->add_option("--q-l", opts.q_l, "long-range budget q_l");
    cmd->add_option("--r", opts.r, "clockwise drift r");
    cmd->add_option("--d", opts.d, "long-range divisor d (0 = ceil(2/(alpha-1)))");
    cmd->add_flag("--require-lazy", opts.require_lazy, "reject chains with hold < 1/2");
}

ChainParams resolve_params(const ChainOptions& opts, const LongRangeGraph& g) {
    ChainParams p;
    p.q_c = opts.q_c;
    p.q_l = opts.q_l;
    p.r = opts.r;
    p.d = opts.d ? static_cast<uint32_t>(opts.d) : degree_cap(g.alpha());
    p.require_lazy = opts.require_lazy;
    return p;
}

void echo_chain_config(const ChainOptions& opts, const ChainParams& p, const LongRangeGraph& g) {
    std::cout << "# graph=" << opts.graph_path << " n=" << g.n() << " alpha="
              << io::format_double(g.alpha()) << " model=" << model_name(g.model())
              << " seed=" << g.seed() << "\n";
    std::cout << "# q_c=" << io::format_double(p.q_c) << " q_l=" << io::format_double(p.q_l)
              << " r=" << io::format_double(p.r) << " d=" << p.d
              << " require_lazy=" << (p.require_lazy ? 1 : 0) << "\n";
}

struct MixingCliOptions {
    double epsilon = 0.125;
    uint64_t ceiling = 10'000'000;
    uint64_t tile_width = 64;
    uint64_t check_interval = 16;
    std::string kernel = "auto";
    std::string profile_out;
};

void add_mixing_options(CLI::App* cmd, MixingCliOptions& opts) {
    cmd->add_option("--epsilon", opts.epsilon, "TV threshold (default 1/8)");
    cmd->add_option("--ceiling", opts.ceiling, "step budget before not-converged");
    cmd->add_option("--tile-width", opts.tile_width, "starts per evolution tile");
    cmd->add_option("--check-interval", opts.check_interval, "TV checkpoint spacing");
    cmd->add_option("--kernel", opts.kernel, "kernel backend: auto|scalar|avx2|neon");
    cmd->add_option("--profile-out", opts.profile_out,
                    "write worst-start profile CSV (gzip when *.gz)");
}

MixingOptions resolve_mixing(const MixingCliOptions& o, bool want_profile) {
    MixingOptions m;
    m.ceiling = o.ceiling;
    m.tile_width = static_cast<uint32_t>(o.tile_width);
    m.check_interval = static_cast<uint32_t>(o.check_interval);
    m.backend = o.kernel;
    m.want_profile = want_profile;
    return m;
}

void run_conductance(const LongRangeGraph& g, const TransitionMatrix& P, const std::string& method,
                     const std::string& arc_mode, uint64_t exact_limit, uint64_t connected_limit) {
    ConductanceEstimate est;
    ArcMode mode = arc_mode == "no-outgoing" ? ArcMode::NoOutgoing : ArcMode::NoIncident;
    if (method == "exact") {
        est = conductance_exact(P, static_cast<uint32_t>(exact_limit));
    } else if (method == "connected") {
        est = conductance_connected(P, static_cast<uint32_t>(connected_limit));
    } else if (method == "arc") {
        est = conductance_arc_upper(P, g, mode);
    } else {  // auto
        if (P.n() <= exact_limit) est = conductance_exact(P, static_cast<uint32_t>(exact_limit));
        else if (P.n() <= connected_limit)
            est = conductance_connected(P, static_cast<uint32_t>(connected_limit));
        else est = conductance_arc_upper(P, g, mode);
    }
    std::cout << "# phi_kind=" << phi_kind_name(est.kind) << "\n";
    std::cout << "phi,flow,denom,set\n";
    std::cout << cut_csv_row(*est.witness) << "\n";
}

void run_mixing(const TransitionMatrix& P, const MixingCliOptions& o) {
    MixingOptions m = resolve_mixing(o, !o.profile_out.empty());
    MixingResult res = mixing_time(P, o.epsilon, m);
    std::cout << "t_mix,epsilon,worst_start,d_at_tmix,mass_drift\n";
    std::cout << res.t_mix << "," << io::format_double(res.epsilon) << "," << res.worst_start
              << "," << io::format_double(res.d_at_tmix) << ","
              << io::format_double(res.max_mass_drift) << "\n";
    if (!res.monotone_ok)
        std::cerr << "warning: distance profile not monotone within 1e-10\n";
    if (!o.profile_out.empty())
        io::write_profile_csv(o.profile_out, res.worst_start, res.profile);
}

int dispatch(CLI::App& app, int argc, char** argv) {
    argv = app.ensure_utf8(argv);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cycle-plus-chords Markov chain laboratory"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate an M1/M2/M3 random graph");
    std::string gen_model;
    uint64_t gen_n = 0, gen_seed = 0;
    double gen_alpha = 0.0;
    std::string gen_out;
    gen->add_option("--model", gen_model, "M1, M2 or M3")->required();
    gen->add_option("--n", gen_n, "node count")->required();
    gen->add_option("--alpha", gen_alpha, "density exponent in (1,2)")->required();
    gen->add_option("--seed", gen_seed, "64-bit graph seed")->required();
    gen->add_option("--out", gen_out, "output path (default: stdout)");

    // chain
    auto* chain_cmd = app.add_subcommand("chain", "build the homogeneous chain, dump stats/matrix");
    ChainOptions chain_opts;
    add_chain_options(chain_cmd, chain_opts);
    std::string chain_out;
    chain_cmd->add_option("--out", chain_out, "write matrix dump to this path");

    // conductance
    auto* cond_cmd = app.add_subcommand("conductance", "conductance of the homogeneous chain");
    ChainOptions cond_opts;
    add_chain_options(cond_cmd, cond_opts);
    std::string cond_method = "auto", cond_arc_mode = "no-incident";
    uint64_t cond_exact_limit = 20, cond_connected_limit = 40;
    cond_cmd->add_option("--method", cond_method, "auto|exact|connected|arc");
    cond_cmd->add_option("--arc-mode", cond_arc_mode, "no-incident|no-outgoing");
    cond_cmd->add_option("--exact-limit", cond_exact_limit, "max n for exhaustive enumeration");
    cond_cmd->add_option("--connected-limit", cond_connected_limit,
                         "max n for connected enumeration");

    // mixing
    auto* mix_cmd = app.add_subcommand("mixing", "exact TV mixing time of the homogeneous chain");
    ChainOptions mix_opts;
    add_chain_options(mix_cmd, mix_opts);
    MixingCliOptions mix_cli;
    add_mixing_options(mix_cmd, mix_cli);

    // analyze
    auto* ana_cmd = app.add_subcommand("analyze", "conductance and/or mixing in one run");
    ChainOptions ana_opts;
    add_chain_options(ana_cmd, ana_opts);
    std::string ana_which = "both";
    ana_cmd->add_option("--which", ana_which, "conductance|mixing|both");
    MixingCliOptions ana_mix;
    add_mixing_options(ana_cmd, ana_mix);
    std::string ana_method = "auto", ana_arc_mode = "no-incident";
    uint64_t ana_exact_limit = 20, ana_connected_limit = 40;
    ana_cmd->add_option("--method", ana_method, "auto|exact|connected|arc");
    ana_cmd->add_option("--arc-mode", ana_arc_mode, "no-incident|no-outgoing");
    ana_cmd->add_option("--exact-limit", ana_exact_limit, "max n for exhaustive enumeration");
    ana_cmd->add_option("--connected-limit", ana_connected_limit,
                        "max n for connected enumeration");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "seeded scaling sweep; writes CSVs");
    std::string sweep_config_path, sweep_out_dir = ".";
    std::string sw_model, sw_sizes, sw_r_values, sw_measure, sw_kernel;
    double sw_alpha = -1.0, sw_q_c = -1.0, sw_q_l = -1.0, sw_epsilon = -1.0, sw_trim = -1.0;
    uint64_t sw_trials = 0, sw_seed = 0, sw_workers = 0, sw_d = UINT64_MAX;
    uint64_t sw_ceiling = 0, sw_tile = 0, sw_check = 0;
    bool sw_timings = false;
    sweep_cmd->add_option("--config", sweep_config_path, "key=value config file");
    sweep_cmd->add_option("--out-dir", sweep_out_dir, "output directory (default .)");
    sweep_cmd->add_option("--model", sw_model, "M1|M2|M3");
    sweep_cmd->add_option("--alpha", sw_alpha, "density exponent");
    sweep_cmd->add_option("--sizes", sw_sizes, "comma-separated n list, increasing");
    sweep_cmd->add_option("--trials", sw_trials, "trials per size");
    sweep_cmd->add_option("--q-c", sw_q_c, "cycle step probability");
    sweep_cmd->add_option("--q-l", sw_q_l, "long-range budget");
    sweep_cmd->add_option("--d", sw_d, "long-range divisor (0 = auto)");
    sweep_cmd->add_option("--r-values", sw_r_values, "comma-separated drift list");
    sweep_cmd->add_option("--epsilon", sw_epsilon, "TV threshold");
    auto* seed_opt = sweep_cmd->add_option("--seed", sw_seed, "base seed (required)");
    sweep_cmd->add_option("--trim", sw_trim, "per-tail trim fraction");
    sweep_cmd->add_option("--workers", sw_workers, "worker threads (default: env CYCLEMIX_WORKERS or cores)");
    sweep_cmd->add_option("--measure", sw_measure, "full|phi-only");
    sweep_cmd->add_option("--ceiling", sw_ceiling, "mixing step budget");
    sweep_cmd->add_option("--tile-width", sw_tile, "starts per evolution tile");
    sweep_cmd->add_option("--check-interval", sw_check, "TV checkpoint spacing");
    sweep_cmd->add_option("--kernel", sw_kernel, "kernel backend");
    sweep_cmd->add_flag("--timings", sw_timings, "record measured wall times (breaks byte reproducibility)");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "log-log slope of a two-column data file");
    std::string fit_input;
    fit_cmd->add_option("--input", fit_input, "two-column 'n value' file")->required();

    int rc = dispatch(app, argc, argv);
    if (rc != kExitOk || app.get_subcommands().empty()) return rc;

    try {
        if (gen->parsed()) {
            Model model = model_from_name(gen_model);
            LongRangeGraph g = [&] {
                switch (model) {
                    case Model::M1: return generate_m1(static_cast<uint32_t>(gen_n), gen_alpha, gen_seed);
                    case Model::M2: return generate_m2(static_cast<uint32_t>(gen_n), gen_alpha, gen_seed);
                    default: return generate_m3(static_cast<uint32_t>(gen_n), gen_alpha, gen_seed);
                }
            }();
            std::cout << "# model=" << model_name(model) << " n=" << gen_n
                      << " alpha=" << io::format_double(gen_alpha) << " seed=" << gen_seed << "\n";
            if (g.degenerate())
                std::cerr << "warning: degenerate-model: M1 endpoint positions collided; deduplicated\n";
            if (!gen_out.empty()) {
                io::save_graph(gen_out, g);
            } else {
                std::cout << io::graph_to_text(g);
            }
            std::cout << "edges=" << g.edges().size() << " max_degree=" << max_long_range_degree(g)
                      << "\n";
        } else if (chain_cmd->parsed()) {
            LongRangeGraph g = io::load_graph(chain_opts.graph_path);
            ChainParams p = resolve_params(chain_opts, g);
            echo_chain_config(chain_opts, p, g);
            bool feasible = is_feasible(g, p);
            std::cout << "feasible=" << (feasible ? 1 : 0) << "\n";
            if (!feasible) raise(ErrorKind::InfeasibleParams, "parameters infeasible for this graph");
            TransitionMatrix P = build_homogeneous(g, p);
            std::cout << "lazy=" << (is_lazy(P) ? 1 : 0)
                      << " reversible=" << (is_reversible(P) ? 1 : 0)
                      << " doubly_stochastic=" << (is_doubly_stochastic(P) ? 1 : 0) << "\n";
            if (!chain_out.empty()) io::save_matrix(chain_out, P);
        } else if (cond_cmd->parsed()) {
            LongRangeGraph g = io::load_graph(cond_opts.graph_path);
            ChainParams p = resolve_params(cond_opts, g);
            echo_chain_config(cond_opts, p, g);
            TransitionMatrix P = build_homogeneous(g, p);
            run_conductance(g, P, cond_method, cond_arc_mode, cond_exact_limit,
                            cond_connected_limit);
        } else if (mix_cmd->parsed()) {
            LongRangeGraph g = io::load_graph(mix_opts.graph_path);
            ChainParams p = resolve_params(mix_opts, g);
            echo_chain_config(mix_opts, p, g);
            std::cout << "# epsilon=" << io::format_double(mix_cli.epsilon)
                      << " ceiling=" << mix_cli.ceiling << " kernel=" << mix_cli.kernel << "\n";
            TransitionMatrix P = build_homogeneous(g, p);
            run_mixing(P, mix_cli);
        } else if (ana_cmd->parsed()) {
            LongRangeGraph g = io::load_graph(ana_opts.graph_path);
            ChainParams p = resolve_params(ana_opts, g);
            echo_chain_config(ana_opts, p, g);
            TransitionMatrix P = build_homogeneous(g, p);
            if (ana_which == "conductance" || ana_which == "both")
                run_conductance(g, P, ana_method, ana_arc_mode, ana_exact_limit,
                                ana_connected_limit);
            if (ana_which == "mixing" || ana_which == "both") run_mixing(P, ana_mix);
            if (ana_which != "conductance" && ana_which != "mixing" && ana_which != "both")
                raise(ErrorKind::ConfigError, "--which must be conductance, mixing or both");
        } else if (sweep_cmd->parsed()) {
            SweepConfig config;
            std::vector<std::string> seen;
            if (!sweep_config_path.empty())
                config = io::load_sweep_config(sweep_config_path, config, &seen);
            // Flags override file values.
            if (!sw_model.empty()) config.model = model_from_name(sw_model);
            if (sw_alpha > 0) config.alpha = sw_alpha;
            if (!sw_sizes.empty()) {
                config = io::parse_sweep_config("sizes=" + sw_sizes, config);
            }
            if (sw_trials) config.trials_per_size = static_cast<uint32_t>(sw_trials);
            if (sw_q_c >= 0) config.params.q_c = sw_q_c;
            if (sw_q_l >= 0) config.params.q_l = sw_q_l;
            if (sw_d != UINT64_MAX) {
                config.auto_d = sw_d == 0;
                if (sw_d) config.params.d = static_cast<uint32_t>(sw_d);
            }
            if (!sw_r_values.empty()) config = io::parse_sweep_config("r_values=" + sw_r_values, config);
            if (sw_epsilon > 0) config.epsilon = sw_epsilon;
            bool seed_in_file = false;
            for (const auto& k : seen) seed_in_file |= (k == "seed");
            if (seed_opt->count() > 0) config.base_seed = sw_seed;
            else if (!seed_in_file)
                raise(ErrorKind::ConfigError, "--seed is mandatory for sweep (no silent entropy)");
            if (sw_trim >= 0) config.trim_fraction = sw_trim;
            if (sw_workers) config.workers = static_cast<uint32_t>(sw_workers);
            else if (config.workers == 0) {
                if (const char* env = std::getenv("CYCLEMIX_WORKERS"))
                    config.workers = static_cast<uint32_t>(std::strtoul(env, nullptr, 10));
            }
            if (!sw_measure.empty()) {
                if (sw_measure == "full") config.measure_mixing = true;
                else if (sw_measure == "phi-only") config.measure_mixing = false;
                else raise(ErrorKind::ConfigError, "--measure must be full or phi-only");
            }
            if (sw_ceiling) config.mixing.ceiling = sw_ceiling;
            if (sw_tile) config.mixing.tile_width = static_cast<uint32_t>(sw_tile);
            if (sw_check) config.mixing.check_interval = static_cast<uint32_t>(sw_check);
            if (!sw_kernel.empty()) config.mixing.backend = sw_kernel;
            if (sw_timings) config.emit_timings = true;

            std::filesystem::create_directories(sweep_out_dir);

            // Resolved configuration echo for provenance.
            std::string sizes_str;
            for (size_t i = 0; i < config.sizes.size(); ++i)
                sizes_str += (i ? "," : "") + std::to_string(config.sizes[i]);
            std::string rs_str;
            for (size_t i = 0; i < config.r_values.size(); ++i)
                rs_str += (i ? "," : "") + io::format_double(config.r_values[i]);
            std::cout << "# model=" << model_name(config.model)
                      << " alpha=" << io::format_double(config.alpha) << " sizes=" << sizes_str
                      << " trials=" << config.trials_per_size << "\n";
            std::cout << "# q_c=" << io::format_double(config.params.q_c)
                      << " q_l=" << io::format_double(config.params.q_l)
                      << " d=" << (config.auto_d ? std::string("auto") : std::to_string(config.params.d))
                      << " r_values=" << rs_str
                      << " epsilon=" << io::format_double(config.epsilon) << "\n";
            std::cout << "# seed=" << config.base_seed
                      << " trim=" << io::format_double(config.trim_fraction)
                      << " workers=" << config.workers
                      << " measure=" << (config.measure_mixing ? "full" : "phi-only")
                      << " ceiling=" << config.mixing.ceiling
                      << " kernel=" << config.mixing.backend
                      << " timings=" << (config.emit_timings ? 1 : 0) << "\n";

            std::vector<SweepRecord> records = run_sweep(config);
            size_t skipped = 0;
            for (const auto& rec : records) skipped += rec.skipped ? 1 : 0;
            Summary summary = summarize(records, config.trim_fraction);
            io::write_records_csv(sweep_out_dir + "/records.csv", records);
            io::write_summary_csv(sweep_out_dir + "/summary.csv", summary);
            if (config.measure_mixing) io::write_plot_data(sweep_out_dir, summary);
            std::cout << "records=" << records.size() << " skipped=" << skipped << " out_dir="
                      << sweep_out_dir << "\n";
            if (skipped) std::cerr << "warning: " << skipped << " trial records skipped\n";
        } else if (fit_cmd->parsed()) {
            std::string text = io::read_file(fit_input);
            std::vector<std::pair<double, double>> points;
            std::istringstream in(text);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                std::istringstream row(line);
                double n = 0, v = 0;
                if (!(row >> n >> v)) raise(ErrorKind::IoError, "bad data line: '" + line + "'");
                points.emplace_back(n, v);
            }
            FitResult fit = fit_exponent(points);
            std::cout << "slope,intercept,rms\n";
            std::cout << io::format_double(fit.slope) << "," << io::format_double(fit.intercept)
                      << "," << io::format_double(fit.rms) << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_usage_error() ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
