// Command-line front end: single runs, phase-diagram sweeps, stationarity and
// coupling verification, CSV emission for external plotting.
//
// Subcommands: run, sweep, gibbs-check, coupling-check, stuck-scan, classify.
// Exit codes: 0 pass, 1 check/run failure, 2 usage error, 3 resource limit.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "selfwalk/analysis.hpp"
#include "selfwalk/coupling.hpp"
#include "selfwalk/csv.hpp"
#include "selfwalk/engine.hpp"
#include "selfwalk/gibbs.hpp"
#include "selfwalk/kernel.hpp"
#include "selfwalk/thread_pool.hpp"

namespace fs = std::filesystem;
using namespace selfwalk;

namespace {

struct KernelChoice {
    InteractionKernel kernel = InteractionKernel::symmetric_family(0.0, 1.0);
    std::map<std::int64_t, double> initial_profile;
    std::string describe;
};

KernelChoice resolve_kernel(const std::string& literal, const std::string& preset_name) {
    if (!literal.empty() && !preset_name.empty())
        throw KernelError("give either --kernel or --preset, not both");
    if (!preset_name.empty()) {
        Preset p = preset(preset_name);
        return {p.kernel, p.initial_profile, p.kernel.literal()};
    }
    if (literal.empty()) throw KernelError("one of --kernel or --preset is required");
    InteractionKernel k = InteractionKernel::parse(literal);
    return {k, {}, k.literal()};
}

int cmd_run(const std::string& literal, const std::string& preset_name, std::int64_t steps,
            std::uint64_t seed, std::int64_t x0, double ratio, const std::string& out_prefix,
            bool want_slope) {
    KernelChoice choice = resolve_kernel(literal, preset_name);
    RunConfig config;
    config.kernel = choice.kernel;
    config.steps = steps;
    config.seed = seed;
    config.initial_position = x0;
    config.initial_profile = choice.initial_profile;
    config.checkpoint_ratio = ratio;
    RunSummary summary = run(config);

    std::string prov =
        provenance_line("run", choice.kernel.literal(), std::to_string(seed), steps);
    write_file(out_prefix + "_trajectory.csv", trajectory_csv(summary, prov));
    write_file(out_prefix + "_profile.csv", profile_csv(summary, prov));

    const auto& last = summary.checkpoints.back();
    std::cout << "final position " << summary.final_position << " after " << summary.steps
              << " steps; range [" << last.range_min << ", " << last.range_max << "]\n";
    if (want_slope && summary.checkpoints.size() >= 8) {
        ExponentEstimate est = scaling_exponent(summary);
        std::cout << "scaling slope " << fmt_double(est.slope) << " (stderr "
                  << fmt_double(est.stderr_) << ", window [" << est.window_low << ", "
                  << est.window_high << "])" << (est.stuck ? " [stuck]" : "") << "\n";
    }
    std::cout << "wrote " << out_prefix << "_trajectory.csv and " << out_prefix
              << "_profile.csv\n";
    return 0;
}

struct SweepPoint {
    InteractionKernel kernel;
    std::string a, b;  // formatted, empty for general kernels
};

int cmd_sweep(const std::vector<SweepPoint>& grid, int seeds, std::int64_t steps,
              std::uint64_t master_seed, double ratio, const PhaseThresholds& bands,
              const std::string& out_path) {
    if (grid.empty()) {
        std::cerr << "sweep: empty grid\n";
        return 2;
    }
    if (seeds < 1) {
        std::cerr << "sweep: seeds must be >= 1\n";
        return 2;
    }

    fs::path parts_dir = fs::path(out_path).concat(".parts");
    fs::create_directories(parts_dir);

    std::ostringstream spec_os;
    spec_os << "points=" << grid.size() << " seeds=" << seeds << " steps=" << steps
            << " master=" << master_seed << " ratio=" << fmt_double(ratio);
    std::string sweep_spec = spec_os.str();

    std::vector<bool> failed(grid.size(), false);
    std::mutex io_mutex;

    parallel_for_index(grid.size(), [&](std::size_t idx) {
        fs::path part = parts_dir / ("point_" + std::to_string(idx) + ".csv");
        std::string expected_header = "# point " + std::to_string(idx) + " kernel=\"" +
                                      grid[idx].kernel.literal() + "\" " + sweep_spec + "\n";
        if (fs::exists(part)) {
            try {
                std::string existing = read_file(part.string());
                if (existing.rfind(expected_header, 0) == 0) {
                    if (existing.find(",failed,") != std::string::npos) failed[idx] = true;
                    return;  // completed earlier with the same parameters
                }
            } catch (const std::exception&) {
            }
        }
        std::vector<ClassificationRow> rows;
        std::uint64_t point_stream = derive_stream(master_seed, idx);
        for (int s = 0; s < seeds; ++s) {
            std::uint64_t run_seed = derive_stream(point_stream, static_cast<std::uint64_t>(s));
            ClassificationRow row;
            try {
                RunConfig config;
                config.kernel = grid[idx].kernel;
                config.steps = steps;
                config.seed = run_seed;
                config.checkpoint_ratio = ratio;
                RunSummary summary = run(config);
                PhaseLabel label = classify_phase(summary, grid[idx].kernel, bands);
                row = classification_row(grid[idx].kernel, run_seed, label);
            } catch (const std::exception& e) {
                row.kernel_literal = grid[idx].kernel.literal();
                row.seed = run_seed;
                row.failed = true;
                failed[idx] = true;
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "sweep point " << idx << " seed " << s << " failed: " << e.what()
                          << "\n";
            }
            row.a = grid[idx].a;
            row.b = grid[idx].b;
            rows.push_back(std::move(row));
        }
        std::string body = expected_header + classification_csv(rows, "");
        fs::path tmp = part;
        tmp += ".tmp";
        write_file(tmp.string(), body);
        fs::rename(tmp, part);  // completion marker: the final name appears atomically
    });

    // assemble the final CSV in grid order
    std::ostringstream out;
    out << "# " << kVersion << " cmd=sweep " << sweep_spec << " rng=" << kRngId << "\n";
    out << "kernel,a,b,seed,slope,stderr,label,k_sites,sqrt_ratio,log_ratio,growth_ratio\n";
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        std::string part =
            read_file((parts_dir / ("point_" + std::to_string(idx) + ".csv")).string());
        std::istringstream is(part);
        std::string line;
        while (std::getline(is, line))
            if (!line.empty() && line[0] != '#' && line.rfind("kernel,", 0) != 0)
                out << line << "\n";
    }
    write_file(out_path, out.str());

    bool any_failed = false;
    for (bool f : failed) any_failed = any_failed || f;
    std::cout << "sweep finished: " << grid.size() << " points x " << seeds << " seeds -> "
              << out_path << (any_failed ? " (with failures)" : "") << "\n";
    return any_failed ? 1 : 0;
}

int cmd_gibbs_check(const std::string& literal, const std::string& preset_name, int w, int H,
                    const std::string& out_path) {
    KernelChoice choice = resolve_kernel(literal, preset_name);
    if (!is_positive_definite(choice.kernel))
        throw KernelError("gibbs-check: kernel precision is not positive definite");
    StationarityReport report = exact_stationarity_check(choice.kernel, w, H);

    // Radon-Nikodym identity over all states whose right shift stays inside
    TruncatedChain chain = build_truncated_chain(choice.kernel, w, H);
    double rn_max = 0.0;
    for (const auto& eta : chain.states) {
        if (eta.at(-w) != 0) continue;
        rn_max = std::max(rn_max, rn_identity_residual(eta, choice.kernel));
    }

    std::ostringstream os;
    os << report.to_text() << "  rn max residual   " << fmt_double(rn_max) << "\n";
    bool pass = rn_max < 1e-9 && report.residual_discrete <= 5.0 * report.leakage;
    os << "  verdict           " << (pass ? "pass" : "fail") << "\n";
    std::cout << os.str();
    if (!out_path.empty()) {
        std::string prov = provenance_line("gibbs-check", choice.kernel.literal(),
                                           "w=" + std::to_string(w) + ";H=" + std::to_string(H), 0);
        write_file(out_path, prov + os.str());
    }
    return pass ? 0 : 1;
}

int cmd_coupling_check(std::int64_t steps, int seeds, std::uint64_t master_seed,
                       const std::string& out_path, const std::string& scenario_out) {
    struct SeedResult {
        std::uint64_t seed;
        std::int64_t backtrack;
        double ratio;
        bool good;
        bool recursion_zero;
        std::int64_t x_contiguous;
    };
    std::vector<SeedResult> results(static_cast<std::size_t>(seeds));
    std::vector<std::string> scenario_csv(static_cast<std::size_t>(seeds));
    parallel_for_index(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        std::uint64_t seed = derive_stream(master_seed, i);
        CoupledRun cr = run_coupled(steps, seed);
        ScenarioReport rep = check_scenario(cr);
        bool rec_zero = true;
        for (const auto& r : rep.records)
            if (r.recursion_residual && *r.recursion_residual != 0) rec_zero = false;
        double ratio = static_cast<double>(cr.positions.back()) /
                       std::sqrt(2.0 * static_cast<double>(steps));
        results[i] = {seed, rep.max_backtrack, ratio, rep.good, rec_zero, rep.x_contiguous};
        if (!scenario_out.empty()) scenario_csv[i] = rep.to_csv();
    });

    int backtrack2 = 0, good_flags = 0, ratio_ok = 0, recursion_ok = 0;
    for (const auto& r : results) {
        if (r.backtrack <= 2) ++backtrack2;
        if (r.good) {
            ++good_flags;
            if (r.ratio >= 0.95 && r.ratio <= 1.05) ++ratio_ok;
            if (r.recursion_zero) ++recursion_ok;
        }
    }

    std::ostringstream os;
    os << "coupling check: " << seeds << " seeds x " << steps << " steps\n"
       << "  backtrack <= 2    " << backtrack2 << " (" << (100.0 * backtrack2 / seeds) << "%)\n"
       << "  good scenario     " << good_flags << "\n"
       << "  ratio in band     " << ratio_ok << " of " << good_flags << "\n"
       << "  recursion exact   " << recursion_ok << " of " << good_flags << "\n";
    bool pass = good_flags * 20 > seeds && ratio_ok == good_flags && recursion_ok == good_flags;
    os << "  verdict           " << (pass ? "pass" : "fail") << "\n";
    std::cout << os.str();

    if (!out_path.empty()) {
        std::ostringstream csv;
        csv << provenance_line("coupling-check", preset("second_derivative").kernel.literal(),
                               std::to_string(master_seed), steps);
        csv << "seed,max_backtrack,ratio,good,recursion_zero,x_contiguous\n";
        for (const auto& r : results)
            csv << r.seed << ',' << r.backtrack << ',' << fmt_double(r.ratio) << ',' << r.good
                << ',' << r.recursion_zero << ',' << r.x_contiguous << '\n';
        write_file(out_path, csv.str());
    }
    if (!scenario_out.empty()) {
        // per-site scenario table of the first flagged seed (first seed if none)
        std::size_t pick = 0;
        for (std::size_t i = 0; i < results.size(); ++i)
            if (results[i].good) {
                pick = i;
                break;
            }
        std::string prov = provenance_line("coupling-check",
                                           preset("second_derivative").kernel.literal(),
                                           std::to_string(results[pick].seed), steps);
        write_file(scenario_out, prov + scenario_csv[pick]);
    }
    return pass ? 0 : 1;
}

int cmd_stuck_scan(double b, int k_min, int k_max, int per_interval, std::int64_t steps,
                   int seeds, std::uint64_t master_seed, double ratio, const std::string& out) {
    if (k_min < 1 || k_max < k_min || per_interval < 1 || b <= 0.0) {
        std::cerr << "stuck-scan: need b > 0, 1 <= k-min <= k-max, per-interval >= 1\n";
        return 2;
    }
    std::ostringstream csv;
    csv << "# " << kVersion << " cmd=stuck-scan b=" << fmt_double(b) << " k=[" << k_min << ","
        << k_max << "] per_interval=" << per_interval << " seeds=" << seeds << " steps=" << steps
        << " master=" << master_seed << " rng=" << kRngId << "\n";
    csv << "k,ratio,a,b,seed,predicted_sites,detected_sites\n";

    struct Job {
        int k;
        double r, a;
        std::uint64_t seed;
        int predicted;
        int detected = 0;
    };
    std::vector<Job> jobs;
    std::size_t point_idx = 0;
    for (int k = k_min; k <= k_max; ++k) {
        double lo = critical_ratio(k), hi = critical_ratio(k + 1);
        for (int i = 1; i <= per_interval; ++i, ++point_idx) {
            double r = lo + (hi - lo) * i / (per_interval + 1.0);
            double a = -b / r;
            auto predicted = predict_stuck_size(a, b);
            std::uint64_t stream = derive_stream(master_seed, point_idx);
            for (int s = 0; s < seeds; ++s)
                jobs.push_back({k, r, a, derive_stream(stream, static_cast<std::uint64_t>(s)),
                                predicted.value_or(0)});
        }
    }
    parallel_for_index(jobs.size(), [&](std::size_t i) {
        RunConfig config;
        config.kernel = InteractionKernel::symmetric_family(jobs[i].a, b);
        config.steps = steps;
        config.seed = jobs[i].seed;
        config.checkpoint_ratio = ratio;
        RunSummary summary = run(config);
        if (auto stuck = detect_stuck(summary)) jobs[i].detected = stuck->k_sites;
    });
    for (const auto& j : jobs)
        csv << j.k << ',' << fmt_double(j.r) << ',' << fmt_double(j.a) << ',' << fmt_double(b)
            << ',' << j.seed << ',' << j.predicted << ',' << j.detected << '\n';
    write_file(out, csv.str());
    std::cout << "stuck-scan wrote " << out << "\n";
    return 0;
}

int cmd_classify(const std::string& literal, const std::string& preset_name, std::int64_t steps,
                 int seeds, std::uint64_t master_seed, double ratio,
                 const PhaseThresholds& bands, const std::string& out) {
    KernelChoice choice = resolve_kernel(literal, preset_name);
    std::vector<ClassificationRow> rows(static_cast<std::size_t>(seeds));
    std::atomic<bool> any_failed{false};
    parallel_for_index(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        std::uint64_t seed = derive_stream(master_seed, i);
        try {
            RunConfig config;
            config.kernel = choice.kernel;
            config.steps = steps;
            config.seed = seed;
            config.initial_profile = choice.initial_profile;
            config.checkpoint_ratio = ratio;
            RunSummary summary = run(config);
            PhaseLabel label = classify_phase(summary, choice.kernel, bands);
            rows[i] = classification_row(choice.kernel, seed, label);
        } catch (const std::exception&) {
            rows[i].kernel_literal = choice.kernel.literal();
            rows[i].seed = seed;
            rows[i].failed = true;
            any_failed = true;
        }
    });
    std::string prov = provenance_line("classify", choice.kernel.literal(),
                                       std::to_string(master_seed), steps);
    std::string csv = classification_csv(rows, prov);
    if (out.empty())
        std::cout << csv;
    else {
        write_file(out, csv);
        std::cout << "classify wrote " << out << "\n";
    }
    return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locally self-interacting walk simulator"};
    app.set_config("--config");
    app.require_subcommand(1);

    std::string kernel_literal, preset_name, out_path, out_prefix = "walk";
    std::int64_t steps = 1000000;
    std::uint64_t seed = 1, master_seed = 1;
    std::int64_t x0 = 0;
    double ratio = 1.5;
    bool want_slope = false;

    auto* c_run = app.add_subcommand("run", "single run, trajectory + profile CSV");
    c_run->configurable()->fallthrough();
    c_run->add_option("--kernel", kernel_literal, "kernel literal \"a,b\" or \"e:w;...\"");
    c_run->add_option("--preset", preset_name, "preset name");
    c_run->add_option("--steps", steps);
    c_run->add_option("--seed", seed);
    c_run->add_option("--initial-position", x0);
    c_run->add_option("--checkpoint-ratio", ratio);
    c_run->add_option("--out-prefix", out_prefix);
    c_run->add_flag("--slope", want_slope, "print the scaling slope");

    int seeds = 8, circle = 0, k_min = 1, k_max = 8, per_interval = 3;
    double a_min = -1, a_max = 1, b_min = -1, b_max = 1, scan_b = 3.0;
    int a_steps = 0, b_steps = 0;
    PhaseThresholds bands;

    auto add_band_options = [&bands](CLI::App* sub) {
        sub->add_option("--log-slope-max", bands.log_slope_max);
        sub->add_option("--ballistic-slope-min", bands.ballistic_slope_min);
        sub->add_option("--diffusive-low", bands.diffusive_low);
        sub->add_option("--diffusive-high", bands.diffusive_high);
        sub->add_option("--superdiffusive-high", bands.superdiffusive_high);
        sub->add_option("--slow-trapped-low", bands.slow_trapped_low);
    };

    auto* c_sweep = app.add_subcommand("sweep", "phase-diagram sweep over (a,b)");
    c_sweep->configurable()->fallthrough();
    c_sweep->add_option("--a-min", a_min);
    c_sweep->add_option("--a-max", a_max);
    c_sweep->add_option("--a-steps", a_steps, "rectangular grid points along a");
    c_sweep->add_option("--b-min", b_min);
    c_sweep->add_option("--b-max", b_max);
    c_sweep->add_option("--b-steps", b_steps);
    c_sweep->add_option("--circle", circle, "points on the unit circle instead of a rectangle");
    c_sweep->add_option("--seeds", seeds);
    c_sweep->add_option("--steps", steps);
    c_sweep->add_option("--master-seed", master_seed);
    c_sweep->add_option("--checkpoint-ratio", ratio);
    c_sweep->add_option("--out", out_path)->required();
    add_band_options(c_sweep);

    int gw = 2, gH = 3;
    auto* c_gibbs = app.add_subcommand("gibbs-check", "exact stationarity check");
    c_gibbs->configurable()->fallthrough();
    c_gibbs->add_option("--kernel", kernel_literal);
    c_gibbs->add_option("--preset", preset_name);
    c_gibbs->add_option("--w", gw);
    c_gibbs->add_option("--H", gH);
    c_gibbs->add_option("--out", out_path);

    std::string scenario_out;
    auto* c_coupling = app.add_subcommand("coupling-check", "sqrt(2n) scenario check");
    c_coupling->configurable()->fallthrough();
    c_coupling->add_option("--steps", steps);
    c_coupling->add_option("--seeds", seeds);
    c_coupling->add_option("--master-seed", master_seed);
    c_coupling->add_option("--out", out_path);
    c_coupling->add_option("--scenario-out", scenario_out, "per-site table of one flagged seed");

    auto* c_scan = app.add_subcommand("stuck-scan", "scan ratios along the threshold ladder");
    c_scan->configurable()->fallthrough();
    c_scan->add_option("--b", scan_b);
    c_scan->add_option("--k-min", k_min);
    c_scan->add_option("--k-max", k_max);
    c_scan->add_option("--per-interval", per_interval);
    c_scan->add_option("--steps", steps);
    c_scan->add_option("--seeds", seeds);
    c_scan->add_option("--master-seed", master_seed);
    c_scan->add_option("--checkpoint-ratio", ratio);
    c_scan->add_option("--out", out_path)->required();

    auto* c_classify = app.add_subcommand("classify", "per-seed phase labels for one kernel");
    c_classify->configurable()->fallthrough();
    c_classify->add_option("--kernel", kernel_literal);
    c_classify->add_option("--preset", preset_name);
    c_classify->add_option("--steps", steps);
    c_classify->add_option("--seeds", seeds);
    c_classify->add_option("--master-seed", master_seed);
    c_classify->add_option("--checkpoint-ratio", ratio);
    c_classify->add_option("--out", out_path);
    add_band_options(c_classify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_run))
            return cmd_run(kernel_literal, preset_name, steps, seed, x0, ratio, out_prefix,
                           want_slope);
        if (app.got_subcommand(c_sweep)) {
            std::vector<SweepPoint> grid;
            if (circle > 0) {
                for (int i = 0; i < circle; ++i) {
                    double phi = 2.0 * M_PI * i / circle;
                    double b = std::cos(phi), a = std::sin(phi);
                    grid.push_back(
                        {InteractionKernel::symmetric_family(a, b), fmt_double(a), fmt_double(b)});
                }
            } else if (a_steps > 0 && b_steps > 0) {
                for (int i = 0; i < a_steps; ++i)
                    for (int j = 0; j < b_steps; ++j) {
                        double a = a_steps == 1 ? a_min
                                                : a_min + (a_max - a_min) * i / (a_steps - 1.0);
                        double b = b_steps == 1 ? b_min
                                                : b_min + (b_max - b_min) * j / (b_steps - 1.0);
                        if (a == 0.0 && b == 0.0) continue;
                        grid.push_back({InteractionKernel::symmetric_family(a, b), fmt_double(a),
                                        fmt_double(b)});
                    }
            }
            return cmd_sweep(grid, seeds, steps, master_seed, ratio, bands, out_path);
        }
        if (app.got_subcommand(c_gibbs))
            return cmd_gibbs_check(kernel_literal, preset_name, gw, gH, out_path);
        if (app.got_subcommand(c_coupling))
            return cmd_coupling_check(steps, seeds, master_seed, out_path, scenario_out);
        if (app.got_subcommand(c_scan))
            return cmd_stuck_scan(scan_b, k_min, k_max, per_interval, steps, seeds, master_seed,
                                  ratio, out_path);
        if (app.got_subcommand(c_classify))
            return cmd_classify(kernel_literal, preset_name, steps, seeds, master_seed, ratio,
                                bands, out_path);
    } catch (const KernelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
