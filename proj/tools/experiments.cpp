#include "experiments.hpp"

#include "output.hpp"

#include "kldwave/accel.hpp"
#include "kldwave/checks.hpp"
#include "kldwave/detection.hpp"
#include "kldwave/errors.hpp"
#include "kldwave/isac.hpp"
#include "kldwave/random_access.hpp"

#include <algorithm>
#include <ostream>

namespace kldwave::cli {

namespace {

std::uint64_t seed_of(const Json& c) {
    const Json& s = c.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
        throw ConfigError("seed must be a non-negative integer");
    }
    return s.get<std::uint64_t>();
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double kld_of(const SensingScenario& sc, double f) { return sc.n_rx * (f - sc.snapshots); }

SolveResult run_algorithm(const std::string& name, const SensingScenario& sc, const Waveform& x0,
                          const SolverOptions& opts, int max_backtracks) {
    if (name == "fp") return fp_kld(sc, x0, opts);
    if (name == "mm") return mm_kld(sc, x0, opts);
    if (name == "amm") return a_mm_kld(sc, x0, opts, max_backtracks);
    throw ConfigError("algorithm must be one of fp, mm, amm (got '" + name + "')");
}

DetectionOptions detection_from(const Json& j, std::uint64_t seed, int threads) {
    DetectionOptions d;
    d.alpha = get_number(j, "alpha");
    d.n_cal = get_int(j, "n_cal", 1);
    d.n_mc = get_int(j, "n_mc", 1);
    d.seed = seed;
    d.threads = threads;
    if (!(d.alpha > 0.0 && d.alpha < 1.0)) throw ConfigError("detection.alpha must lie in (0, 1)");
    return d;
}

int optimize(const Json& c, std::ostream& log) {
    const std::uint64_t seed = seed_of(c);
    const std::string algorithm = get_string(c, "algorithm");
    const SolverOptions opts = solver_from(c["solver"], seed);
    const int backtracks = get_int(c["solver"], "max_backtracks", 0);
    const std::string file = get_string(c, "scenario_file");
    const SensingScenario sc =
        file.empty() ? generate_scenario(generator_from(c["generator"]), seed) : sensing_from_json(read_json_file(file));

    Waveform x0;
    const std::string init_file = get_string(c, "init_file");
    const std::string init = get_string(c, "init");
    if (!init_file.empty()) {
        x0 = waveform_from_json(read_json_file(init_file));
        if (x0.x.rows() != sc.snapshots || x0.x.cols() != sc.n_tx) {
            throw ShapeMismatch("init_file waveform must be snapshots x n_tx");
        }
    } else if (init == "random" || init == "identity") {
        x0 = init_waveform(sc, seed, init == "random" ? InitKind::RandomGaussian : InitKind::ScaledIdentityBlock);
    } else {
        throw ConfigError("init must be 'random' or 'identity'");
    }
    if (algorithm != "fp" && algorithm != "mm" && algorithm != "amm") {
        throw ConfigError("algorithm must be one of fp, mm, amm (got '" + algorithm + "')");
    }

    RunOutput out(get_string(c, "out"), "optimize", c);
    const SolveResult r = run_algorithm(algorithm, sc, x0, opts, backtracks);
    const SolverTrace& t = r.trace;
    CsvTable trace({"iter", "objective", "elapsed_s", "mu_or_gamma"}, {"elapsed_s"});
    for (std::size_t k = 0; k < t.objective_per_iter.size(); ++k) {
        const double mu = k < t.mu_per_iter.size() ? t.mu_per_iter[k] : std::nan("");
        trace.add_row({std::to_string(k), csv_number(kld_of(sc, t.objective_per_iter[k])),
                       csv_number(t.elapsed_seconds_per_iter[k]), csv_number(mu)});
    }
    out.write_csv("trace.csv", trace);
    out.write_json("waveform.json", to_json(r.w));
    const double kld = kld_of(sc, t.objective_per_iter.back());
    out.result() = Json{{"algorithm", algorithm},
                        {"iterations", t.iterations},
                        {"status", std::string(to_string(t.status))},
                        {"kld", kld},
                        {"power", r.w.power()}};
    out.finish();
    log << algorithm << ": " << t.iterations << " iterations (" << to_string(t.status) << "), KLD " << kld << '\n';
    return kExitOk;
}

int benchmark(const Json& c, std::ostream& log) {
    const std::uint64_t seed = seed_of(c);
    const SolverOptions opts = solver_from(c["solver"], seed);
    const int backtracks = get_int(c["solver"], "max_backtracks", 0);
    const int reps = get_int(c, "repetitions", 3);
    std::vector<std::string> algorithms;
    for (const Json& a : c["algorithms"]) {
        if (!a.is_string()) throw ConfigError("algorithms must be strings");
        algorithms.push_back(a.get<std::string>());
        if (algorithms.back() != "fp" && algorithms.back() != "mm" && algorithms.back() != "amm") {
            throw ConfigError("unknown algorithm '" + algorithms.back() + "'");
        }
    }
    Json sizes = c["sizes"];
    if (get_bool(c, "paper_scale")) sizes.push_back(Json{{"n_tx", 32}, {"n_rx", 32}, {"snapshots", 50}});
    std::vector<GeneratorConfig> gens;
    for (const Json& s : sizes) {
        if (!s.is_object()) throw ConfigError("sizes entries must be objects");
        Json g = c["generator"];
        merge_config(g, s, "sizes");
        gens.push_back(generator_from(g));
    }

    RunOutput out(get_string(c, "out"), "benchmark", c);
    CsvTable table({"algorithm", "n_tx", "n_rx", "snapshots", "median_per_iter_s", "iterations", "total_s"},
                   {"median_per_iter_s", "total_s"});
    for (const GeneratorConfig& g : gens) {
        const SensingScenario sc = generate_scenario(g, seed);
        const Waveform x0 = init_waveform(sc, seed);
        for (const std::string& a : algorithms) {
            for (int rep = 0; rep < reps; ++rep) {
                const SolverTrace t = run_algorithm(a, sc, x0, opts, backtracks).trace;
                const auto& e = t.elapsed_seconds_per_iter;
                // The first iteration carries one-off costs and is left out of the median.
                std::vector<double> per;
                for (std::size_t k = 2; k < e.size(); ++k) per.push_back(e[k] - e[k - 1]);
                if (per.empty() && e.size() > 1) per.push_back(e[1] - e[0]);
                table.add_row({a, std::to_string(g.n_tx), std::to_string(g.n_rx), std::to_string(g.snapshots),
                               csv_number(median(per)), std::to_string(t.iterations), csv_number(e.back())});
                log << a << ' ' << g.n_tx << 'x' << g.n_rx << " T=" << g.snapshots << " rep " << rep << ": "
                    << t.iterations << " iterations, " << e.back() << " s\n";
            }
        }
    }
    out.write_csv("benchmark.csv", table);
    out.finish();
    return kExitOk;
}

int pareto(const Json& c, std::ostream& log) {
    const std::uint64_t seed = seed_of(c);
    const SolverOptions opts = solver_from(c["solver"], seed);
    const DetectionOptions det = detection_from(c["detection"], seed, get_int(c, "parallel", 1));
    const std::string variant_name = get_string(c, "variant");
    if (variant_name != "fp" && variant_name != "mm") throw ConfigError("variant must be 'fp' or 'mm'");
    const IsacVariant variant = variant_name == "fp" ? IsacVariant::Fp : IsacVariant::Mm;
    const bool accelerate = get_bool(c, "accelerate");
    if (accelerate && variant == IsacVariant::Fp) throw ConfigError("accelerate requires variant 'mm'");

    const std::string file = get_string(c, "isac_file");
    IsacScenario base;
    if (file.empty()) {
        const SensingScenario sensing = generate_scenario(generator_from(c["generator"]), seed);
        base = make_isac_scenario(sensing, get_int(c["comm"], "n_c", 1), get_number(c["comm"], "snr_db"), 0.0, seed);
    } else {
        base = isac_from_json(read_json_file(file));
    }
    std::vector<double> grid = get_numbers(c, "rho_grid");
    if (grid.empty()) {
        const int n = get_int(c, "rho_points", 2);
        for (int k = 0; k < n; ++k) grid.push_back(static_cast<double>(k) / (n - 1));
    }

    RunOutput out(get_string(c, "out"), "pareto", c);
    const auto points =
        pareto_sweep(base, grid, init_waveform(base.sensing, seed), opts, variant, accelerate, get_bool(c, "warm_start"));
    CsvTable table({"rho", "kld", "mi", "detection_probability", "converged_iters"});
    Json waveforms = Json::array();
    for (const ParetoPoint& p : points) {
        const UserDetection d = sensing_detection(base.sensing, p.w, det);
        table.add_row({csv_number(p.rho), csv_number(p.kld), csv_number(p.mi), csv_number(d.p_d.estimate),
                       std::to_string(p.iterations)});
        waveforms.push_back(Json{{"rho", p.rho}, {"waveform", to_json(p.w)}});
        log << "rho " << p.rho << ": KLD " << p.kld << ", MI " << p.mi << ", P_d " << d.p_d.estimate << '\n';
    }
    out.write_csv("pareto.csv", table);
    out.write_json("waveforms.json", waveforms);
    out.finish();
    return kExitOk;
}

struct RaRows {
    DetectionResult optimized;
    DetectionResult baseline;
};

RaRows evaluate_ra(const RandomAccessScenario& sc, const SolverOptions& opts, bool accelerate,
                   const DetectionOptions& det) {
    const WaveformSet xs = ra_solve(sc, init_waveform_set(sc, opts.seed), opts, accelerate).xs;
    return {detection_experiment(sc, xs, det), detection_experiment(sc, orthogonal_baseline(sc), det)};
}

CsvTable ra_table(const std::string& key, int n_devices) {
    std::vector<std::string> cols{"design", key};
    for (int i = 1; i <= n_devices; ++i) cols.push_back("p_d_" + std::to_string(i));
    for (const char* s : {"geometric_mean", "ci_low", "ci_high"}) cols.emplace_back(s);
    return CsvTable(cols);
}

void add_ra_rows(CsvTable& t, const std::string& value, const RaRows& r) {
    for (const auto& [design, d] : {std::pair{"optimized", &r.optimized}, std::pair{"orthogonal", &r.baseline}}) {
        std::vector<std::string> row{design, value};
        for (const UserDetection& u : d->users) row.push_back(csv_number(u.p_d.estimate));
        row.push_back(csv_number(d->geometric_mean));
        row.push_back(csv_number(d->ci_low));
        row.push_back(csv_number(d->ci_high));
        t.add_row(row);
    }
}

int random_access(const Json& c, std::ostream& log) {
    const std::uint64_t seed = seed_of(c);
    const SolverOptions opts = solver_from(c["solver"], seed);
    DetectionOptions det = detection_from(c["detection"], seed, get_int(c, "parallel", 1));
    det.genie = get_bool(c, "genie");
    const bool accelerate = get_bool(c, "accelerate");
    const Json& g = c["generator"];
    RaGeneratorConfig gen;
    gen.n_devices = get_int(g, "n_devices", 1);
    gen.n_tx = get_int(g, "n_tx", 1);
    gen.n_rx = get_int(g, "n_rx", 1);
    gen.snapshots = get_int(g, "snapshots", 1);
    gen.power_budget = get_number(g, "power_budget");
    gen.snr_db = get_number(g, "snr_db");
    gen.prior = get_number(g, "prior");
    gen.rho_max = get_number(g, "rho_max");
    const std::vector<double> snrs = get_numbers(c, "snr_grid");
    const std::vector<double> lengths = get_numbers(c, "t_grid");
    for (double t : lengths) {
        if (t < 1 || t != std::floor(t)) throw ConfigError("t_grid entries must be positive integers");
    }
    const std::string file = get_string(c, "scenario_file");
    if (file.empty() && snrs.empty() && lengths.empty()) throw ConfigError("snr_grid and t_grid are both empty");
    if (file.empty()) generate_random_access(gen, seed);  // surface generator errors before any work

    RunOutput out(get_string(c, "out"), "random-access", c);
    if (!file.empty()) {
        const RandomAccessScenario sc = random_access_from_json(read_json_file(file));
        CsvTable t = ra_table("T", sc.n_devices);
        add_ra_rows(t, std::to_string(sc.snapshots), evaluate_ra(sc, opts, accelerate, det));
        out.write_csv("random_access.csv", t);
    } else {
        if (!snrs.empty()) {
            CsvTable t = ra_table("snr_db", gen.n_devices);
            for (double snr : snrs) {
                RaGeneratorConfig gi = gen;
                gi.snr_db = snr;
                const RaRows r = evaluate_ra(generate_random_access(gi, seed), opts, accelerate, det);
                add_ra_rows(t, csv_number(snr), r);
                log << "SNR " << snr << " dB: optimized " << r.optimized.geometric_mean << ", orthogonal "
                    << r.baseline.geometric_mean << '\n';
            }
            out.write_csv("ra_snr.csv", t);
        }
        if (!lengths.empty()) {
            CsvTable t = ra_table("T", gen.n_devices);
            for (double len : lengths) {
                RaGeneratorConfig gi = gen;
                gi.snapshots = static_cast<int>(len);
                const RaRows r = evaluate_ra(generate_random_access(gi, seed), opts, accelerate, det);
                add_ra_rows(t, std::to_string(gi.snapshots), r);
                log << "T " << gi.snapshots << ": optimized " << r.optimized.geometric_mean << ", orthogonal "
                    << r.baseline.geometric_mean << '\n';
            }
            out.write_csv("ra_length.csv", t);
        }
    }
    out.finish();
    return kExitOk;
}

// Scenario kind is recognized from its distinguishing keys.
std::string validate_scenario_file(const std::string& path) {
    const Json j = read_json_file(path);
    if (!j.is_object()) throw ConfigError(path + ": scenario must be a JSON object");
    if (j.contains("n_devices")) {
        random_access_from_json(j);
        return "random-access";
    }
    if (j.contains("h_c")) {
        isac_from_json(j);
        return "isac";
    }
    sensing_from_json(j);
    return "sensing";
}

int validate(const Json& c, std::ostream& log) {
    const std::uint64_t seed = seed_of(c);
    const int threads = get_int(c, "parallel", 1);
    std::vector<std::string> names;
    for (const Json& n : c["checks"]) {
        if (!n.is_string()) throw ConfigError("checks must be strings");
        names.push_back(n.get<std::string>());
    }
    const std::string file = get_string(c, "scenario_file");
    Json report{{"scenario", nullptr}, {"checks", Json::array()}};
    if (!file.empty()) {
        const std::string kind = validate_scenario_file(file);
        log << "scenario " << file << ": valid " << kind << " scenario\n";
        report["scenario"] = Json{{"file", file}, {"kind", kind}};
    }
    bool ok = true;
    RunOutput out(get_string(c, "out"), "validate", c);
    if (get_bool(c, "run_checks")) {
        for (const checks::CheckResult& r : checks::run_checks({seed, threads}, names)) {
            log << checks::format(r) << '\n' << std::flush;
            ok = ok && r.passed;
            report["checks"].push_back(Json{{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        }
    }
    out.write_json("report.json", report);
    out.result() = Json{{"all_passed", ok}};
    out.finish();
    return ok ? kExitOk : kExitChecksFailed;
}

}  // namespace

int run_command(const std::string& command, const Json& config, std::ostream& log) {
    if (command == "optimize") return optimize(config, log);
    if (command == "benchmark") return benchmark(config, log);
    if (command == "pareto") return pareto(config, log);
    if (command == "random-access") return random_access(config, log);
    if (command == "validate") return validate(config, log);
    throw ConfigError("unknown command '" + command + "'");
}

int run(const Invocation& inv, std::ostream& log, std::ostream& err) {
    try {
        return run_command(inv.command, resolve_config(inv), log);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InputError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace kldwave::cli
