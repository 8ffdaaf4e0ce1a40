// Command-line front end: experiment orchestration, bundled-example
// reproduction, verification reports and Monte-Carlo equivalence runs.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "deso/examples.hpp"
#include "deso/observer_runtime.hpp"
#include "deso/serialization.hpp"
#include "deso/synthesis.hpp"
#include "deso/validation.hpp"

namespace fs = std::filesystem;
using namespace deso;

namespace {

constexpr int kExitParse = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitPeExhausted = 3;
constexpr int kExitIo = 4;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

Json parse_json_file(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        throw CliError(kExitIo, e.what());
    }
    try {
        return Json::parse(text);
    } catch (const std::exception& e) {
        throw CliError(kExitParse, std::string("JSON parse error in ") + path + ": " + e.what());
    }
}

void write_json_file(const fs::path& path, const Json& j) {
    try {
        write_text_file(path.string(), j.dump(2) + "\n");
    } catch (const std::exception& e) {
        throw CliError(kExitIo, e.what());
    }
}

InputLaw parse_law(const Json& j, const std::string& who) {
    InputLaw law;
    const std::string type = j.value("type", "");
    if (type == "uniform") {
        law.kind = InputLaw::Kind::uniform;
        law.lo = j.value("lo", -5.0);
        law.hi = j.value("hi", 5.0);
        if (!(law.lo <= law.hi)) throw CliError(kExitParse, who + ": lo must be <= hi");
    } else if (type == "sinusoid") {
        law.kind = InputLaw::Kind::sinusoid;
        law.amplitude = j.value("amplitude", 4.0);
    } else {
        throw CliError(kExitParse, who + ": law type must be 'uniform' or 'sinusoid'");
    }
    return law;
}

Json law_to_json(const InputLaw& law) {
    Json j;
    if (law.kind == InputLaw::Kind::uniform) {
        j["type"] = "uniform";
        j["lo"] = law.lo;
        j["hi"] = law.hi;
    } else {
        j["type"] = "sinusoid";
        j["amplitude"] = law.amplitude;
    }
    return j;
}

struct ExperimentConfig {
    Json system_json;
    bool is_lti = false;
    Eigen::Index T = 20;
    std::uint64_t seed = 0;
    InputLaw input_law;
    std::optional<InputLaw> disturbance_law;
    InputLaw init_law{InputLaw::Kind::uniform, 0.0, 2.0, 0.0};
    InputLaw observer_init_law{InputLaw::Kind::uniform, 0.0, 2.0, 0.0};
    bool observer_init_truth = false;  // xhat(0) = x(0), zero initial error
    Tolerances tol;
    std::string mode = "standard";
};

ExperimentConfig load_config(const std::string& path) {
    const Json j = parse_json_file(path);
    ExperimentConfig cfg;
    try {
        if (!j.contains("system")) throw CliError(kExitParse, "config: missing 'system'");
        if (j.at("system").is_string()) {
            cfg.system_json = parse_json_file(j.at("system").get<std::string>());
        } else {
            cfg.system_json = j.at("system");
        }
        cfg.is_lti = cfg.system_json.contains("A0");
        cfg.T = j.value("T", 20);
        if (cfg.T < 1) throw CliError(kExitParse, "config: T must be >= 1");
        cfg.seed = j.value("seed", 0ull);
        cfg.mode = j.value("mode", "standard");
        if (cfg.mode != "standard" && cfg.mode != "uio" && cfg.mode != "eso") {
            throw CliError(kExitParse, "config: mode must be standard|uio|eso");
        }
        if (j.contains("input_law")) cfg.input_law = parse_law(j.at("input_law"), "input_law");
        if (j.contains("disturbance_law")) {
            cfg.disturbance_law = parse_law(j.at("disturbance_law"), "disturbance_law");
        }
        if (j.contains("init_law")) cfg.init_law = parse_law(j.at("init_law"), "init_law");
        if (j.contains("observer_init")) {
            const Json& oi = j.at("observer_init");
            if (oi.is_string() && oi.get<std::string>() == "truth") {
                cfg.observer_init_truth = true;
            } else {
                cfg.observer_init_law = parse_law(oi, "observer_init");
            }
        }
        if (j.contains("tolerances")) {
            const Json& t = j.at("tolerances");
            cfg.tol.rank_tol = t.value("rank_tol", cfg.tol.rank_tol);
            cfg.tol.residual_tol = t.value("residual_tol", cfg.tol.residual_tol);
            cfg.tol.schur_margin = t.value("schur_margin", cfg.tol.schur_margin);
        }
        cfg.tol.validate();
        if ((cfg.mode == "uio" || cfg.mode == "eso") && !cfg.disturbance_law) {
            throw CliError(kExitParse, "config: mode " + cfg.mode + " needs a disturbance_law");
        }
        if (cfg.mode == "eso" && !cfg.is_lti) {
            throw CliError(kExitParse, "config: eso mode needs an LTI system (A0,B0,E0,C0,F0)");
        }
        if (cfg.mode != "eso" && cfg.is_lti) {
            throw CliError(kExitParse,
                           "config: descriptor system (E,A,B,C) required for mode " + cfg.mode);
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError(kExitParse, std::string("config: ") + e.what());
    }
    return cfg;
}

void ensure_out_dir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw CliError(kExitIo, "cannot create output directory " + out.string());
}

// Collection with bounded PE retries; the seed actually used is recorded in
// meta.json so runs stay auditable.
struct CollectedExperiment {
    DataRecord rec;
    std::uint64_t seed_used = 0;
};

CollectedExperiment collect_with_retries(const ExperimentConfig& cfg) {
    constexpr int kMaxRetries = 20;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(attempt);
        std::mt19937_64 rng(seed);
        if (cfg.mode == "eso") {
            const LtiSystem lti = lti_from_json(cfg.system_json);
            DataRecord rec = collect_lti_record(lti, cfg.T, lti.n() + lti.r(), rng,
                                                cfg.input_law, *cfg.disturbance_law);
            rec.seed = seed;
            rec.generator = "eso";
            const Eigen::Index order = lti.n() + lti.r() + 1;
            if (rec.u_d.cols() >= order && input_pe_order(rec.u_d, order, cfg.tol)) {
                return {std::move(rec), seed};
            }
            continue;
        }
        const DescriptorSystem sys = system_from_json(cfg.system_json);
        if (!check_regularity(sys, cfg.tol)) {
            throw CliError(kExitParse, "simulate: system pencil is not regular");
        }
        const WeierstrassForm wf = weierstrass(sys, cfg.tol);
        DataRecord rec = collect_record(sys, wf, cfg.T, sys.n(), rng, cfg.input_law,
                                        cfg.mode == "uio" ? cfg.disturbance_law : std::nullopt,
                                        cfg.tol);
        rec.seed = seed;
        rec.generator = cfg.mode;
        if (pe_assumption_check(rec, wf, cfg.mode == "uio", cfg.tol)) {
            return {std::move(rec), seed};
        }
    }
    throw CliError(kExitPeExhausted,
                   "simulate: persistent-excitation check failed after retries");
}

Json make_meta(const ExperimentConfig& cfg, const CollectedExperiment& exp) {
    Json meta;
    meta["T"] = exp.rec.T;
    meta["seed"] = exp.seed_used;
    meta["system"] = cfg.system_json;
    meta["mode"] = cfg.mode;
    meta["input_law"] = law_to_json(cfg.input_law);
    if (cfg.disturbance_law) meta["disturbance_law"] = law_to_json(*cfg.disturbance_law);
    return meta;
}

struct LoadedDataset {
    DataRecord rec;
    Json meta;
    std::string mode = "standard";
};

LoadedDataset load_dataset(const std::string& data_arg) {
    fs::path dir(data_arg);
    fs::path csv = dir;
    if (fs::is_directory(dir)) {
        csv = dir / "dataset.csv";
    } else {
        dir = csv.parent_path();
    }
    std::string text;
    try {
        text = read_text_file(csv.string());
    } catch (const std::exception& e) {
        throw CliError(kExitIo, e.what());
    }
    LoadedDataset out;
    std::istringstream is(text);
    try {
        out.rec = read_dataset_csv(is);
    } catch (const std::exception& e) {
        throw CliError(kExitParse, std::string("dataset: ") + e.what());
    }
    const fs::path meta_path = dir / "meta.json";
    if (fs::exists(meta_path)) {
        out.meta = parse_json_file(meta_path.string());
        out.mode = out.meta.value("mode", "standard");
        out.rec.seed = out.meta.value("seed", 0ull);
    }
    return out;
}

SynthesisResult synthesize_dataset(const LoadedDataset& ds, const std::string& mode,
                                   const Tolerances& tol) {
    if (mode == "eso") {
        if (!ds.meta.contains("system")) {
            throw CliError(kExitParse, "synthesize: eso mode needs the system in meta.json");
        }
        const LtiSystem lti = lti_from_json(ds.meta.at("system"));
        return synthesize_eso(lti, ds.rec, tol);
    }
    const DataMatrices dm = build_data_matrices(ds.rec);
    if (mode == "uio") return synthesize_uio(dm, ds.rec.q(), tol);
    return synthesize_observer(dm, tol);
}

Json verify_dataset(const LoadedDataset& ds, const std::string& mode, const Tolerances& tol) {
    Json data_side, model_side, agreement;

    DataRecord rec_for_dm = ds.rec;
    std::optional<LtiSystem> lti;
    std::optional<DescriptorSystem> sys;
    if (ds.meta.contains("system")) {
        if (ds.meta.at("system").contains("A0")) {
            lti = lti_from_json(ds.meta.at("system"));
        } else {
            sys = system_from_json(ds.meta.at("system"));
        }
    }
    if (mode == "eso") {
        if (!lti) throw CliError(kExitParse, "verify: eso mode needs the system in meta.json");
        rec_for_dm = augment_record_for_eso(*lti, ds.rec);
    }

    const DataMatrices dm = build_data_matrices(rec_for_dm);
    const Eigen::Index n = dm.n(), m = dm.m();
    const Eigen::Index q = mode == "uio" ? ds.rec.q() : 0;

    // The corollary rank equalities presuppose a regular generator, which
    // the disturbance-as-state augmentation is not; they are skipped there.
    std::optional<bool> c1;
    std::optional<bool> c2;
    if (mode != "eso") {
        c1 = corollary1_test(dm, m, n, tol);
        data_side["corollary1"] = *c1;
    }
    if (mode == "uio") {
        c2 = corollary2_test(dm, m, n, q, tol);
        data_side["corollary2"] = *c2;
    }
    const bool rc = rank_condition_check(dm, tol);
    data_side["rank_condition"] = rc;
    const auto kern = kernel_inclusion_check(solve_family(dm, tol).deq, tol);
    data_side["kernel_inclusion"] = kern.holds;
    data_side["kernel_inclusion_residual"] = kern.frobenius;

    if (sys) {
        const bool dn = dual_normalizability(*sys, tol);
        model_side["dual_normalizability"] = dn;
        const bool det = pbh_detectable(*sys, tol);
        model_side["pbh_detectable"] = det;
        agreement["corollary1_implies_dual_normalizability"] = !c1.value_or(false) || dn;
        if (mode == "uio" && sys->F) {
            const bool match = matching_condition(*sys, tol);
            model_side["matching_condition"] = match;
            const bool uio_ok = uio_model_existence(*sys, tol);
            model_side["uio_existence"] = uio_ok;
            agreement["corollary2_implies_matching"] = !*c2 || match;
            agreement["rank_condition_vs_uio_existence"] = rc == uio_ok;
        } else {
            agreement["rank_condition_vs_detectability"] = rc == det;
        }
    } else if (lti) {
        const DescriptorSystem aug = augment_for_eso(*lti);
        model_side["dual_normalizability"] = dual_normalizability(aug, tol);
        const bool sd = strong_detectability(*lti, tol);
        model_side["strong_detectability"] = sd;
        agreement["rank_condition_vs_strong_detectability"] = rc == sd;
    }

    Json checks;
    checks["data_side"] = data_side;
    checks["model_side"] = model_side;
    checks["agreement"] = agreement;
    return checks;
}

struct EstimateOutcome {
    EstimationRun est;
    Mat truth;
};

EstimateOutcome run_estimate(const ObserverGains& gains, const ExperimentConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    const Eigen::Index L = cfg.T;

    Mat truth;
    Mat y;
    Mat u;
    if (cfg.mode == "eso") {
        const LtiSystem lti = lti_from_json(cfg.system_json);
        if (gains.n() != lti.n() + lti.r()) {
            throw CliError(kExitParse, "estimate: gains do not match the augmented system");
        }
        u = cfg.input_law.sample(rng, lti.m(), L);
        const Mat d = cfg.disturbance_law->sample(rng, lti.r(), L + 1);
        const Vec x0 = cfg.init_law.sample(rng, lti.n(), 1).col(0);
        const Trajectory traj = simulate_lti(lti, x0, u, d, L);
        truth.resize(lti.n() + lti.r(), L + 1);
        truth.topRows(lti.n()) = traj.x;
        truth.bottomRows(lti.r()) = d.leftCols(L + 1);
        y = traj.y;
    } else {
        const DescriptorSystem sys = system_from_json(cfg.system_json);
        const WeierstrassForm wf = weierstrass(sys, cfg.tol);
        if (gains.n() != sys.n()) {
            throw CliError(kExitParse, "estimate: gains do not match the system");
        }
        u = cfg.input_law.sample(rng, sys.m(), L + wf.s);
        std::optional<Mat> eta;
        if (cfg.mode == "uio") {
            eta = cfg.disturbance_law->sample(rng, sys.q(), L + wf.s);
        }
        const Vec z10 = cfg.init_law.sample(rng, wf.n1, 1).col(0);
        const Trajectory traj = simulate(sys, wf, z10, u, L, eta, cfg.tol);
        truth = traj.x;
        y = traj.y;
    }
    const Vec xhat0 = cfg.observer_init_truth
                          ? Vec(truth.col(0))
                          : Vec(cfg.observer_init_law.sample(rng, gains.n(), 1).col(0));
    EstimateOutcome out;
    out.est = run(gains, u.leftCols(L), y, xhat0, truth);
    out.truth = truth;
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    const CollectedExperiment exp = collect_with_retries(cfg);
    ensure_out_dir(out_dir);
    std::ostringstream csv;
    write_dataset_csv(csv, exp.rec);
    try {
        write_text_file((fs::path(out_dir) / "dataset.csv").string(), csv.str());
    } catch (const std::exception& e) {
        throw CliError(kExitIo, e.what());
    }
    write_json_file(fs::path(out_dir) / "meta.json", make_meta(cfg, exp));
    std::cout << "dataset written to " << out_dir << " (seed " << exp.seed_used << ")\n";
    return 0;
}

int cmd_synthesize(const std::string& data_arg, std::string mode, const std::string& out_dir) {
    const LoadedDataset ds = load_dataset(data_arg);
    if (mode.empty()) mode = ds.mode;
    const Tolerances tol;
    const SynthesisResult res = synthesize_dataset(ds, mode, tol);
    ensure_out_dir(out_dir);
    write_json_file(fs::path(out_dir) / "report.json", report_to_json(res));
    if (res.gains) {
        write_json_file(fs::path(out_dir) / "gains.json", gains_to_json(*res.gains));
    }
    std::cout << (res.report.feasible ? "feasible" : "infeasible")
              << " spectral_radius=" << res.report.spectral_radius
              << " data_residual=" << res.report.data_residual << "\n";
    return res.report.feasible ? 0 : kExitInfeasible;
}

int cmd_estimate(const std::string& gains_path, const std::string& config_path,
                 const std::string& out_dir) {
    const Json gj = parse_json_file(gains_path);
    ObserverGains gains;
    try {
        gains = gains_from_json(gj);
    } catch (const std::exception& e) {
        throw CliError(kExitParse, std::string("gains: ") + e.what());
    }
    const ExperimentConfig cfg = load_config(config_path);
    const EstimateOutcome out = run_estimate(gains, cfg);
    ensure_out_dir(out_dir);
    std::ostringstream csv;
    write_run_csv(csv, out.est, out.truth);
    try {
        write_text_file((fs::path(out_dir) / "run.csv").string(), csv.str());
    } catch (const std::exception& e) {
        throw CliError(kExitIo, e.what());
    }
    std::cout << "final_error=" << out.est.err_traj(out.est.err_traj.size() - 1)
              << " recursion_residual=" << out.est.recursion_residual << "\n";
    return 0;
}

int cmd_verify(const std::string& data_arg, std::string mode, const std::string& out_dir) {
    const LoadedDataset ds = load_dataset(data_arg);
    if (mode.empty()) mode = ds.mode;
    const Json checks = verify_dataset(ds, mode, Tolerances{});
    ensure_out_dir(out_dir);
    write_json_file(fs::path(out_dir) / "checks.json", checks);
    std::cout << checks.dump(2) << "\n";
    return 0;
}

int cmd_montecarlo(const std::string& mode, int trials, std::uint64_t seed,
                   const std::string& out_dir) {
    if (trials < 1) throw CliError(kExitParse, "montecarlo: trials must be >= 1");
    EquivalenceMode m;
    if (mode == "theorem2") {
        m = EquivalenceMode::theorem2;
    } else if (mode == "theorem4") {
        m = EquivalenceMode::theorem4;
    } else {
        throw CliError(kExitParse, "montecarlo: mode must be theorem2|theorem4");
    }
    const MonteCarloSummary summary = montecarlo_equivalence(m, trials, seed);
    ensure_out_dir(out_dir);
    write_json_file(fs::path(out_dir) / "summary.json", summary_to_json(summary));
    std::cout << "trials=" << summary.trials << " pe_passed=" << summary.pe_passed
              << " agreements=" << summary.agreements
              << " disagreements=" << summary.disagreements << "\n";
    return summary.disagreements == 0 ? 0 : kExitInfeasible;
}

ExperimentConfig repro_config(int example) {
    ExperimentConfig cfg;
    cfg.input_law = InputLaw{InputLaw::Kind::uniform, -5.0, 5.0, 0.0};
    switch (example) {
        case 1:
            cfg.system_json = system_to_json(demo_descriptor_plant());
            cfg.T = 20;
            cfg.mode = "standard";
            break;
        case 2:
            cfg.system_json = system_to_json(demo_uio_plant());
            cfg.T = 20;
            cfg.mode = "uio";
            cfg.disturbance_law = InputLaw{InputLaw::Kind::uniform, -5.0, 5.0, 0.0};
            break;
        case 4:
            cfg.system_json = lti_to_json(demo_lti_plant());
            cfg.is_lti = true;
            cfg.T = 25;
            cfg.mode = "eso";
            cfg.disturbance_law = InputLaw{InputLaw::Kind::uniform, -3.0, 3.0, 0.0};
            break;
        default:
            throw CliError(kExitParse, "repro: example must be 1, 2 or 4");
    }
    return cfg;
}

int cmd_repro(int example, std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg = repro_config(example);
    cfg.seed = seed;
    ensure_out_dir(out_dir);

    const CollectedExperiment exp = collect_with_retries(cfg);
    std::ostringstream csv;
    write_dataset_csv(csv, exp.rec);
    try {
        write_text_file((fs::path(out_dir) / "dataset.csv").string(), csv.str());
    } catch (const std::exception& e) {
        throw CliError(kExitIo, e.what());
    }
    write_json_file(fs::path(out_dir) / "meta.json", make_meta(cfg, exp));

    LoadedDataset ds;
    ds.rec = exp.rec;
    ds.meta = make_meta(cfg, exp);
    ds.mode = cfg.mode;
    const SynthesisResult res = synthesize_dataset(ds, cfg.mode, cfg.tol);
    write_json_file(fs::path(out_dir) / "report.json", report_to_json(res));

    // Reference radii of the original example instances, annotations only:
    // the synthesized radius depends on the recorded data.
    const double reference_radius = example == 1 ? 0.2083 : example == 2 ? 0.4628 : 0.7426;

    Json summary;
    summary["example"] = example;
    summary["seed"] = exp.seed_used;
    summary["feasible"] = res.report.feasible;
    summary["spectral_radius"] = res.report.spectral_radius;
    summary["reference_radius"] = reference_radius;

    if (!res.gains) {
        summary["converged"] = false;
        write_json_file(fs::path(out_dir) / "summary.json", summary);
        return kExitInfeasible;
    }
    write_json_file(fs::path(out_dir) / "gains.json", gains_to_json(*res.gains));

    const Json checks = verify_dataset(ds, cfg.mode, cfg.tol);
    write_json_file(fs::path(out_dir) / "checks.json", checks);

    ExperimentConfig test_cfg = cfg;
    test_cfg.seed = exp.seed_used + 1000003;
    test_cfg.input_law = InputLaw{InputLaw::Kind::sinusoid, 0.0, 0.0, 4.0};
    if (example == 2) {
        test_cfg.disturbance_law = InputLaw{InputLaw::Kind::uniform, -1.0, 1.0, 0.0};
    }
    if (example == 4) {
        test_cfg.disturbance_law = InputLaw{InputLaw::Kind::uniform, -2.0, 2.0, 0.0};
        test_cfg.init_law = InputLaw{InputLaw::Kind::uniform, -2.0, 0.0, 0.0};
    }
    test_cfg.T = example == 4 ? 120 : 60;
    const EstimateOutcome out = run_estimate(*res.gains, test_cfg);
    std::ostringstream run_csv;
    write_run_csv(run_csv, out.est, out.truth);
    try {
        write_text_file((fs::path(out_dir) / "run.csv").string(), run_csv.str());
    } catch (const std::exception& e) {
        throw CliError(kExitIo, e.what());
    }

    const Eigen::Index last = out.est.err_traj.size() - 1;
    summary["final_error"] = out.est.err_traj(last);
    summary["recursion_residual"] = out.est.recursion_residual;
    summary["converged"] = out.est.err_traj(last) < 1e-6;
    summary["checks"] = checks;
    write_json_file(fs::path(out_dir) / "summary.json", summary);

    std::cout << "example " << example << ": feasible, radius=" << res.report.spectral_radius
              << " (reference instance " << reference_radius
              << "), final_error=" << out.est.err_traj(last) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven observer synthesis for descriptor systems"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", data_arg, mode, gains_path, mc_mode = "theorem2";
    int trials = 50, example = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* sim = app.add_subcommand("simulate", "collect a dataset from a configured experiment");
    sim->add_option("--config", config_path, "experiment config JSON")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_given = true;
    });

    auto* syn = app.add_subcommand("synthesize", "synthesize observer gains from a dataset");
    syn->add_option("--data", data_arg, "dataset.csv or its directory")->required();
    syn->add_option("--mode", mode, "standard|uio|eso (defaults to the dataset's mode)");
    syn->add_option("--out", out_dir, "output directory");

    auto* est = app.add_subcommand("estimate", "run synthesized gains on a fresh trajectory");
    est->add_option("--gains", gains_path, "gains.json")->required();
    est->add_option("--config", config_path, "test experiment config JSON")->required();
    est->add_option("--out", out_dir, "output directory");

    auto* ver = app.add_subcommand("verify", "data-side checks against model-side oracles");
    ver->add_option("--data", data_arg, "dataset.csv or its directory")->required();
    ver->add_option("--mode", mode, "standard|uio|eso (defaults to the dataset's mode)");
    ver->add_option("--out", out_dir, "output directory");

    auto* rep = app.add_subcommand("repro", "reproduce a bundled example end to end");
    rep->add_option("--example", example, "bundled example id: 1, 2 or 4")->required();
    rep->add_option("--seed", seed, "experiment seed");
    rep->add_option("--out", out_dir, "output directory");

    auto* mc = app.add_subcommand("montecarlo", "model vs data equivalence over random plants");
    mc->add_option("--mode", mc_mode, "theorem2|theorem4");
    mc->add_option("--trials", trials, "number of random plants");
    mc->add_option("--seed", seed, "base seed");
    mc->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return kExitParse;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(config_path, out_dir,
                                seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
        }
        if (syn->parsed()) return cmd_synthesize(data_arg, mode, out_dir);
        if (est->parsed()) return cmd_estimate(gains_path, config_path, out_dir);
        if (ver->parsed()) return cmd_verify(data_arg, mode, out_dir);
        if (rep->parsed()) return cmd_repro(example, seed, out_dir);
        if (mc->parsed()) return cmd_montecarlo(mc_mode, trials, seed, out_dir);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitParse;
}
