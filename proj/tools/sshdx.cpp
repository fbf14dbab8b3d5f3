// sshdx command-line driver.
//
// Exit codes: 0 pass, 1 property violated, 2 inconclusive or out of budget, 3 usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sshdx/sshdx.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace sshdx;

namespace {

enum Exit : int { kPass = 0, kViolated = 1, kInconclusive = 2, kUsage = 3 };

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> budget;
    std::string out_dir;
    std::size_t threads = 1;
};

/// Maps a library error to an exit code. Parse errors count as usage errors unless
/// the command's job is to judge the files (`verify`).
int exit_code_for(std::exception_ptr ep, bool parse_is_violation) {
    try {
        std::rethrow_exception(ep);
    } catch (const StageError& e) {
        if (e.cause()) return exit_code_for(e.cause(), parse_is_violation);
        return kViolated;
    } catch (const ParseError&) {
        return parse_is_violation ? kViolated : kUsage;
    } catch (const ParameterError&) {
        return kUsage;
    } catch (const ShapeError&) {
        return kUsage;
    } catch (const ResourceError&) {
        return kInconclusive;
    } catch (const Error&) {
        return kViolated;
    } catch (const std::filesystem::filesystem_error&) {
        return kUsage;
    } catch (...) {
        return kViolated;
    }
}

PipelineConfig config_from(const Globals& g) {
    PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
    if (g.seed) cfg.seed = *g.seed;
    if (g.budget) cfg.budget = *g.budget;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    cfg.threads = g.threads;
    validate(cfg);
    return cfg;
}

fs::path out_dir(const Globals& g) {
    const fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
    fs::create_directories(dir);
    return dir;
}

std::uint64_t budget_of(const Globals& g) { return g.budget.value_or(kDefaultBudget); }

void emit(const ordered_json& j) { std::cout << j.dump() << '\n'; }

template <class F>
auto load(const std::string& path, F&& parse) {
    return parse_file(path, std::forward<F>(parse));
}

ChainComplex load_chain(const std::string& path, bool allow_degenerate = true) {
    return load(path, [&](const std::string& t) { return parse_chain3(t, allow_degenerate); });
}

XorInstance load_instance(const std::string& path) {
    return load(path, [](const std::string& t) { return parse_xor(t); });
}

int cmd_build_complex(const Globals& g, const std::string& group, const std::string& ga, const std::string& gb) {
    auto cfg = config_from(g);
    if (!group.empty()) cfg.group = group;
    if (!ga.empty()) cfg.gens_a = detail::parse_indices(ga, 0);
    if (!gb.empty()) cfg.gens_b = detail::parse_indices(gb, 0);
    const auto grp = detail::load_group(cfg);
    const auto cx = build_lr_complex(grp, cfg.gens_a, cfg.gens_b);
    const auto dir = out_dir(g);
    write_text_file(dir / "complex.lr", to_lr_text(cx));
    RunReport rep;
    auto rec = detail::record("complex");
    rec["group"] = grp.name();
    rec["delta"] = cx.delta();
    detail::check_complex_counts(rep, rec, cx);
    emit(rec);
    return rep.passed() ? kPass : kViolated;
}

int cmd_verify_chain(const std::string& path) {
    const auto [d1, d2] = load(path, [](const std::string& t) {
        std::istringstream is(t);
        LineReader in(is);
        return read_chain3_matrices(in);
    });
    RunReport rep;
    auto rec = detail::record("chain");
    if (const auto defect = detail::boundary_defect(d1, d2)) {
        detail::check(rep, rec, "boundary_identity", false);
        rec["defect"] = {{"row", defect->first}, {"column", defect->second}};
        emit(rec);
        std::cerr << "∂₁∂₂ != 0 at (row " << defect->first << ", column " << defect->second << ")\n";
        return kViolated;
    }
    detail::check_chain(rep, rec, ChainComplex(d1, d2, true));
    emit(rec);
    return rep.passed() ? kPass : kViolated;
}

int cmd_check_expansion(const Globals& g, const std::string& path, const std::string& rho1, const std::string& rho2,
                        const std::string& mode, const std::string& direction, std::size_t samples) {
    const auto x = load_chain(path);
    ExpansionParams prm;
    prm.rho1 = parse_rational(rho1);
    prm.rho2 = parse_rational(rho2);
    prm.mode = parse_expansion_mode(mode);
    prm.direction = parse_direction(direction);
    prm.samples = samples;
    prm.seed = g.seed.value_or(1);
    prm.threads = g.threads;
    prm.budget = budget_of(g);
    const auto er = check_ss_expansion(x, prm);
    ordered_json rec;
    rec["direction"] = to_string(er.direction);
    rec["mode"] = to_string(er.mode);
    rec["rho1"] = to_string(er.rho1);
    rec["rho2"] = to_string(er.rho2);
    rec["chains_checked"] = er.chains_checked;
    if (er.counterexample) {
        rec["result"] = "counterexample";
        rec["counterexample"] = er.counterexample->to_string();
        emit(rec);
        return kViolated;
    }
    if (er.mode == ExpansionMode::sampled) {
        rec["result"] = "no counterexample found";
        emit(rec);
        return kInconclusive;
    }
    rec["result"] = "verified";
    emit(rec);
    return kPass;
}

int cmd_search_codes(const Globals& g, std::size_t delta_len) {
    const auto cfg = config_from(g);
    BaseCodeSearchParams prm;
    prm.delta_len = delta_len;
    prm.r = cfg.r;
    prm.delta = cfg.delta;
    prm.w = cfg.w;
    prm.p = cfg.p;
    prm.trials = cfg.trials;
    prm.seed = cfg.seed;
    prm.budget = cfg.budget;
    const auto found = search_base_codes(prm);
    ordered_json rec;
    rec["length"] = delta_len;
    rec["trials"] = cfg.trials;
    if (!found) {
        rec["result"] = "none found";
        emit(rec);
        return kInconclusive;
    }
    const auto dir = out_dir(g);
    write_text_file(dir / "code_a.f2code", to_code_text(found->code_a));
    write_text_file(dir / "code_b.f2code", to_code_text(found->code_b));
    rec["result"] = "found";
    rec["trial"] = found->trial;
    rec["k_a"] = found->code_a.dim();
    rec["k_b"] = found->code_b.dim();
    emit(rec);
    return kPass;
}

int cmd_emit_xor(const Globals& g, const std::string& path, const std::string& beta_path) {
    const auto x = load_chain(path);
    const BitVec beta = beta_path.empty() ? pick_beta(x) : load(beta_path, detail::parse_bits_line);
    const auto inst = xor_from_chain(x, beta);
    const auto dir = out_dir(g);
    write_text_file(dir / "beta.txt", detail::bits_line(beta));
    write_text_file(dir / "instance.xor", serialize(inst));
    ordered_json rec;
    rec["variables"] = inst.num_vars();
    rec["constraints"] = inst.size();
    rec["max_arity"] = inst.max_arity();
    emit(rec);
    return kPass;
}

int cmd_reduce3(const Globals& g, const std::string& path) {
    const auto inst = load_instance(path);
    std::vector<ReductionRound> trace;
    const auto r3 = reduce_to_3xor(inst, &trace);
    write_text_file(out_dir(g) / "instance3.xor", serialize(r3));
    ordered_json rec;
    rec["rounds"] = trace.size();
    rec["variables"] = r3.num_vars();
    rec["constraints"] = r3.size();
    rec["max_arity"] = r3.max_arity();
    emit(rec);
    return kPass;
}

int cmd_value(const Globals& g, const std::string& path) {
    const auto inst = load_instance(path);
    const auto v = value_bruteforce(inst, budget_of(g), g.threads);
    ordered_json rec;
    rec["value"] = to_string(v.value);
    rec["satisfied"] = v.satisfied;
    rec["constraints"] = inst.size();
    rec["witness"] = v.witness->to_string();
    emit(rec);
    return kPass;
}

int cmd_refute(const Globals& g, const std::string& path, std::size_t width, std::size_t cap) {
    const auto inst = load_instance(path);
    const auto cl = width_bounded_closure(inst, width, cap, g.threads);
    ordered_json rec;
    rec["width"] = width;
    rec["cap"] = cap;
    rec["status"] = to_string(cl.status);
    rec["derived"] = cl.size();
    if (const auto dag = cl.refutation()) {
        rec["refutation_size"] = dag->nodes.size();
        rec["refutation_valid"] = check_dag(*dag, inst);
    }
    emit(rec);
    switch (cl.status) {
        case ClosureStatus::refuted: return kPass;
        case ClosureStatus::not_refuted: return kViolated;
        default: return kInconclusive;
    }
}

int cmd_pseudoexp(const Globals& g, const std::string& path, std::size_t level, std::size_t cap,
                  const std::string& out) {
    const auto inst = load_instance(path);
    const auto pe = build_pseudoexpectation(inst, level, cap, g.threads, budget_of(g));
    ordered_json rec;
    rec["level"] = level;
    if (!pe) {
        rec["status"] = "refuted";
        emit(rec);
        return kViolated;
    }
    const fs::path target = out.empty() ? out_dir(g) / "moments.json" : fs::path(out);
    write_text_file(target, moments_to_json(*pe).dump(1) + "\n");
    const auto ch = check_pseudoexpectation(*pe, inst, budget_of(g));
    rec["status"] = "constructed";
    rec["moments"] = pe->moments().size();
    rec["min_eigenvalue"] = detail::rounded(ch.min_eigenvalue);
    if (inst.max_arity() <= 2 * level) rec["objective"] = detail::rounded(sos_objective(*pe, inst));
    emit(rec);
    return ch.all() ? kPass : kViolated;
}

int report_result(const RunReport& rep) {
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : rep.failures) std::cerr << "FAIL " << f << '\n';
    std::cout << (rep.passed() ? "PASS" : "FAIL") << " (" << rep.records.size() << " stages, " << rep.failures.size()
              << " failed checks)\n";
    return rep.passed() ? kPass : kViolated;
}

int cmd_pipeline(const Globals& g) {
    if (g.config.empty()) throw ParameterError("pipeline needs --config");
    return report_result(run_pipeline(config_from(g)));
}

int cmd_verify(const Globals& g, const std::string& dir) {
    const std::string target = !dir.empty() ? dir : !g.out_dir.empty() ? g.out_dir : config_from(g).out_dir;
    if (!fs::is_directory(target)) throw ParameterError("no artifact directory " + target);
    return report_result(verify_artifacts(target, budget_of(g)));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Small-set HDX chain complexes, XOR instances and their certificates"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "flat key = value configuration file");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--budget", g.budget, "cap on any exhaustive enumeration");
    app.add_option("--out-dir", g.out_dir, "artifact directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

    std::string group, gens_a, gens_b;
    auto* build = app.add_subcommand("build-complex", "build a left-right Cayley complex and dump complex.lr");
    build->add_option("--group", group, "cyclic <m> | psl2 <q> | table <file>");
    build->add_option("--gens-a", gens_a, "comma-separated left generators");
    build->add_option("--gens-b", gens_b, "comma-separated right generators");

    std::string chain_path;
    auto* verify_chain = app.add_subcommand("verify-chain", "check a chain3 file");
    verify_chain->add_option("chain", chain_path)->required();

    std::string rho1 = "1/10", rho2 = "1/10", mode = "exhaustive", direction = "coboundary";
    std::size_t samples = 1000;
    auto* expansion = app.add_subcommand("check-expansion", "small-set (co)boundary expansion");
    expansion->add_option("chain", chain_path)->required();
    expansion->add_option("--rho1", rho1);
    expansion->add_option("--rho2", rho2);
    expansion->add_option("--mode", mode, "exhaustive | sampled");
    expansion->add_option("--direction", direction, "boundary | coboundary");
    expansion->add_option("--samples", samples);

    std::size_t delta_len = 0;
    auto* search = app.add_subcommand("search-codes", "random search for a base-code pair");
    search->add_option("--length", delta_len, "code length Δ")->required()->check(CLI::PositiveNumber);

    std::string beta_path;
    auto* emit_xor = app.add_subcommand("emit-xor", "XOR instance from a chain complex");
    emit_xor->add_option("chain", chain_path)->required();
    emit_xor->add_option("--beta", beta_path, "file holding β as a 0/1 line");

    std::string instance_path;
    auto* reduce3 = app.add_subcommand("reduce3", "reduce an instance to 3-XOR");
    reduce3->add_option("instance", instance_path)->required();

    auto* value = app.add_subcommand("value", "exact value by brute force");
    value->add_option("instance", instance_path)->required();

    std::size_t width = 2, cap = 200000;
    auto* refute = app.add_subcommand("refute", "width-bounded ⊕-resolution closure (0 refuted, 1 not, 2 inconclusive)");
    refute->add_option("instance", instance_path)->required();
    refute->add_option("--width", width);
    refute->add_option("--cap", cap);

    std::size_t level = 1;
    std::string moments_out;
    auto* pseudoexp = app.add_subcommand("pseudoexp", "closure pseudo-expectation at level t");
    pseudoexp->add_option("instance", instance_path)->required();
    pseudoexp->add_option("--level", level)->check(CLI::PositiveNumber);
    pseudoexp->add_option("--cap", cap);
    pseudoexp->add_option("--out", moments_out, "moments file (default <out-dir>/moments.json)");

    auto* pipeline = app.add_subcommand("pipeline", "run every stage from a config");

    std::string verify_dir;
    auto* verify = app.add_subcommand("verify", "re-check dumped artifacts");
    verify->add_option("dir", verify_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        if (*build) return cmd_build_complex(g, group, gens_a, gens_b);
        if (*verify_chain) return cmd_verify_chain(chain_path);
        if (*expansion) return cmd_check_expansion(g, chain_path, rho1, rho2, mode, direction, samples);
        if (*search) return cmd_search_codes(g, delta_len);
        if (*emit_xor) return cmd_emit_xor(g, chain_path, beta_path);
        if (*reduce3) return cmd_reduce3(g, instance_path);
        if (*value) return cmd_value(g, instance_path);
        if (*refute) return cmd_refute(g, instance_path, width, cap);
        if (*pseudoexp) return cmd_pseudoexp(g, instance_path, level, cap, moments_out);
        if (*pipeline) return cmd_pipeline(g);
        if (*verify) return cmd_verify(g, verify_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(std::current_exception(), verify->parsed());
    }
    return kUsage;
}
