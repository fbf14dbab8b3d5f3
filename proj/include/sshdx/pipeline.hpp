#pragma once

// Configuration, end-to-end runs over dumped artifacts, and artifact re-verification.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sshdx/chain.hpp"
#include "sshdx/codes.hpp"
#include "sshdx/error.hpp"
#include "sshdx/graph.hpp"
#include "sshdx/groups.hpp"
#include "sshdx/lr_complex.hpp"
#include "sshdx/refute.hpp"
#include "sshdx/util.hpp"
#include "sshdx/xor.hpp"

namespace sshdx {

inline constexpr const char* kReportSchema = "sshdx.report/1";

/// Flat "key = value" configuration. `threads` and `out_dir` steer execution only and
/// never reach an artifact.
struct PipelineConfig {
    std::string group = "cyclic 6";  // "cyclic <m>", "psl2 <q>" or "table <path>"
    std::vector<std::size_t> gens_a{1, 5};
    std::vector<std::size_t> gens_b{2, 4};
    std::string base_codes = "search";  // "search" or "given"
    std::string code_a;                 // f2code paths when base_codes = given
    std::string code_b;
    Rational r{1, 4};
    Rational delta{1, 4};
    Rational eps{1, 4};
    std::size_t w = 2;
    std::size_t p = 0;
    std::size_t trials = 100;
    Rational rho1{1, 10};
    Rational rho2{1, 10};
    std::string expansion_mode = "exhaustive";  // exhaustive | sampled | off
    std::string expansion_direction = "both";   // both | boundary | coboundary
    std::size_t samples = 1000;
    std::uint64_t budget = kDefaultBudget;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool reduce3 = true;
    bool value = true;
    std::size_t refute_width = 0;  // 0 skips the closure stage
    std::size_t closure_cap = 200000;
    std::size_t pseudoexp_level = 0;  // 0 skips the pseudo-expectation stage
    std::string out_dir = "sshdx-out";

    /// Directory that relative paths in the file are resolved against; not serialized.
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    }
};

namespace detail {

inline std::string join_indices(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

inline std::vector<std::size_t> parse_indices(const std::string& s, std::size_t line) {
    std::vector<std::size_t> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(parse_count(s.substr(start, comma - start), line));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

inline std::string bool_text(bool b) { return b ? "true" : "false"; }

inline bool parse_bool(const std::string& s, std::size_t line) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ParseError(line, "expected true or false, got '" + s + "'");
}

// Every key with its writer and reader, in canonical order.
struct ConfigKey {
    const char* name;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&, std::size_t)> set;
};

inline Rational rational_field(const std::string& v, std::size_t line) {
    try {
        return parse_rational(v);
    } catch (const ParameterError& e) {
        throw ParseError(line, e.what());
    }
}

inline std::uint64_t u64_field(const std::string& v, std::size_t line) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw ParseError(line, "expected a non-negative integer, got '" + v + "'");
    }
    return x;
}

inline const std::vector<ConfigKey>& config_keys() {
    using C = PipelineConfig;
    using S = const std::string&;
    using L = std::size_t;
    auto str = [](std::string C::*m) {
        return ConfigKey{"", [m](const C& c) { return c.*m; }, [m](C& c, S v, L) { c.*m = v; }};
    };
    auto rat = [](Rational C::*m) {
        return ConfigKey{"", [m](const C& c) { return to_string(c.*m); },
                         [m](C& c, S v, L l) { c.*m = rational_field(v, l); }};
    };
    auto count = [](std::size_t C::*m) {
        return ConfigKey{"", [m](const C& c) { return std::to_string(c.*m); },
                         [m](C& c, S v, L l) { c.*m = static_cast<std::size_t>(u64_field(v, l)); }};
    };
    auto u64 = [](std::uint64_t C::*m) {
        return ConfigKey{"", [m](const C& c) { return std::to_string(c.*m); },
                         [m](C& c, S v, L l) { c.*m = u64_field(v, l); }};
    };
    auto flag = [](bool C::*m) {
        return ConfigKey{"", [m](const C& c) { return bool_text(c.*m); },
                         [m](C& c, S v, L l) { c.*m = parse_bool(v, l); }};
    };
    auto gens = [](std::vector<std::size_t> C::*m) {
        return ConfigKey{"", [m](const C& c) { return join_indices(c.*m); },
                         [m](C& c, S v, L l) { c.*m = parse_indices(v, l); }};
    };
    auto named = [](const char* name, ConfigKey k) {
        k.name = name;
        return k;
    };
    static const std::vector<ConfigKey> keys = {
        named("group", str(&C::group)),
        named("gens_a", gens(&C::gens_a)),
        named("gens_b", gens(&C::gens_b)),
        named("base_codes", str(&C::base_codes)),
        named("code_a", str(&C::code_a)),
        named("code_b", str(&C::code_b)),
        named("r", rat(&C::r)),
        named("delta", rat(&C::delta)),
        named("eps", rat(&C::eps)),
        named("w", count(&C::w)),
        named("p", count(&C::p)),
        named("trials", count(&C::trials)),
        named("rho1", rat(&C::rho1)),
        named("rho2", rat(&C::rho2)),
        named("expansion_mode", str(&C::expansion_mode)),
        named("expansion_direction", str(&C::expansion_direction)),
        named("samples", count(&C::samples)),
        named("budget", u64(&C::budget)),
        named("seed", u64(&C::seed)),
        named("threads", count(&C::threads)),
        named("reduce3", flag(&C::reduce3)),
        named("value", flag(&C::value)),
        named("refute_width", count(&C::refute_width)),
        named("closure_cap", count(&C::closure_cap)),
        named("pseudoexp_level", count(&C::pseudoexp_level)),
        named("out_dir", str(&C::out_dir)),
    };
    return keys;
}

inline bool is_run_setting(const std::string& key) { return key == "threads" || key == "out_dir"; }

}  // namespace detail

inline void validate(const PipelineConfig& c) {
    const auto tok = split_ws(c.group);
    if (tok.size() != 2 || (tok[0] != "cyclic" && tok[0] != "psl2" && tok[0] != "table")) {
        throw ParameterError("group must be 'cyclic <m>', 'psl2 <q>' or 'table <path>', got '" + c.group + "'");
    }
    if (c.base_codes != "search" && c.base_codes != "given") {
        throw ParameterError("base_codes must be search or given, got '" + c.base_codes + "'");
    }
    if (c.base_codes == "given" && (c.code_a.empty() || c.code_b.empty())) {
        throw ParameterError("base_codes = given needs code_a and code_b");
    }
    if (c.expansion_mode != "exhaustive" && c.expansion_mode != "sampled" && c.expansion_mode != "off") {
        throw ParameterError("expansion_mode must be exhaustive, sampled or off, got '" + c.expansion_mode + "'");
    }
    if (c.expansion_direction != "both" && c.expansion_direction != "boundary" &&
        c.expansion_direction != "coboundary") {
        throw ParameterError("expansion_direction must be both, boundary or coboundary");
    }
    if (c.rho1 < Rational(0) || c.rho2 < Rational(0)) throw ParameterError("rho1 and rho2 must be non-negative");
    if (c.threads == 0) throw ParameterError("threads must be at least 1");
}

/// Parses the flat format: one "key = value" per line, '#' comments, blank lines.
/// Unknown and repeated keys are errors; absent keys keep their defaults.
inline PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
    PipelineConfig c;
    c.base_dir = base_dir;
    std::map<std::string, std::size_t> seen;
    std::istringstream is(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(is, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') throw ParseError(line, "CR line ending");
        const auto body = detail::trim(raw.substr(0, raw.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
        const auto key = detail::trim(body.substr(0, eq));
        const auto value = detail::trim(body.substr(eq + 1));
        if (!seen.emplace(key, line).second) throw ParseError(line, "repeated key '" + key + "'");
        bool known = false;
        for (const auto& k : detail::config_keys()) {
            if (key == k.name) {
                k.set(c, value, line);
                known = true;
            }
        }
        if (!known) throw ParseError(line, "unknown key '" + key + "'");
    }
    try {
        validate(c);
    } catch (const ParameterError& e) {
        throw ParseError(line, e.what());
    }
    return c;
}

/// Every key in canonical order; parse_config(serialize_config(c)) serializes identically.
inline std::string serialize_config(const PipelineConfig& c, bool include_run_settings = true) {
    std::string out;
    for (const auto& k : detail::config_keys()) {
        if (!include_run_settings && detail::is_run_setting(k.name)) continue;
        out += std::string(k.name) + " = " + k.get(c) + "\n";
    }
    return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw ParameterError("write failed for " + path.string());
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(read_text_file(path), path.parent_path());
    } catch (const ParseError& e) {
        throw e.in_file(path.string());
    }
}

/// Runs a parser over a whole file and tags parse errors with the file name.
template <class F>
auto parse_file(const std::filesystem::path& path, F&& parse) {
    const auto text = read_text_file(path);
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw e.in_file(path.filename().string());
    }
}

/// One record per stage; `failures` names every check that came out false.
struct RunReport {
    std::vector<nlohmann::ordered_json> records;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;

    bool passed() const noexcept { return failures.empty(); }

    std::string to_jsonl() const {
        std::string out;
        for (const auto& r : records) out += r.dump() + "\n";
        return out;
    }
};

namespace detail {

inline nlohmann::ordered_json record(const std::string& stage) {
    nlohmann::ordered_json r;
    r["schema"] = kReportSchema;
    r["stage"] = stage;
    return r;
}

inline void check(RunReport& rep, nlohmann::ordered_json& rec, const std::string& name, bool ok,
                  const std::string& detail = "") {
    rec["checks"][name] = ok;
    if (!ok) {
        rep.failures.push_back(rec["stage"].get<std::string>() + "." + name + (detail.empty() ? "" : ": " + detail));
    }
}

inline double rounded(double x) { return std::round(x * 1e9) / 1e9; }

inline GroupTable load_group(const PipelineConfig& c) {
    const auto tok = split_ws(c.group);
    if (tok.size() != 2) throw ParameterError("bad group spec '" + c.group + "'");
    if (tok[0] == "table") {
        return parse_file(c.resolve(tok[1]), [](const std::string& t) { return parse_group(t); });
    }
    std::size_t n = 0;
    try {
        n = parse_count(tok[1], 0);
    } catch (const ParseError&) {
        throw ParameterError("bad group size in '" + c.group + "'");
    }
    if (tok[0] == "cyclic") return cyclic_group(n);
    if (tok[0] == "psl2") return psl2(n);
    throw ParameterError("bad group kind in '" + c.group + "'");
}

/// Δ² squares at every vertex, counted from the corners of each square.
inline std::vector<std::size_t> square_incidence(const LeftRightCayleyComplex& cx) {
    std::vector<std::size_t> inc(cx.vertex_count(), 0);
    for (const auto& s : cx.squares()) {
        ++inc[cx.vertex(s.g, 0)];
        ++inc[cx.vertex(s.agb, 0)];
        ++inc[cx.vertex(s.ag, 1)];
        ++inc[cx.vertex(s.gb, 1)];
    }
    return inc;
}

inline void check_complex_counts(RunReport& rep, nlohmann::ordered_json& rec, const LeftRightCayleyComplex& cx) {
    const std::size_t d = cx.delta();
    const std::size_t expected = d * d * cx.group_order() / 2;
    rec["group_order"] = cx.group_order();
    rec["delta"] = d;
    rec["vertices"] = cx.vertex_count();
    rec["squares"] = cx.square_count();
    rec["expected_squares"] = expected;
    check(rep, rec, "square_count", d * d * cx.group_order() % 2 == 0 && cx.square_count() == expected);
    const auto inc = square_incidence(cx);
    const bool uniform = std::all_of(inc.begin(), inc.end(), [&](std::size_t x) { return x == d * d; });
    check(rep, rec, "square_incidence", uniform);
}

/// (row, column) of the first nonzero entry of ∂₁∂₂, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> boundary_defect(const BitMatrix& d1, const BitMatrix& d2) {
    if (d1.cols() != d2.rows()) throw ShapeError("∂₁ and ∂₂ do not compose");
    const auto prod = d1 * d2;
    for (std::size_t r = 0; r < prod.rows(); ++r) {
        for (std::size_t c = 0; c < prod.cols(); ++c) {
            if (prod.get(r, c)) return std::make_pair(r, c);
        }
    }
    return std::nullopt;
}

inline void check_chain(RunReport& rep, nlohmann::ordered_json& rec, const ChainComplex& x) {
    rec["x0"] = x.x0();
    rec["x1"] = x.x1();
    rec["x2"] = x.x2();
    check(rep, rec, "boundary_identity", !boundary_defect(x.d1(), x.d2()));
    const auto h1 = cohomology_dim(x);
    const auto bound = static_cast<std::int64_t>(x.x1()) - static_cast<std::int64_t>(x.x0()) -
                       static_cast<std::int64_t>(x.x2());
    rec["max_degree"] = max_degree(x);
    rec["h1_dim"] = h1;
    rec["h1_lower_bound"] = bound;
    check(rep, rec, "h1_bound", static_cast<std::int64_t>(h1) >= bound);
}

inline std::vector<Direction> directions(const std::string& s) {
    if (s == "boundary") return {Direction::boundary};
    if (s == "coboundary") return {Direction::coboundary};
    return {Direction::boundary, Direction::coboundary};
}

inline std::string bits_line(const BitVec& v) { return v.to_string() + "\n"; }

inline BitVec parse_bits_line(const std::string& text) {
    std::istringstream is(text);
    LineReader in(is);
    const auto line = in.next("bit string");
    if (!in.at_end()) throw ParseError(in.line() + 1, "unexpected content after bit string");
    try {
        return BitVec::from_string(line);
    } catch (const Error& e) {
        throw ParseError(1, e.what());
    }
}

class Stages {
public:
    Stages(RunReport& rep, const std::filesystem::path& dir) : rep_(rep), dir_(dir) {
        write_text_file(dir_ / "report.jsonl", "");
        write_text_file(dir_ / "timings.jsonl", "");
    }

    /// Runs `body` as stage `name`; the record is appended to the report file even on failure.
    void run(const std::string& name, const std::function<void(nlohmann::ordered_json&)>& body) {
        auto rec = record(name);
        const auto start = std::chrono::steady_clock::now();
        try {
            body(rec);
        } catch (const Error& e) {
            rec["error"] = e.what();
            emit(rec, start);
            throw StageError(name, e.what(), std::current_exception());
        }
        emit(rec, start);
    }

    void write(const std::string& file, const std::string& text) const { write_text_file(dir_ / file, text); }

private:
    void emit(const nlohmann::ordered_json& rec, std::chrono::steady_clock::time_point start) {
        rep_.records.push_back(rec);
        append("report.jsonl", rec.dump() + "\n");
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        nlohmann::ordered_json t;
        t["stage"] = rec["stage"];
        t["ms"] = ms;
        append("timings.jsonl", t.dump() + "\n");
    }

    void append(const std::string& file, const std::string& text) const {
        std::ofstream out(dir_ / file, std::ios::binary | std::ios::app);
        out << text;
    }

    RunReport& rep_;
    std::filesystem::path dir_;
};

}  // namespace detail

/// Group → complex → base codes → chain complex → β → instance, then the optional
/// stages. Every artifact lands in cfg.out_dir; timings go to timings.jsonl only.
inline RunReport run_pipeline(const PipelineConfig& cfg) {
    using nlohmann::ordered_json;
    validate(cfg);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    RunReport rep;
    detail::Stages st(rep, dir);

    std::optional<GroupTable> group;
    std::optional<LeftRightCayleyComplex> cx;
    LinearCode ca, cb;
    std::optional<ChainComplex> x;
    BitVec beta;
    std::optional<XorInstance> inst;

    st.run("config", [&](ordered_json& rec) {
        for (const auto& k : detail::config_keys()) {
            if (!detail::is_run_setting(k.name)) rec["config"][k.name] = k.get(cfg);
        }
    });

    st.run("complex", [&](ordered_json& rec) {
        group = detail::load_group(cfg);
        cx = build_lr_complex(*group, cfg.gens_a, cfg.gens_b);
        st.write("complex.lr", to_lr_text(*cx));
        rec["group"] = group->name();
        detail::check_complex_counts(rep, rec, *cx);
        const auto ga = cayley_graph(*group, cx->gens_a(), Side::left);
        const auto gb = cayley_graph(*group, cx->gens_b(), Side::right);
        detail::check(rep, rec, "cayley_regular", ga.regular_degree() == cx->delta() && gb.regular_degree() == cx->delta());
        const std::size_t d2 = cx->delta() * cx->delta();
        for (std::size_t side = 0; side < 2; ++side) {
            const auto sq = cx->square_graph(side);
            detail::check(rep, rec, "square_graph_" + std::to_string(side) + "_regular", sq.regular_degree() == d2);
        }
        if (group->order() <= 4096) {
            rec["lambda_a"] = detail::rounded(spectral_lambda(ga));
            rec["lambda_b"] = detail::rounded(spectral_lambda(gb));
        }
    });

    st.run("codes", [&](ordered_json& rec) {
        const std::size_t n = cx->delta();
        rec["source"] = cfg.base_codes;
        if (cfg.base_codes == "given") {
            const auto read = [](const std::string& t) { return parse_code(t); };
            ca = parse_file(cfg.resolve(cfg.code_a), read);
            cb = parse_file(cfg.resolve(cfg.code_b), read);
            if (ca.length() != n || cb.length() != n) {
                throw ShapeError("base codes must have length Δ = " + std::to_string(n));
            }
        } else {
            BaseCodeSearchParams prm;
            prm.delta_len = n;
            prm.r = cfg.r;
            prm.delta = cfg.delta;
            prm.w = cfg.w;
            prm.p = cfg.p;
            prm.trials = cfg.trials;
            prm.seed = cfg.seed;
            prm.budget = cfg.budget;
            const auto found = search_base_codes(prm);
            if (!found) {
                throw ResourceError("no base-code pair in " + std::to_string(cfg.trials) + " trials");
            }
            ca = found->code_a;
            cb = found->code_b;
            rec["trial"] = found->trial;
            detail::check(rep, rec, "base_conditions", check_base_codes(ca, cb, prm).all());
        }
        st.write("code_a.f2code", to_code_text(ca));
        st.write("code_b.f2code", to_code_text(cb));
        rec["k_a"] = ca.dim();
        rec["k_b"] = cb.dim();
        rec["distance_a"] = distance(ca, cfg.budget).to_string();
        rec["distance_b"] = distance(cb, cfg.budget).to_string();
        rec["rate"] = to_string(Rational(static_cast<std::int64_t>(ca.dim()), static_cast<std::int64_t>(n)));
        if (2 * ca.dim() == n) {
            const std::string w = "rate 1/2: the lower bound n - 2m on dim H^1 degenerates";
            rec["warning"] = w;
            rep.warnings.push_back(w);
        }
        const auto tc = theorem_constants(cfg.delta, n, cfg.eps);
        rec["theorem_rho1"] = detail::rounded(tc.rho1);
        rec["theorem_rho2"] = detail::rounded(tc.rho2);
    });

    st.run("chain", [&](ordered_json& rec) {
        x = build_lz_complex(*cx, ca, cb);
        st.write("chain.chain3", to_chain3_text(*x));
        detail::check_chain(rep, rec, *x);
    });

    if (cfg.expansion_mode != "off") {
        st.run("expansion", [&](ordered_json& rec) {
            rec["rho1"] = to_string(cfg.rho1);
            rec["rho2"] = to_string(cfg.rho2);
            rec["mode"] = cfg.expansion_mode;
            for (auto dir : detail::directions(cfg.expansion_direction)) {
                ExpansionParams prm;
                prm.rho1 = cfg.rho1;
                prm.rho2 = cfg.rho2;
                prm.direction = dir;
                prm.mode = parse_expansion_mode(cfg.expansion_mode);
                prm.samples = cfg.samples;
                prm.seed = cfg.seed;
                prm.threads = cfg.threads;
                prm.budget = cfg.budget;
                const auto er = check_ss_expansion(*x, prm);
                ordered_json d;
                d["verified"] = er.verified;
                d["chains_checked"] = er.chains_checked;
                if (er.counterexample) d["counterexample"] = er.counterexample->to_string();
                if (prm.mode == ExpansionMode::exhaustive) {
                    d["definitional_verified"] = er.definitional_verified;
                    detail::check(rep, rec, std::string(to_string(dir)) + "_forms_agree",
                                  er.verified == er.definitional_verified);
                }
                if (prm.mode == ExpansionMode::exhaustive) {
                    const auto sys = min_nontrivial_weight(direction_spaces(*x, dir), cfg.budget);
                    d["distance"] = sys.weight;
                    if (er.verified && cfg.rho2 > Rational(0)) {
                        detail::check(rep, rec, std::string(to_string(dir)) + "_distance_bound",
                                      !at_most_fraction(sys.weight, cfg.rho1, x->x1()));
                    }
                }
                rec[to_string(dir)] = d;
            }
        });
    }

    st.run("beta", [&](ordered_json& rec) {
        const auto h1 = cohomology_dim(*x);
        if (h1 == 0) throw DomainError("dim H^1 = 0, no nontrivial cocycle to encode");
        beta = pick_beta(*x);
        st.write("beta.txt", detail::bits_line(beta));
        rec["weight"] = beta.weight();
        detail::check(rep, rec, "cocycle", x->delta1().apply(beta).is_zero());
        const auto b1 = Subspace::span(x->d1());
        detail::check(rep, rec, "nontrivial", !b1.contains(beta));
        try {
            rec["coset_distance"] = coset_min_weight(beta, b1, cfg.budget);
        } catch (const ResourceError& e) {
            rec["coset_distance"] = nullptr;
            rep.warnings.push_back(std::string("coset distance of beta not computed: ") + e.what());
        }
    });

    st.run("instance", [&](ordered_json& rec) {
        inst = xor_from_chain(*x, beta);
        st.write("instance.xor", serialize(*inst));
        rec["variables"] = inst->num_vars();
        rec["constraints"] = inst->size();
        rec["max_arity"] = inst->max_arity();
    });

    if (cfg.value) {
        st.run("value", [&](ordered_json& rec) {
            const auto v = value_bruteforce(*inst, cfg.budget, cfg.threads);
            rec["value"] = to_string(v.value);
            rec["satisfied"] = v.satisfied;
            rec["witness"] = v.witness->to_string();
            const auto unsat = unsat_fraction_via_distance(*x, beta, cfg.budget);
            rec["unsat_fraction"] = to_string(unsat);
            detail::check(rep, rec, "soundness_identity", Rational(1) - v.value == unsat);
        });
    }

    if (cfg.reduce3) {
        st.run("reduce3", [&](ordered_json& rec) {
            std::vector<ReductionRound> trace;
            const auto r3 = reduce_to_3xor(*inst, &trace);
            st.write("instance3.xor", serialize(r3));
            auto rounds = ordered_json::array();
            for (const auto& t : trace) {
                rounds.push_back({{"arity_before", t.arity_before},
                                  {"arity_after", t.arity_after},
                                  {"variables", t.vars_after},
                                  {"constraints", t.constraints_after}});
            }
            rec["rounds"] = rounds;
            rec["variables"] = r3.num_vars();
            rec["constraints"] = r3.size();
            rec["max_arity"] = r3.max_arity();
            detail::check(rep, rec, "arity_at_most_3", r3.max_arity() <= 3);
        });
    }

    if (cfg.refute_width > 0) {
        st.run("refute", [&](ordered_json& rec) {
            const auto cl = width_bounded_closure(*inst, cfg.refute_width, cfg.closure_cap, cfg.threads);
            rec["width"] = cfg.refute_width;
            rec["cap"] = cfg.closure_cap;
            rec["status"] = to_string(cl.status);
            rec["derived"] = cl.size();
            if (auto dag = cl.refutation()) {
                rec["refutation_size"] = dag->nodes.size();
                detail::check(rep, rec, "refutation_valid", check_dag(*dag, *inst));
            }
            if (auto dag = gaussian_refute(*inst)) {
                const auto tr = potential_trace(*dag, *x, cfg.budget);
                rec["gaussian_size"] = dag->nodes.size();
                rec["gaussian_width"] = dag->max_width();
                rec["root_kappa"] = tr.kappa[dag->root];
                detail::check(rep, rec, "gaussian_valid", check_dag(*dag, *inst));
                detail::check(rep, rec, "leaves_small", tr.leaves_small);
                detail::check(rep, rec, "subadditive", tr.subadditive);
                detail::check(rep, rec, "equations_match", tr.equations_match);
                detail::check(rep, rec, "root_is_cycle", tr.root_is_cycle);
                detail::check(rep, rec, "root_nontrivial", tr.root_nontrivial);
            }
        });
    }

    if (cfg.pseudoexp_level > 0) {
        st.run("pseudoexp", [&](ordered_json& rec) {
            const std::size_t t = cfg.pseudoexp_level;
            rec["level"] = t;
            const auto pe = build_pseudoexpectation(*inst, t, cfg.closure_cap, cfg.threads, cfg.budget);
            if (!pe) {
                rec["status"] = "refuted";
                return;
            }
            rec["status"] = "constructed";
            st.write("moments.json", moments_to_json(*pe).dump(1) + "\n");
            const auto ch = check_pseudoexpectation(*pe, *inst, cfg.budget);
            detail::check(rep, rec, "scaling", ch.scaling);
            detail::check(rep, rec, "respects_constraints", ch.respects_constraints);
            detail::check(rep, rec, "psd", ch.psd);
            rec["min_eigenvalue"] = detail::rounded(ch.min_eigenvalue);
            if (inst->max_arity() <= 2 * t) rec["objective"] = detail::rounded(sos_objective(*pe, *inst));
        });
    }

    return rep;
}

/// Re-checks the artifacts in `dir` from scratch. complex.lr, the two code files,
/// chain.chain3 and report.jsonl are required; the rest is checked when present.
inline RunReport verify_artifacts(const std::filesystem::path& dir, std::uint64_t budget = kDefaultBudget) {
    using nlohmann::ordered_json;
    RunReport rep;
    const auto has = [&](const char* f) { return std::filesystem::exists(dir / f); };

    auto rec = detail::record("complex");
    const auto cx = parse_file(dir / "complex.lr", [](const std::string& t) { return parse_lr_complex(t); });
    detail::check_complex_counts(rep, rec, cx);
    rep.records.push_back(rec);

    rec = detail::record("codes");
    const auto read_code_text = [](const std::string& t) { return parse_code(t); };
    const auto ca = parse_file(dir / "code_a.f2code", read_code_text);
    const auto cb = parse_file(dir / "code_b.f2code", read_code_text);
    detail::check(rep, rec, "lengths", ca.length() == cx.delta() && cb.length() == cx.delta());
    rep.records.push_back(rec);

    rec = detail::record("chain");
    const auto mats = parse_file(dir / "chain.chain3", [](const std::string& t) {
        std::istringstream is(t);
        LineReader in(is);
        return read_chain3_matrices(in);
    });
    std::optional<ChainComplex> x;
    const auto defect = detail::boundary_defect(mats.first, mats.second);
    if (defect) {
        detail::check(rep, rec, "boundary_identity", false,
                      "∂₁∂₂ != 0 at (row " + std::to_string(defect->first) + ", column " +
                          std::to_string(defect->second) + ")");
        rec["defect"] = {defect->first, defect->second};
    } else {
        x.emplace(mats.first, mats.second, true);
        detail::check_chain(rep, rec, *x);
    }
    if (ca.length() == cx.delta() && cb.length() == cx.delta()) {
        const auto rebuilt = build_lz_complex(cx, ca, cb);
        detail::check(rep, rec, "matches_complex_and_codes",
                      rebuilt.d1() == mats.first && rebuilt.d2() == mats.second);
    }
    rep.records.push_back(rec);

    std::optional<BitVec> beta;
    std::optional<XorInstance> inst;
    if (x && has("beta.txt")) {
        rec = detail::record("beta");
        beta = parse_file(dir / "beta.txt", detail::parse_bits_line);
        if (beta->size() != x->x1()) {
            detail::check(rep, rec, "length", false);
            beta.reset();
        } else {
            detail::check(rep, rec, "cocycle", x->delta1().apply(*beta).is_zero());
            detail::check(rep, rec, "nontrivial", !Subspace::span(x->d1()).contains(*beta));
        }
        rep.records.push_back(rec);
    }

    if (has("instance.xor")) {
        rec = detail::record("instance");
        inst = parse_file(dir / "instance.xor", [](const std::string& t) { return parse_xor(t); });
        rec["variables"] = inst->num_vars();
        rec["constraints"] = inst->size();
        if (x && beta) detail::check(rep, rec, "matches_chain_and_beta", *inst == xor_from_chain(*x, *beta));
        rep.records.push_back(rec);
    }

    if (has("instance3.xor")) {
        rec = detail::record("reduce3");
        const auto r3 = parse_file(dir / "instance3.xor", [](const std::string& t) { return parse_xor(t); });
        detail::check(rep, rec, "arity_at_most_3", r3.max_arity() <= 3);
        if (inst) detail::check(rep, rec, "matches_reduction", r3 == reduce_to_3xor(*inst));
        rep.records.push_back(rec);
    }

    if (has("moments.json")) {
        rec = detail::record("pseudoexp");
        const auto pe = parse_file(dir / "moments.json", [](const std::string& t) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(t);
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(1, e.what());
            }
            return moments_from_json(j);
        });
        if (inst) {
            const auto ch = check_pseudoexpectation(pe, *inst, budget);
            detail::check(rep, rec, "scaling", ch.scaling);
            detail::check(rep, rec, "respects_constraints", ch.respects_constraints);
            detail::check(rep, rec, "psd", ch.psd);
        }
        rep.records.push_back(rec);
    }

    // Verdicts in the report that can be recomputed from the artifacts above.
    rec = detail::record("report");
    const auto text = read_text_file(dir / "report.jsonl");
    std::istringstream is(text);
    std::string line;
    std::size_t n = 0;
    bool stored_ok = true;
    while (std::getline(is, line)) {
        ++n;
        nlohmann::json r;
        try {
            r = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("report.jsonl", n, e.what());
        }
        if (r.value("schema", "") != kReportSchema) throw ParseError("report.jsonl", n, "missing or unknown schema");
        const auto stage = r.value("stage", "");
        if (r.contains("error")) stored_ok = false;
        if (r.contains("checks")) {
            for (const auto& [k, v] : r["checks"].items()) stored_ok = stored_ok && v.get<bool>();
        }
        if (stage == "chain" && x) {
            detail::check(rep, rec, "h1_dim", r.value("h1_dim", std::size_t{0}) == cohomology_dim(*x));
        }
        if (stage == "value" && inst && x && beta) {
            const auto v = value_bruteforce(*inst, budget);
            detail::check(rep, rec, "value", r.value("value", "") == to_string(v.value));
            detail::check(rep, rec, "unsat_fraction",
                          r.value("unsat_fraction", "") == to_string(unsat_fraction_via_distance(*x, *beta, budget)));
        }
        if (stage == "refute" && inst) {
            const auto w = r.value("width", std::size_t{0});
            const auto cap = r.value("cap", std::size_t{0});
            const auto cl = width_bounded_closure(*inst, w, cap);
            detail::check(rep, rec, "closure_status", r.value("status", "") == to_string(cl.status));
        }
        if (stage == "pseudoexp" && inst) {
            const bool constructed = r.value("status", "") == "constructed";
            detail::check(rep, rec, "moments_present", constructed == has("moments.json"));
        }
    }
    detail::check(rep, rec, "stored_verdicts_pass", stored_ok);
    rep.records.push_back(rec);
    return rep;
}

}  // namespace sshdx
