#include <gtest/gtest.h>

#include <filesystem>

#include "fixtures.hpp"

using namespace sshdx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sshdx-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig golden(const fs::path& out) {
    auto cfg = load_config(fs::path(SSHDX_CONFIG_DIR) / "z6_golden.cfg");
    cfg.out_dir = out.string();
    return cfg;
}

const nlohmann::ordered_json& stage(const RunReport& rep, const std::string& name) {
    for (const auto& r : rep.records) {
        if (r["stage"] == name) return r;
    }
    throw std::runtime_error("no stage " + name);
}

}  // namespace

TEST(Config, RoundTrip) {
    PipelineConfig c;
    c.group = "psl2 5";
    c.gens_a = {3, 4};
    c.rho1 = Rational(1, 384);
    c.reduce3 = false;
    c.threads = 4;
    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    EXPECT_EQ(serialize_config(back), text);
    EXPECT_EQ(back.rho1, Rational(1, 384));
    EXPECT_EQ(serialize_config(back, false).find("threads"), std::string::npos);
    EXPECT_EQ(serialize_config(back, false).find("out_dir"), std::string::npos);
}

TEST(Config, Strictness) {
    EXPECT_THROW(parse_config("colour = red\n"), ParseError);
    EXPECT_THROW(parse_config("seed = 1\nseed = 2\n"), ParseError);
    EXPECT_THROW(parse_config("rho1 = 1/0\n"), ParseError);
    EXPECT_THROW(parse_config("rho1 = 1/2x\n"), ParseError);
    EXPECT_THROW(parse_config("seed 1\n"), ParseError);
    EXPECT_THROW(parse_config("reduce3 = maybe\n"), ParseError);
    EXPECT_THROW(parse_config("expansion_mode = lazy\n"), ParseError);
    EXPECT_THROW(parse_config("threads = 0\n"), ParseError);
    EXPECT_NO_THROW(parse_config("# only a comment\n\n  seed = 3  # trailing\n"));
    try {
        parse_config("seed = 1\n\nbogus = 2\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Pipeline, GoldenRun) {
    const auto dir = scratch("golden");
    const auto rep = run_pipeline(golden(dir));
    EXPECT_TRUE(rep.passed()) << (rep.failures.empty() ? "" : rep.failures.front());
    const auto& chain = stage(rep, "chain");
    EXPECT_EQ(chain["x1"], 12);
    EXPECT_EQ(chain["x0"], 6);
    EXPECT_EQ(chain["x2"], 6);
    EXPECT_EQ(chain["h1_dim"], 2);
    EXPECT_TRUE(chain["checks"]["boundary_identity"].get<bool>());
    for (const char* f : {"complex.lr", "code_a.f2code", "code_b.f2code", "chain.chain3", "beta.txt", "instance.xor",
                          "instance3.xor", "report.jsonl", "timings.jsonl"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    // rate-1/2 codes make the dimension lower bound vacuous
    ASSERT_FALSE(rep.warnings.empty());
    EXPECT_NE(rep.warnings.front().find("rate 1/2"), std::string::npos);

    const auto inst = parse_xor(read_text_file(dir / "instance.xor"));
    const auto [best, m] = oracle::xor_value(inst.num_vars(), fx::oracle_constraints(inst));
    EXPECT_EQ(stage(rep, "value")["value"],
              to_string(Rational(static_cast<std::int64_t>(best), static_cast<std::int64_t>(m))));

    const auto ver = verify_artifacts(dir);
    EXPECT_TRUE(ver.passed()) << (ver.failures.empty() ? "" : ver.failures.front());
}

TEST(Pipeline, FlippedBoundaryBitIsLocated) {
    const auto dir = scratch("flip");
    ASSERT_TRUE(run_pipeline(golden(dir)).passed());
    std::istringstream is(read_text_file(dir / "chain.chain3"));
    LineReader in(is);
    auto [d1, d2] = read_chain3_matrices(in);
    d2.flip(4, 2);
    const auto prod = d1 * d2;
    std::optional<std::pair<std::size_t, std::size_t>> first;
    for (std::size_t r = 0; r < prod.rows() && !first; ++r) {
        for (std::size_t c = 0; c < prod.cols() && !first; ++c) {
            if (prod.get(r, c)) first = {r, c};
        }
    }
    ASSERT_TRUE(first);
    std::ostringstream os;
    os << "chain3 " << d1.rows() << ' ' << d1.cols() << ' ' << d2.cols() << '\n';
    write_f2mat(os, d1);
    write_f2mat(os, d2);
    write_text_file(dir / "chain.chain3", os.str());
    const auto ver = verify_artifacts(dir);
    EXPECT_FALSE(ver.passed());
    const std::string where =
        "(row " + std::to_string(first->first) + ", column " + std::to_string(first->second) + ")";
    bool named = false;
    for (const auto& f : ver.failures) named = named || f.find(where) != std::string::npos;
    EXPECT_TRUE(named) << where;
}

TEST(Pipeline, TruncatedInstanceNamesFileAndLine) {
    const auto dir = scratch("trunc");
    ASSERT_TRUE(run_pipeline(golden(dir)).passed());
    auto text = read_text_file(dir / "instance.xor");
    // drop the last two lines
    for (int k = 0; k < 2; ++k) text.erase(text.rfind('\n', text.size() - 2) + 1);
    write_text_file(dir / "instance.xor", text);
    try {
        verify_artifacts(dir);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.file(), "instance.xor");
        EXPECT_EQ(e.line(), 12u);
        EXPECT_NE(std::string(e.what()).find("instance.xor: line 12"), std::string::npos) << e.what();
    }
}

TEST(Pipeline, TamperedReportIsCaught) {
    const auto dir = scratch("report");
    ASSERT_TRUE(run_pipeline(golden(dir)).passed());
    auto text = read_text_file(dir / "report.jsonl");
    const auto pos = text.find("\"h1_dim\":2");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 10, "\"h1_dim\":3");
    write_text_file(dir / "report.jsonl", text);
    EXPECT_FALSE(verify_artifacts(dir).passed());
}

TEST(Pipeline, DeterministicAcrossRunsAndThreads) {
    const auto a = scratch("det-a");
    const auto b = scratch("det-b");
    const auto c = scratch("det-c");
    auto cfg = golden(a);
    run_pipeline(cfg);
    cfg.out_dir = b.string();
    run_pipeline(cfg);
    cfg.out_dir = c.string();
    cfg.threads = 4;
    run_pipeline(cfg);
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        if (name == "timings.jsonl") continue;
        const auto ref = read_text_file(entry.path());
        EXPECT_EQ(ref, read_text_file(b / name)) << name;
        EXPECT_EQ(ref, read_text_file(c / name)) << name;
    }
}

TEST(Pipeline, ErrorsCarryTheStage) {
    const auto dir = scratch("err");
    auto cfg = golden(dir);
    cfg.code_a = "missing.f2code";
    try {
        run_pipeline(cfg);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "codes");
    }
    // the record of the failing stage reaches the report file
    EXPECT_NE(read_text_file(dir / "report.jsonl").find("\"error\""), std::string::npos);

    cfg = golden(dir);
    cfg.gens_b = {1, 5};  // collides with A: no valid complex
    EXPECT_THROW(run_pipeline(cfg), StageError);
}

TEST(Pipeline, SearchedCodesOnZ17) {
    const auto dir = scratch("search");
    auto cfg = load_config(fs::path(SSHDX_CONFIG_DIR) / "z17_search.cfg");
    cfg.out_dir = dir.string();
    const auto rep = run_pipeline(cfg);
    EXPECT_TRUE(rep.passed()) << (rep.failures.empty() ? "" : rep.failures.front());
    EXPECT_TRUE(stage(rep, "codes")["checks"]["base_conditions"].get<bool>());
    EXPECT_TRUE(verify_artifacts(dir).passed());
}
